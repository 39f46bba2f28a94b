#include "iacforge/analysis/analysis.hpp"

#include <algorithm>
#include <numeric>

namespace iacforge::analysis {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() > kMaxLevenshteinInput || b.size() > kMaxLevenshteinInput) throw SizeLimit();
  if (a.size() < b.size()) std::swap(a, b);  // b is the shorter: rows stay small
  if (b.empty()) return a.size();

  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);

  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    char ca = a[i - 1];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (ca == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string_view to_string(ComplexityClass c) {
  switch (c) {
    case ComplexityClass::Low: return "low";
    case ComplexityClass::Medium: return "medium";
    case ComplexityClass::High: return "high";
  }
  return "low";
}

ComplexityClass classify_mutation(std::size_t distance) {
  if (distance < kLowUpperBound) return ComplexityClass::Low;
  if (distance < kMediumUpperBound) return ComplexityClass::Medium;
  return ComplexityClass::High;
}

nlohmann::json ComplexitySummary::to_json() const {
  nlohmann::json cdf_arr = nlohmann::json::array();
  for (const auto& [point, frac] : cdf) cdf_arr.push_back({{"point", point}, {"cdf", frac}});
  return nlohmann::json{
      {"counts",
       {{"low", counts[0]}, {"medium", counts[1]}, {"high", counts[2]}}},
      {"percentages",
       {{"low", percentages[0]}, {"medium", percentages[1]}, {"high", percentages[2]}}},
      {"total", total},
      {"min", min_distance},
      {"max", max_distance},
      {"cdf", std::move(cdf_arr)},
  };
}

ComplexitySummary complexity_distribution(const std::vector<std::size_t>& distances,
                                          const std::vector<double>& cdf_points) {
  if (distances.empty()) throw EmptyDataset();

  ComplexitySummary s;
  s.total = distances.size();
  s.min_distance = *std::min_element(distances.begin(), distances.end());
  s.max_distance = *std::max_element(distances.begin(), distances.end());
  for (auto d : distances) {
    ++s.counts[static_cast<std::size_t>(classify_mutation(d))];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    s.percentages[i] = 100.0 * static_cast<double>(s.counts[i]) / static_cast<double>(s.total);
  }
  for (double point : cdf_points) {
    std::size_t below = 0;
    for (auto d : distances) {
      if (static_cast<double>(d) <= point) ++below;
    }
    s.cdf.emplace_back(point, static_cast<double>(below) / static_cast<double>(s.total));
  }
  return s;
}

}  // namespace iacforge::analysis
