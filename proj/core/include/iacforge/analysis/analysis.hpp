#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace iacforge::analysis {

struct SizeLimit : std::runtime_error {
  SizeLimit() : std::runtime_error("input exceeds the 1 MiB edit-distance limit") {}
};

inline constexpr std::size_t kMaxLevenshteinInput = 1024 * 1024;

// Character-level edit distance over the raw texts (two-row dynamic
// programming, O(min(|a|,|b|)) memory). Throws SizeLimit when either input
// exceeds 1 MiB.
std::size_t levenshtein(std::string_view a, std::string_view b);

enum class ComplexityClass { Low, Medium, High };

std::string_view to_string(ComplexityClass c);

inline constexpr std::size_t kLowUpperBound = 160;     // exclusive
inline constexpr std::size_t kMediumUpperBound = 1200; // exclusive

// Low < 160, Medium in [160, 1200), High >= 1200. A distance on a boundary
// belongs to the upper class.
ComplexityClass classify_mutation(std::size_t distance);

struct EmptyDataset : std::runtime_error {
  EmptyDataset() : std::runtime_error("no distances to summarize") {}
};

struct ComplexitySummary {
  std::array<std::size_t, 3> counts{};   // Low, Medium, High
  std::array<double, 3> percentages{};   // of the total
  std::size_t total = 0;
  std::size_t min_distance = 0;
  std::size_t max_distance = 0;
  // (distance point, fraction of distances <= point), for caller-chosen points
  std::vector<std::pair<double, double>> cdf;

  nlohmann::json to_json() const;
};

// Summarizes a set of distances. Throws EmptyDataset on an empty input.
ComplexitySummary complexity_distribution(const std::vector<std::size_t>& distances,
                                          const std::vector<double>& cdf_points = {});

}  // namespace iacforge::analysis
