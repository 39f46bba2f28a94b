#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "iacforge/analysis/analysis.hpp"

using namespace iacforge;

namespace {

// Full-matrix reference implementation used as the oracle.
std::size_t matrix_levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[a.size()][b.size()];
}

std::string random_string(std::mt19937_64& rng, std::size_t max_len) {
  static const char alphabet[] = "abcde {}=\"\n";
  std::size_t len = rng() % (max_len + 1);
  std::string s;
  s.reserve(len);
  for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % (sizeof(alphabet) - 1)]);
  return s;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("edit distance on known pairs") {
  CHECK(analysis::levenshtein("kitten", "sitting") == 3);
  CHECK(analysis::levenshtein("", "") == 0);
  CHECK(analysis::levenshtein("abc", "") == 3);
  CHECK(analysis::levenshtein("", "abc") == 3);
  CHECK(analysis::levenshtein("same", "same") == 0);
  CHECK(analysis::levenshtein("flaw", "lawn") == 2);
}

TEST_CASE("edit distance is symmetric and bounded") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 50; ++i) {
    auto a = random_string(rng, 40);
    auto b = random_string(rng, 40);
    auto d = analysis::levenshtein(a, b);
    CHECK(d == analysis::levenshtein(b, a));
    CHECK(d <= std::max(a.size(), b.size()));
    std::size_t longer = std::max(a.size(), b.size());
    std::size_t shorter = std::min(a.size(), b.size());
    CHECK(d >= longer - shorter);
  }
}

TEST_CASE("edit distance matches the full-matrix oracle") {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 200; ++i) {
    auto a = random_string(rng, 120);
    auto b = random_string(rng, 120);
    CAPTURE(a);
    CAPTURE(b);
    REQUIRE(analysis::levenshtein(a, b) == matrix_levenshtein(a, b));
  }
}

TEST_CASE("oversized inputs are refused") {
  std::string big(analysis::kMaxLevenshteinInput + 1, 'x');
  CHECK_THROWS_AS(analysis::levenshtein(big, "a"), analysis::SizeLimit);
  CHECK_THROWS_AS(analysis::levenshtein("a", big), analysis::SizeLimit);
  std::string at_limit(analysis::kMaxLevenshteinInput, 'x');
  CHECK_NOTHROW(analysis::levenshtein(at_limit, ""));
}

TEST_CASE("complexity classes split at the documented boundaries") {
  using analysis::ComplexityClass;
  CHECK(analysis::classify_mutation(0) == ComplexityClass::Low);
  CHECK(analysis::classify_mutation(159) == ComplexityClass::Low);
  CHECK(analysis::classify_mutation(analysis::kLowUpperBound) == ComplexityClass::Medium);
  CHECK(analysis::classify_mutation(700) == ComplexityClass::Medium);
  CHECK(analysis::classify_mutation(1199) == ComplexityClass::Medium);
  CHECK(analysis::classify_mutation(analysis::kMediumUpperBound) == ComplexityClass::High);
  CHECK(analysis::classify_mutation(4619) == ComplexityClass::High);
}

TEST_CASE("distribution summary counts classes and tracks extremes") {
  auto s = analysis::complexity_distribution({10, 200, 1500, 50});
  CHECK(s.total == 4);
  CHECK(s.counts[0] == 2);
  CHECK(s.counts[1] == 1);
  CHECK(s.counts[2] == 1);
  CHECK(s.percentages[0] == doctest::Approx(50.0));
  CHECK(s.percentages[1] == doctest::Approx(25.0));
  CHECK(s.percentages[2] == doctest::Approx(25.0));
  CHECK(s.min_distance == 10);
  CHECK(s.max_distance == 1500);

  auto j = s.to_json();
  CHECK(j["total"] == 4);
  CHECK(j["counts"]["low"] == 2);
  CHECK(j["counts"]["medium"] == 1);
  CHECK(j["counts"]["high"] == 1);
}

TEST_CASE("distribution cdf is monotone and ends at the maximum") {
  std::vector<std::size_t> distances;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) distances.push_back(rng() % 5000);
  std::vector<double> points;
  for (double p = 0.0; p <= 5000.0; p += 250.0) points.push_back(p);
  auto s = analysis::complexity_distribution(distances, points);
  REQUIRE_FALSE(s.cdf.empty());
  double prev = -1.0;
  for (const auto& [d, frac] : s.cdf) {
    CHECK(frac >= prev);
    prev = frac;
    CHECK(frac >= 0.0);
    CHECK(frac <= 1.0);
  }
  CHECK(s.cdf.back().second == doctest::Approx(1.0));
  CHECK(s.cdf.back().first >= s.max_distance);
  std::size_t sum = s.counts[0] + s.counts[1] + s.counts[2];
  CHECK(sum == distances.size());
}

TEST_CASE("an empty dataset has no distribution") {
  CHECK_THROWS_AS(analysis::complexity_distribution({}), analysis::EmptyDataset);
}

}  // TEST_SUITE
