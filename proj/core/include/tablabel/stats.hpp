#pragma once

#include <cstddef>
#include <vector>

namespace tablabel {

// Statistics primitives shared by the feature extractors. Conventions, fixed
// once for the whole library:
//   - variance is the population variance (divide by n),
//   - skewness g1 = m3 / m2^1.5 and excess kurtosis g2 = m4 / m2^2 - 3,
//     both defined as 0 for zero-variance samples,
//   - mode is the most frequent value; ties resolve to the smallest value,
//   - the median of an even-length sample is the midpoint of the middle two.

double mean(const std::vector<double>& xs);
double population_variance(const std::vector<double>& xs);
double median(std::vector<double> xs);        // by value: sorts its copy
double mode_smallest(std::vector<double> xs); // by value: sorts its copy
double skewness(const std::vector<double>& xs);
double excess_kurtosis(const std::vector<double>& xs);

/// The 10-statistic block used by the character-distribution features:
/// any, all, mean, variance, min, max, median, sum, kurtosis, skewness
/// over a sample of per-value counts.
struct StatSet10 {
  double any = 0, all = 0, mean = 0, variance = 0, min = 0, max = 0;
  double median = 0, sum = 0, kurtosis = 0, skewness = 0;

  static StatSet10 of(const std::vector<double>& xs);
  void append_to(std::vector<double>& out) const;
  static constexpr size_t kSize = 10;
};

}  // namespace tablabel
