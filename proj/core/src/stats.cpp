#include "tablabel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tablabel {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_variance(const std::vector<double>& xs) {
  double m = mean(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double mode_smallest(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("mode of empty sample");
  std::sort(xs.begin(), xs.end());
  double best = xs[0];
  size_t best_count = 0, run = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    run = (i > 0 && xs[i] == xs[i - 1]) ? run + 1 : 1;
    if (run > best_count) {  // strict: first (smallest) value wins ties
      best_count = run;
      best = xs[i];
    }
  }
  return best;
}

static void central_moments(const std::vector<double>& xs, double& m2, double& m3, double& m4) {
  double m = mean(xs);
  m2 = m3 = m4 = 0;
  for (double x : xs) {
    double d = x - m;
    double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  double n = static_cast<double>(xs.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
}

double skewness(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("skewness of empty sample");
  double m2, m3, m4;
  central_moments(xs, m2, m3, m4);
  if (m2 <= 0) return 0;
  return m3 / std::pow(m2, 1.5);
}

double excess_kurtosis(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("kurtosis of empty sample");
  double m2, m3, m4;
  central_moments(xs, m2, m3, m4);
  if (m2 <= 0) return 0;
  return m4 / (m2 * m2) - 3.0;
}

StatSet10 StatSet10::of(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("StatSet10 of empty sample");
  StatSet10 s;
  s.any = 0;
  s.all = 1;
  double lo = xs[0], hi = xs[0], total = 0;
  for (double x : xs) {
    if (x > 0) s.any = 1;
    if (!(x > 0)) s.all = 0;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    total += x;
  }
  s.mean = total / static_cast<double>(xs.size());
  s.variance = population_variance(xs);
  s.min = lo;
  s.max = hi;
  s.median = tablabel::median(xs);
  s.sum = total;
  s.kurtosis = excess_kurtosis(xs);
  s.skewness = tablabel::skewness(xs);
  return s;
}

void StatSet10::append_to(std::vector<double>& out) const {
  out.insert(out.end(),
             {any, all, mean, variance, min, max, median, sum, kurtosis, skewness});
}

}  // namespace tablabel
