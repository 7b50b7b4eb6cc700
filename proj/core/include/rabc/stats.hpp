#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace rabc {

inline double mean_of(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean_of: empty");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double variance_of(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("variance_of: need n >= 2");
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Linear-interpolation quantile on a sorted sample (R type 7).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile_of(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  return quantile_sorted(x, p);
}

// One-sample Kolmogorov-Smirnov statistic against an analytic CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Large-sample critical value for the one-sample KS test.
inline double ks_critical(double alpha, std::size_t n) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

inline double skewness_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double s2 = 0.0, s3 = 0.0;
  for (double v : x) {
    const double d = v - m;
    s2 += d * d;
    s3 += d * d * d;
  }
  const double n = static_cast<double>(x.size());
  const double sd = std::sqrt(s2 / n);
  return (s3 / n) / (sd * sd * sd);
}

inline double kurtosis_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double s2 = 0.0, s4 = 0.0;
  for (double v : x) {
    const double d = v - m;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  const double n = static_cast<double>(x.size());
  const double v2 = s2 / n;
  return (s4 / n) / (v2 * v2);
}

}  // namespace rabc
