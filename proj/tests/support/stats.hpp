#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

// Goodness-of-fit helpers for the uniformity tests. Instead of computing
// p-values we compare statistics against the 0.99 quantile, which is the
// same test as "p > 0.01".
namespace teststat {

// chi^2 statistic of observed counts against a uniform expectation.
inline double chi2_uniform(const std::vector<long>& counts) {
  long total = 0;
  for (long c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (long c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

// 0.99 quantiles of the chi^2 distribution by degrees of freedom.
inline double chi2_crit99(int dof) {
  static const std::map<int, double> table = {
      {1, 6.6349}, {2, 9.2103},  {3, 11.3449}, {4, 13.2767}, {5, 15.0863},
      {6, 16.8119}, {7, 18.4753}, {8, 20.0902}, {9, 21.6660}, {10, 23.2093},
      {14, 29.1412}, {15, 30.5779}, {16, 31.9999}, {31, 52.1914}, {32, 53.4858},
  };
  auto it = table.find(dof);
  if (it == table.end()) throw std::invalid_argument("chi2_crit99: dof not tabulated");
  return it->second;
}

// True when the count histogram is consistent with uniform at p > 0.01.
inline bool uniform_chi2_ok(const std::vector<long>& counts) {
  return chi2_uniform(counts) < chi2_crit99(static_cast<int>(counts.size()) - 1);
}

// One-sample Kolmogorov-Smirnov statistic against U[0,1].
inline double ks_uniform(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, std::abs(x - lo), std::abs(x - hi)});
  }
  return d;
}

// p > 0.01 <=> D < c(0.01)/sqrt(n) with c(0.01) = sqrt(-ln(0.005)/2).
inline bool uniform_ks_ok(const std::vector<double>& samples) {
  const double crit = std::sqrt(-std::log(0.005) / 2.0) /
                      std::sqrt(static_cast<double>(samples.size()));
  return ks_uniform(samples) < crit;
}

}  // namespace teststat
