#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "udrl/error.hpp"
#include "udrl/rng.hpp"

namespace udrl::harness {

inline constexpr std::size_t kBootstrapResamples = 1000;

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Linear-interpolated quantile of sorted data, q in [0, 1].
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Mean, population std and a percentile-bootstrap confidence interval of the mean.
inline Summary summarize(const std::vector<double>& xs, std::uint64_t seed,
                         std::size_t resamples = kBootstrapResamples, double level = 0.95) {
  if (xs.empty()) throw UsageError("summarize: no samples");
  Summary s;
  s.mean = mean_of(xs);
  double sq = 0.0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(xs.size()));

  Rng rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += xs[rng.index(xs.size())];
    m = acc / static_cast<double>(xs.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  s.ci_low = quantile_sorted(means, tail);
  s.ci_high = quantile_sorted(means, 1.0 - tail);
  return s;
}

// NaN when fewer than two points or either side has zero variance.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw UsageError("pearson: length mismatch");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace udrl::harness
