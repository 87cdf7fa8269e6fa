#pragma once

#include <algorithm>
#include <cmath>

#include "udrl/rng.hpp"
#include "udrl/types.hpp"

namespace udrl::behavior {

enum class SelectMode { sample, greedy };

// sample: categorical draw, or per-dimension Normal draw clipped to
// [low, high]. greedy: argmax class (first on ties), or the mean.
inline Action select_action(const ActionDistribution& dist, SelectMode mode, Rng& rng,
                            double low = -1.0, double high = 1.0) {
  if (dist.categorical()) {
    const auto& p = dist.probs;
    if (mode == SelectMode::greedy)
      return Action::discrete(static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()));
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return Action::discrete(static_cast<int>(i));
    }
    // Rounding left u above the cumulative sum: take the last non-zero class.
    for (std::size_t i = p.size(); i-- > 0;)
      if (p[i] > 0.0) return Action::discrete(static_cast<int>(i));
    return Action::discrete(static_cast<int>(p.size() - 1));
  }
  std::vector<double> a(dist.mean.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = dist.mean[k];
    if (mode == SelectMode::sample) a[k] += std::exp(dist.log_std[k]) * rng.normal();
    a[k] = std::clamp(a[k], low, high);
  }
  return Action::continuous(std::move(a));
}

// Zeroes the probability of actions outside `valid` and renormalises. Falls
// back to uniform over `valid` when no mass is left.
inline ActionDistribution restrict_to(ActionDistribution dist, const std::vector<int>& valid) {
  std::vector<double> p(dist.probs.size(), 0.0);
  double mass = 0.0;
  for (int a : valid) {
    p[static_cast<std::size_t>(a)] = dist.probs[static_cast<std::size_t>(a)];
    mass += p[static_cast<std::size_t>(a)];
  }
  if (mass > 0.0) {
    for (double& x : p) x /= mass;
  } else {
    for (int a : valid) p[static_cast<std::size_t>(a)] = 1.0 / static_cast<double>(valid.size());
  }
  dist.probs = std::move(p);
  return dist;
}

}  // namespace udrl::behavior
