#pragma once

#include <algorithm>
#include <cmath>

#include "udrl/replay.hpp"
#include "udrl/rng.hpp"
#include "udrl/types.hpp"

namespace udrl {

// Statistics of the best stored episodes that exploratory commands are drawn from.
struct ExploratoryDistribution {
  double mean_return = 0.0;     // M
  double std_return = 0.0;      // S, population standard deviation
  long horizon = 1;             // H, rounded mean length (>= 1)

  friend bool operator==(const ExploratoryDistribution&, const ExploratoryDistribution&) = default;
};

inline ExploratoryDistribution fit_exploratory(const ReplayBuffer& buffer, std::size_t last_few) {
  const auto best = buffer.top_k(last_few);
  const double n = static_cast<double>(best.size());
  double sum = 0.0, len = 0.0;
  for (const Episode* e : best) {
    sum += e->total_return;
    len += static_cast<double>(e->length());
  }
  ExploratoryDistribution d;
  d.mean_return = sum / n;
  double sq = 0.0;
  for (const Episode* e : best) sq += (e->total_return - d.mean_return) * (e->total_return - d.mean_return);
  d.std_return = std::sqrt(sq / n);
  d.horizon = std::max(1L, static_cast<long>(std::floor(len / n + 0.5)));
  return d;
}

// d^r ~ U[M, M + S], d^h = H.
inline Command sample_exploratory_command(const ExploratoryDistribution& d, Rng& rng) {
  return Command{rng.uniform(d.mean_return, d.mean_return + d.std_return), d.horizon};
}

// Lower end of the exploratory range with the same horizon.
inline Command derive_eval_command(const ExploratoryDistribution& d) {
  return Command{d.mean_return, d.horizon};
}

}  // namespace udrl
