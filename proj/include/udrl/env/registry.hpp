#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "udrl/env/grids.hpp"
#include "udrl/env/point_mass.hpp"
#include "udrl/env/sparse_delay.hpp"
#include "udrl/env/toy.hpp"

namespace udrl::env {

inline constexpr double kSlipProbability = 0.1;

inline const std::vector<std::string>& env_ids() {
  static const std::vector<std::string> ids{"toy4", "chain10", "multigoal11", "slip10",
                                            "pointmass1d"};
  return ids;
}

// Builds a built-in environment by id, optionally under the sparse-delay wrapper.
inline std::unique_ptr<Env> make_env(std::string_view id, bool sparse_delay = false) {
  std::unique_ptr<Env> e;
  if (id == "toy4") e = std::make_unique<ToyFourState>();
  else if (id == "chain10") e = std::make_unique<ChainGrid>(10);
  else if (id == "multigoal11") e = std::make_unique<MultiGoalGrid>(11);
  else if (id == "slip10") e = std::make_unique<SlipGrid>(10, kSlipProbability);
  else if (id == "pointmass1d") e = std::make_unique<PointMass1D>();
  else throw ConfigError("env", "unknown environment '" + std::string(id) + "'");
  if (sparse_delay) e = std::make_unique<SparseDelay>(std::move(e));
  return e;
}

}  // namespace udrl::env
