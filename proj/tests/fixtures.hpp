#pragma once

#include <vector>

#include "udrl/env/toy.hpp"
#include "udrl/replay.hpp"
#include "udrl/rng.hpp"

namespace fixture {

inline udrl::Episode play(udrl::env::Env& e, std::uint64_t seed, const std::vector<int>& actions) {
  udrl::Episode ep;
  udrl::Observation obs = e.reset(seed);
  for (int a : actions) {
    auto r = e.step(udrl::Action::discrete(a));
    ep.append(udrl::Step{obs, udrl::Action::discrete(a), r.reward});
    obs = r.next_observation;
  }
  return ep;
}

// The three unique trajectories of the four-state toy world.
inline std::vector<udrl::Episode> toy_trajectories() {
  using T = udrl::env::ToyFourState;
  T from_s0(T::Start::s0), from_s1(T::Start::s1);
  return {play(from_s0, 0, {T::a1, T::a3}), play(from_s0, 0, {T::a2}), play(from_s1, 0, {T::a3})};
}

// Synthetic discrete episodes: <= max_eps episodes of length 1..max_len over
// n_states states and n_actions actions, integer rewards in [-1, 2].
inline std::vector<udrl::Episode> random_dataset(udrl::Rng& rng, std::size_t max_eps,
                                                 std::size_t max_len, std::size_t n_states,
                                                 std::size_t n_actions) {
  std::vector<udrl::Episode> out(1 + rng.index(max_eps));
  for (auto& ep : out) {
    const std::size_t len = 1 + rng.index(max_len);
    for (std::size_t t = 0; t < len; ++t) {
      const auto s = static_cast<int>(rng.index(n_states));
      std::vector<double> f(n_states, 0.0);
      f[static_cast<std::size_t>(s)] = 1.0;
      ep.append(udrl::Step{udrl::Observation{f, s}, udrl::Action::discrete(static_cast<int>(rng.index(n_actions))),
                           static_cast<double>(static_cast<int>(rng.index(4)) - 1)});
    }
  }
  return out;
}

}  // namespace fixture
