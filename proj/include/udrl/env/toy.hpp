#pragma once

#include <algorithm>

#include "udrl/env/env.hpp"
#include "udrl/rng.hpp"

namespace udrl::env {

// Four-state deterministic toy world.
//
// The transition graph is reconstructed as the smallest deterministic graph
// with four states and exactly three unique trajectories that reproduces the
// four-row behavior table it is used to illustrate:
//
//   s0 --a1 (+2)--> s1 --a3 (-1)--> s2 (terminal)
//   s0 --a2 (+1)--> s3 (terminal)
//
// Episodes start in s0 or s1. Only the drawn edges exist; any other action is
// rejected, which keeps the trajectory set at exactly
//   {s0 a1 s1 a3 s2,  s0 a2 s3,  s1 a3 s2}.
class ToyFourState final : public Env {
public:
  enum State : int { s0 = 0, s1 = 1, s2 = 2, s3 = 3 };
  enum ActionId : int { a1 = 0, a2 = 1, a3 = 2 };
  enum class Start { s0, s1, random };

  explicit ToyFourState(Start start = Start::random) : start_(start) {
    desc_.id = "toy4";
    desc_.observation_dim = 4;
    desc_.discrete_states = true;
    desc_.n_states = 4;
    desc_.action_space = {true, 3, 0.0, 0.0};
    desc_.time_limit = 2;
    desc_.max_return_estimate = 2.0;
  }

  const EnvDescriptor& descriptor() const override { return desc_; }

  void set_start(Start s) { start_ = s; }
  int state() const { return state_; }

  std::vector<int> valid_actions() const override {
    switch (state_) {
      case s0: return {a1, a2};
      case s1: return {a3};
      default: return {};
    }
  }

protected:
  Observation do_reset(std::uint64_t seed) override {
    switch (start_) {
      case Start::s0: state_ = s0; break;
      case Start::s1: state_ = s1; break;
      case Start::random: {
        Rng rng(seed);
        state_ = rng.index(2) == 0 ? s0 : s1;
        break;
      }
    }
    return observe();
  }

  StepResult do_step(const Action& action) override {
    const auto valid = valid_actions();
    if (std::find(valid.begin(), valid.end(), action.index) == valid.end())
      throw UsageError("toy4: action not available in current state");
    StepResult r;
    if (state_ == s0 && action.index == a1) {
      state_ = s1;
      r.reward = 2.0;
    } else if (state_ == s0 && action.index == a2) {
      state_ = s3;
      r.reward = 1.0;
    } else {
      state_ = s2;
      r.reward = -1.0;
    }
    r.done = state_ == s2 || state_ == s3;
    r.next_observation = observe();
    return r;
  }

private:
  Observation observe() const {
    return Observation{one_hot(4, static_cast<std::size_t>(state_)), state_};
  }

  EnvDescriptor desc_;
  Start start_;
  int state_ = s0;
};

}  // namespace udrl::env
