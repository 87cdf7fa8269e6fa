#pragma once

#include <algorithm>

#include "udrl/env/env.hpp"
#include "udrl/rng.hpp"

namespace udrl::env {

inline constexpr double kStepCost = -0.1;

// Positions 0..N-1 on a line, actions {left, right}, start at 0. Entering N-1
// pays +10 and ends the episode; every other step pays -0.1. Walls clamp.
// An action is inverted with probability `slip` (SlipGrid when slip > 0).
class ChainGrid : public Env {
public:
  enum ActionId : int { left = 0, right = 1 };

  explicit ChainGrid(std::size_t n, double slip = 0.0) : n_(n), slip_(slip) {
    if (n < 2) throw ConfigError("env", "ChainGrid needs at least 2 positions");
    if (slip < 0.0 || slip > 1.0) throw ConfigError("env", "slip probability outside [0, 1]");
    desc_.id = slip > 0.0 ? "slip" + std::to_string(n) : "chain" + std::to_string(n);
    desc_.observation_dim = n;
    desc_.discrete_states = true;
    desc_.n_states = n;
    desc_.action_space = {true, 2, 0.0, 0.0};
    desc_.time_limit = 5 * n;
    desc_.max_return_estimate = kGoalReward;
  }

  static constexpr double kGoalReward = 10.0;

  const EnvDescriptor& descriptor() const override { return desc_; }
  std::size_t position() const { return pos_; }

protected:
  Observation do_reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    pos_ = 0;
    return observe();
  }

  StepResult do_step(const Action& action) override {
    int a = action.index;
    if (slip_ > 0.0 && rng_.uniform() < slip_) a = 1 - a;
    if (a == right) pos_ = std::min(pos_ + 1, n_ - 1);
    else if (pos_ > 0) --pos_;
    StepResult r;
    if (pos_ == n_ - 1) {
      r.reward = kGoalReward;
      r.done = true;
    } else {
      r.reward = kStepCost;
    }
    r.next_observation = observe();
    return r;
  }

private:
  Observation observe() const { return Observation{one_hot(n_, pos_), static_cast<int>(pos_)}; }

  std::size_t n_;
  double slip_;
  std::size_t pos_ = 0;
  Rng rng_;
  EnvDescriptor desc_;
};

class SlipGrid final : public ChainGrid {
public:
  SlipGrid(std::size_t n, double p) : ChainGrid(n, p) {}
};

// Positions 0..N-1, start at the center. Position 0 pays +2 and position N-1
// pays +10, both terminal; every other step pays -0.1.
class MultiGoalGrid final : public Env {
public:
  enum ActionId : int { left = 0, right = 1 };
  static constexpr double kLeftReward = 2.0;
  static constexpr double kRightReward = 10.0;

  explicit MultiGoalGrid(std::size_t n) : n_(n) {
    if (n < 3) throw ConfigError("env", "MultiGoalGrid needs at least 3 positions");
    desc_.id = "multigoal" + std::to_string(n);
    desc_.observation_dim = n;
    desc_.discrete_states = true;
    desc_.n_states = n;
    desc_.action_space = {true, 2, 0.0, 0.0};
    desc_.time_limit = 5 * n;
    desc_.max_return_estimate = kRightReward;
  }

  const EnvDescriptor& descriptor() const override { return desc_; }
  std::size_t position() const { return pos_; }
  std::size_t start() const { return n_ / 2; }

protected:
  Observation do_reset(std::uint64_t) override {
    pos_ = start();
    return observe();
  }

  StepResult do_step(const Action& action) override {
    if (action.index == right) ++pos_;
    else --pos_;
    StepResult r;
    if (pos_ == 0) {
      r.reward = kLeftReward;
      r.done = true;
    } else if (pos_ == n_ - 1) {
      r.reward = kRightReward;
      r.done = true;
    } else {
      r.reward = kStepCost;
    }
    r.next_observation = observe();
    return r;
  }

private:
  Observation observe() const { return Observation{one_hot(n_, pos_), static_cast<int>(pos_)}; }

  std::size_t n_;
  std::size_t pos_ = 0;
  EnvDescriptor desc_;
};

}  // namespace udrl::env
