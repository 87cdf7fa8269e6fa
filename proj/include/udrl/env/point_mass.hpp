#pragma once

#include <algorithm>
#include <cmath>

#include "udrl/env/env.hpp"

namespace udrl::env {

// 1-D point mass pushed by a bounded force toward x = 1.
// Explicit Euler: v += dt * (force - friction * v); x += dt * v.
// Reward per step is -|x - 1| measured after the update.
class PointMass1D final : public Env {
public:
  static constexpr double kDt = 0.1;
  static constexpr double kFriction = 0.05;
  static constexpr double kTarget = 1.0;
  static constexpr std::size_t kHorizon = 50;

  PointMass1D() {
    desc_.id = "pointmass1d";
    desc_.observation_dim = 2;
    desc_.discrete_states = false;
    desc_.action_space = {false, 1, -1.0, 1.0};
    desc_.time_limit = kHorizon;
    desc_.max_return_estimate = 0.0;
  }

  const EnvDescriptor& descriptor() const override { return desc_; }

protected:
  Observation do_reset(std::uint64_t) override {
    x_ = 0.0;
    v_ = 0.0;
    return observe();
  }

  StepResult do_step(const Action& action) override {
    const double force = std::clamp(action.values[0], -1.0, 1.0);
    v_ += kDt * (force - kFriction * v_);
    x_ += kDt * v_;
    StepResult r;
    r.reward = -std::abs(x_ - kTarget);
    r.next_observation = observe();
    return r;
  }

private:
  Observation observe() const { return Observation{{x_, v_}, -1}; }

  double x_ = 0.0;
  double v_ = 0.0;
  EnvDescriptor desc_;
};

}  // namespace udrl::env
