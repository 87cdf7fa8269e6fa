#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "udrl/error.hpp"
#include "udrl/nn/network.hpp"

namespace udrl::nn {

// Adam with bias correction. Only the learning rate is meant to be tuned.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;

  static AdamState for_parameters(std::span<const Parameter> params, double lr) {
    AdamState s;
    s.learning_rate = lr;
    for (const auto& p : params) {
      s.first_moment.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      s.second_moment.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
    return s;
  }
};

inline void adam_step(std::span<Parameter> params, AdamState& state) {
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size())
    throw ShapeError("adam state does not match parameter list");
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    if (m.rows() != p.value.rows() || m.cols() != p.value.cols() ||
        p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols())
      throw ShapeError("adam: shape mismatch for " + p.name);
    m = state.beta1 * m + (1.0 - state.beta1) * p.grad;
    v = state.beta2 * v + (1.0 - state.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= state.learning_rate * (m.array() / correction1) /
                       ((v.array() / correction2).sqrt() + state.epsilon);
  }
}

}  // namespace udrl::nn
