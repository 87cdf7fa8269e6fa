#pragma once

#include <cstddef>
#include <vector>

namespace udrl {

// What the agent sees. `state` is the discrete state id, or -1 for
// continuous-state environments; `features` is always populated (one-hot for
// discrete states).
struct Observation {
  std::vector<double> features;
  int state = -1;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Discrete actions use `index`; continuous actions use `values`.
struct Action {
  int index = -1;
  std::vector<double> values;

  static Action discrete(int i) { return Action{i, {}}; }
  static Action continuous(std::vector<double> v) { return Action{-1, std::move(v)}; }

  friend bool operator==(const Action&, const Action&) = default;
};

// "Achieve `desired_return` in the next `desired_horizon` steps."
// The horizon is signed: exploration rollouts may count it down past zero.
struct Command {
  double desired_return = 0.0;
  long desired_horizon = 1;

  friend bool operator==(const Command&, const Command&) = default;
};

// Fixed multipliers applied to command components before they reach a network.
struct CommandScales {
  double return_scale = 0.02;
  double horizon_scale = 0.02;

  friend bool operator==(const CommandScales&, const CommandScales&) = default;
};

struct ActionDistribution {
  std::vector<double> probs;    // categorical
  std::vector<double> mean;     // gaussian
  std::vector<double> log_std;  // gaussian

  bool categorical() const { return !probs.empty(); }

  friend bool operator==(const ActionDistribution&, const ActionDistribution&) = default;
};

}  // namespace udrl
