#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "udrl/error.hpp"
#include "udrl/types.hpp"

namespace udrl::env {

struct ActionSpace {
  bool discrete = true;
  std::size_t size = 0;  // number of actions, or action dimension
  double low = -1.0;
  double high = 1.0;
};

struct EnvDescriptor {
  std::string id;
  std::size_t observation_dim = 0;
  bool discrete_states = false;
  std::size_t n_states = 0;  // discrete_states only
  ActionSpace action_space;
  std::size_t time_limit = 0;
  double max_return_estimate = 0.0;  // upper bound on any episode return
};

struct StepResult {
  Observation next_observation;
  double reward = 0.0;
  bool done = false;
};

// Episodic environment. Subclasses implement do_reset/do_step; the base
// enforces the done/reset protocol and terminates at the time limit.
class Env {
public:
  virtual ~Env() = default;

  virtual const EnvDescriptor& descriptor() const = 0;

  Observation reset(std::uint64_t seed) {
    t_ = 0;
    done_ = false;
    return do_reset(seed);
  }

  StepResult step(const Action& action) {
    if (done_) throw UsageError(descriptor().id + ": step called after episode end; reset first");
    check_action(action);
    StepResult r = do_step(action);
    ++t_;
    if (t_ >= descriptor().time_limit) r.done = true;
    done_ = r.done;
    return r;
  }

  bool done() const { return done_; }
  std::size_t elapsed() const { return t_; }

  // Actions legal in the current state.
  virtual std::vector<int> valid_actions() const {
    std::vector<int> a(descriptor().action_space.discrete ? descriptor().action_space.size : 0);
    std::iota(a.begin(), a.end(), 0);
    return a;
  }

protected:
  virtual Observation do_reset(std::uint64_t seed) = 0;
  virtual StepResult do_step(const Action& action) = 0;

  void check_action(const Action& action) const {
    const auto& space = descriptor().action_space;
    if (space.discrete) {
      if (action.index < 0 || static_cast<std::size_t>(action.index) >= space.size)
        throw UsageError(descriptor().id + ": action index out of range");
    } else if (action.values.size() != space.size) {
      throw UsageError(descriptor().id + ": action dimension mismatch");
    }
  }

private:
  std::size_t t_ = 0;
  bool done_ = true;
};

inline std::vector<double> one_hot(std::size_t n, std::size_t k) {
  std::vector<double> v(n, 0.0);
  v[k] = 1.0;
  return v;
}

}  // namespace udrl::env
