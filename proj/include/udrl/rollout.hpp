#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "udrl/behavior/select.hpp"
#include "udrl/env/env.hpp"
#include "udrl/replay.hpp"
#include "udrl/rng.hpp"
#include "udrl/types.hpp"

namespace udrl {

struct RolloutMode {
  enum class Kind { explore, evaluate };
  Kind kind = Kind::explore;
  double max_return_clip = std::numeric_limits<double>::infinity();
  // Action choice when evaluating; exploration always samples.
  behavior::SelectMode eval_select = behavior::SelectMode::sample;

  static RolloutMode explore() { return {}; }
  static RolloutMode evaluate(double clip, behavior::SelectMode sel = behavior::SelectMode::sample) {
    return {Kind::evaluate, clip, sel};
  }
  bool evaluating() const { return kind == Kind::evaluate; }
};

// Counts the command down by the obtained reward and one step. Evaluation
// additionally keeps the horizon >= 1 and the desired return <= the clip.
inline Command update_command(const Command& c, double reward, const RolloutMode& mode) {
  Command next{c.desired_return - reward, c.desired_horizon - 1};
  if (mode.evaluating()) {
    next.desired_horizon = std::max(next.desired_horizon, 1L);
    next.desired_return = std::min(next.desired_return, mode.max_return_clip);
  }
  return next;
}

template <class B>
concept BehaviorFunction = requires(const B& b, const Observation& o, const Command& c) {
  { b.distribution(o, c) } -> std::convertible_to<ActionDistribution>;
};

// Runs one episode from env.reset(env_seed), querying the behavior function
// with the current command each step. `trace`, if given, receives the command
// used at every step.
template <BehaviorFunction B>
Episode generate_episode(env::Env& env, const B& behavior, Command command,
                         const RolloutMode& mode, Rng& rng, std::uint64_t env_seed,
                         std::vector<Command>* trace = nullptr) {
  const auto& desc = env.descriptor();
  const auto select = mode.evaluating() ? mode.eval_select : behavior::SelectMode::sample;
  Episode ep;
  Observation obs = env.reset(env_seed);
  bool done = false;
  while (!done && ep.length() < desc.time_limit) {
    if (trace) trace->push_back(command);
    ActionDistribution dist = behavior.distribution(obs, command);
    if (dist.categorical()) {
      const auto valid = env.valid_actions();
      if (valid.size() < dist.probs.size()) dist = behavior::restrict_to(std::move(dist), valid);
    }
    Action a = behavior::select_action(dist, select, rng, desc.action_space.low,
                                       desc.action_space.high);
    env::StepResult r = env.step(a);
    ep.append(Step{std::move(obs), std::move(a), r.reward});
    obs = std::move(r.next_observation);
    done = r.done;
    command = update_command(command, r.reward, mode);
  }
  return ep;
}

}  // namespace udrl
