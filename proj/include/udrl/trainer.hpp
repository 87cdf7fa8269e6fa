#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "udrl/behavior/neural.hpp"
#include "udrl/commands.hpp"
#include "udrl/config.hpp"
#include "udrl/env/registry.hpp"
#include "udrl/nn/adam.hpp"
#include "udrl/nn/network.hpp"
#include "udrl/replay.hpp"
#include "udrl/rng.hpp"
#include "udrl/rollout.hpp"

namespace udrl {

// One hindsight-labelled (input, target) pair.
struct TrainingSample {
  Observation observation;
  Command command;
  Action target;
};

// Trailing segment starting at t1 ~ U{0..T-1}: d^h = T - t1 and d^r is the
// sum of rewards from t1 to the end of the episode.
inline TrainingSample sample_trailing_segment(const Episode& ep, Rng& rng) {
  const std::size_t T = ep.length();
  if (T == 0) throw UsageError("cannot sample a segment from an empty episode");
  const std::size_t t1 = rng.index(T);
  double ret = 0.0;
  for (std::size_t t = t1; t < T; ++t) ret += ep.steps[t].reward;
  return TrainingSample{ep.steps[t1].observation, Command{ret, static_cast<long>(T - t1)},
                        ep.steps[t1].action};
}

inline nn::NetworkSpec network_spec_for(const env::EnvDescriptor& desc, const TrainerConfig& cfg) {
  nn::NetworkSpec s;
  s.observation_dim = desc.observation_dim;
  s.command_dim = 2;
  s.hidden_sizes = cfg.hidden_sizes;
  s.fast_net = cfg.fast_net_option;
  s.head = desc.action_space.discrete ? nn::HeadKind::categorical : nn::HeadKind::gaussian;
  s.head_size = desc.action_space.size;
  s.activation = cfg.activation;
  return s;
}

// Draws batch_size samples as (uniform episode, then uniform trailing segment).
// Same draw order and arithmetic as sample_trailing_segment, without copies.
inline nn::Batch make_batch(const ReplayBuffer& buffer, const nn::NetworkSpec& spec,
                            std::size_t batch_size, const CommandScales& scales, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(batch_size);
  nn::Batch b;
  b.observations.resize(static_cast<Eigen::Index>(spec.observation_dim), n);
  b.commands.resize(2, n);
  if (spec.head == nn::HeadKind::categorical) b.target_classes.resize(batch_size);
  else b.target_actions.resize(static_cast<Eigen::Index>(spec.head_size), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Episode& ep = buffer.sample_episode(rng);
    const std::size_t T = ep.length();
    if (T == 0) throw UsageError("cannot sample a segment from an empty episode");
    const std::size_t t1 = rng.index(T);
    double ret = 0.0;
    for (std::size_t t = t1; t < T; ++t) ret += ep.steps[t].reward;
    const Step& st = ep.steps[t1];
    const auto& f = st.observation.features;
    for (Eigen::Index k = 0; k < b.observations.rows(); ++k)
      b.observations(k, i) = f[static_cast<std::size_t>(k)];
    b.commands(0, i) = ret * scales.return_scale;
    b.commands(1, i) = static_cast<double>(T - t1) * scales.horizon_scale;
    if (spec.head == nn::HeadKind::categorical) {
      b.target_classes[static_cast<std::size_t>(i)] = st.action.index;
    } else {
      for (Eigen::Index k = 0; k < b.target_actions.rows(); ++k)
        b.target_actions(k, i) = st.action.values[static_cast<std::size_t>(k)];
    }
  }
  return b;
}

// n_updates_per_iter Adam steps on fresh minibatches. Returns the mean loss,
// or NaN when no update ran.
inline double train_iteration(nn::Network& net, nn::AdamState& adam, const ReplayBuffer& buffer,
                              const TrainerConfig& cfg, const CommandScales& scales, Rng& rng) {
  if (buffer.empty()) throw UsageError("train_iteration on empty replay buffer");
  if (cfg.n_updates_per_iter == 0) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (std::size_t u = 0; u < cfg.n_updates_per_iter; ++u) {
    const nn::Batch batch = make_batch(buffer, net.spec(), cfg.batch_size, scales, rng);
    const nn::ForwardPass fp = net.forward(batch.observations, batch.commands);
    total += net.loss(fp, batch);
    net.backward(fp, batch);
    nn::adam_step(net.parameters(), adam);
  }
  return total / static_cast<double>(cfg.n_updates_per_iter);
}

inline Action random_action(const env::Env& e, double gaussian_std, Rng& rng) {
  const auto& space = e.descriptor().action_space;
  if (space.discrete) {
    const auto valid = e.valid_actions();
    return Action::discrete(valid[rng.index(valid.size())]);
  }
  std::vector<double> a(space.size);
  for (auto& v : a) v = std::clamp(rng.normal(0.0, gaussian_std), space.low, space.high);
  return Action::continuous(std::move(a));
}

inline Episode random_episode(env::Env& e, double gaussian_std, Rng& rng, std::uint64_t env_seed) {
  Episode ep;
  Observation obs = e.reset(env_seed);
  bool done = false;
  while (!done && ep.length() < e.descriptor().time_limit) {
    Action a = random_action(e, gaussian_std, rng);
    env::StepResult r = e.step(a);
    ep.append(Step{std::move(obs), std::move(a), r.reward});
    obs = std::move(r.next_observation);
    done = r.done;
  }
  return ep;
}

// Uniform (discrete) or clipped zero-mean Gaussian (continuous) random episodes.
inline std::vector<Episode> warmup(env::Env& e, const TrainerConfig& cfg, Rng& rng) {
  std::vector<Episode> out;
  out.reserve(cfg.n_warm_up_episodes);
  for (std::size_t i = 0; i < cfg.n_warm_up_episodes; ++i)
    out.push_back(random_episode(e, cfg.warmup_action_std, rng, rng.next_u64()));
  return out;
}

struct MetricsRow {
  std::uint64_t env_steps = 0;
  double eval_mean_return = 0.0;
  double eval_std_return = 0.0;
  double train_loss = 0.0;
  double wall_time_s = 0.0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct TrainingLog {
  std::uint64_t warmup_env_steps = 0;
  double warmup_mean_return = 0.0;
  std::vector<MetricsRow> rows;
};

// Full resumable agent: what a checkpoint stores.
struct AgentState {
  std::string env_id;
  TrainerConfig config;
  nn::Network network;
  nn::AdamState adam;
  ReplayBuffer buffer{1};
  CommandScales scales;
  Rng train_rng;
  Rng explore_rng;
  Rng eval_rng;
  std::uint64_t env_steps = 0;
  std::optional<ExploratoryDistribution> last_exploratory;

  // Initial evaluation command derived from the most recent exploratory distribution.
  Command eval_command() const {
    if (!last_exploratory) throw UsageError("agent has no exploratory distribution yet");
    return derive_eval_command(*last_exploratory);
  }

  RolloutMode eval_mode(const env::EnvDescriptor& d) const {
    return RolloutMode::evaluate(d.max_return_estimate, config.eval_greedy
                                                            ? behavior::SelectMode::greedy
                                                            : behavior::SelectMode::sample);
  }
};

inline std::unique_ptr<env::Env> make_env_for(const TrainerConfig& cfg) {
  return env::make_env(cfg.env, cfg.sparse_delay);
}

struct ReturnStats {
  double mean = 0.0;
  double std = 0.0;
};

inline ReturnStats mean_std(const std::vector<double>& xs) {
  ReturnStats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(xs.size()));
  return s;
}

// Evaluation rollouts from a given initial command. Environment seeds and
// action sampling come from `rng`, independent of the training streams.
inline std::vector<double> evaluate_returns(const AgentState& agent, env::Env& e,
                                            const Command& command, std::size_t n_episodes,
                                            Rng& rng) {
  const behavior::NeuralBehavior bf(agent.network, agent.scales);
  const RolloutMode mode = agent.eval_mode(e.descriptor());
  std::vector<double> out;
  out.reserve(n_episodes);
  for (std::size_t i = 0; i < n_episodes; ++i)
    out.push_back(generate_episode(e, bf, command, mode, rng, rng.next_u64()).total_return);
  return out;
}

inline AgentState initial_agent(const TrainerConfig& cfg) {
  cfg.validate();
  AgentState a;
  a.env_id = cfg.env;
  a.config = cfg;
  const auto e = make_env_for(cfg);
  a.network = nn::Network::init(network_spec_for(e->descriptor(), cfg), derive_seed(cfg.seed, 0));
  a.adam = nn::AdamState::for_parameters(a.network.parameters(), cfg.learning_rate);
  a.buffer = ReplayBuffer(cfg.replay_size);
  a.scales = CommandScales{cfg.return_scale, cfg.horizon_scale};
  a.train_rng = Rng(derive_seed(cfg.seed, 1));
  a.explore_rng = Rng(derive_seed(cfg.seed, 2));
  a.eval_rng = Rng(derive_seed(cfg.seed, 3));
  return a;
}

// Warm-up, then alternate training, exploration and periodic evaluation
// until max_env_steps environment steps (warm-up + exploration) are used.
// Evaluation steps are not counted. A final evaluation always closes the run.
class Trainer {
public:
  explicit Trainer(const TrainerConfig& cfg)
      : agent_(initial_agent(cfg)), env_(make_env_for(cfg)), eval_env_(make_env_for(cfg)) {}

  TrainingLog run() {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      if (!agent_.config.wall_clock) return 0.0;
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    const TrainerConfig& cfg = agent_.config;
    TrainingLog log;

    double warm_sum = 0.0;
    for (Episode& ep : warmup(*env_, cfg, agent_.explore_rng)) {
      agent_.env_steps += ep.length();
      warm_sum += ep.total_return;
      agent_.buffer.insert(std::move(ep));
    }
    log.warmup_env_steps = agent_.env_steps;
    log.warmup_mean_return = warm_sum / static_cast<double>(cfg.n_warm_up_episodes);

    std::uint64_t next_eval = cfg.eval_every_steps;
    while (next_eval <= agent_.env_steps) next_eval += cfg.eval_every_steps;

    while (agent_.env_steps < cfg.max_env_steps) {
      const double loss = train_iteration(agent_.network, agent_.adam, agent_.buffer, cfg,
                                          agent_.scales, agent_.train_rng);
      agent_.last_exploratory = fit_exploratory(agent_.buffer, cfg.last_few);
      explore_once();
      const bool finished = agent_.env_steps >= cfg.max_env_steps;
      if (agent_.env_steps >= next_eval || finished) {
        const ReturnStats st = mean_std(evaluate_returns(
            agent_, *eval_env_, agent_.eval_command(), cfg.n_eval_episodes, agent_.eval_rng));
        log.rows.push_back(MetricsRow{agent_.env_steps, st.mean, st.std, loss, elapsed()});
        while (next_eval <= agent_.env_steps) next_eval += cfg.eval_every_steps;
      }
    }
    return log;
  }

  const AgentState& agent() const { return agent_; }
  AgentState& agent() { return agent_; }

private:
  void explore_once() {
    const TrainerConfig& cfg = agent_.config;
    const behavior::NeuralBehavior bf(agent_.network, agent_.scales);
    for (std::size_t i = 0; i < cfg.n_episodes_per_iter && agent_.env_steps < cfg.max_env_steps; ++i) {
      const Command c = sample_exploratory_command(*agent_.last_exploratory, agent_.explore_rng);
      Episode ep = generate_episode(*env_, bf, c, RolloutMode::explore(), agent_.explore_rng,
                                    agent_.explore_rng.next_u64());
      agent_.env_steps += ep.length();
      agent_.buffer.insert(std::move(ep));
    }
  }

  AgentState agent_;
  std::unique_ptr<env::Env> env_;
  std::unique_ptr<env::Env> eval_env_;
};

inline std::pair<TrainingLog, AgentState> run(const TrainerConfig& cfg) {
  Trainer t(cfg);
  TrainingLog log = t.run();
  return {std::move(log), std::move(t.agent())};
}

}  // namespace udrl
