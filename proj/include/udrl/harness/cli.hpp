#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udrl/harness/checkpoint.hpp"
#include "udrl/harness/metrics.hpp"
#include "udrl/harness/stats.hpp"
#include "udrl/harness/sweep.hpp"
#include "udrl/trainer.hpp"

namespace udrl::harness {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigInvalid = 2, kBadFile = 3, kUsage = 4 };

inline std::filesystem::path output_dir() {
  const char* env = std::getenv("UDRL_OUT");
  return (env && *env) ? std::filesystem::path(env) : std::filesystem::path("out");
}

// Turns trailing `--key value` pairs into config overrides.
inline void apply_overrides(TrainerConfig& cfg, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& flag = extras[i];
    if (flag.rfind("--", 0) != 0 || flag.size() <= 2)
      throw UsageError("expected --key value override, got '" + flag + "'");
    std::string key = flag.substr(2);
    std::string value;
    if (auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.erase(eq);
    } else {
      if (i + 1 >= extras.size()) throw UsageError("missing value for --" + key);
      value = extras[++i];
    }
    set_config_value(cfg, key, value);
  }
}

inline int cli_train(const std::string& config_path, const std::vector<std::string>& overrides,
                     std::ostream& out, std::ostream& err) {
  TrainerConfig cfg;
  try {
    cfg = load_config(config_path);
    apply_overrides(cfg, overrides);
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const FormatError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kUsage;
  }

  const auto dir = output_dir();
  std::filesystem::create_directories(dir);
  auto [log, agent] = run(cfg);
  write_text_file((dir / "metrics.csv").string(), metrics_csv(log.rows));
  save_checkpoint(agent, (dir / "final.ckpt").string());
  out << "warmup_mean_return: " << format_number(log.warmup_mean_return) << '\n';
  if (!log.rows.empty())
    out << "final_eval_mean_return: " << format_number(log.rows.back().eval_mean_return) << '\n';
  out << "env_steps: " << agent.env_steps << '\n'
      << "wrote " << (dir / "metrics.csv").string() << " and " << (dir / "final.ckpt").string()
      << '\n';
  return kOk;
}

inline std::string format_summary(const Summary& s, std::size_t n) {
  std::ostringstream os;
  os << "episodes: " << n << '\n'
     << "mean: " << format_number(s.mean) << '\n'
     << "std: " << format_number(s.std) << '\n'
     << "ci95: [" << format_number(s.ci_low) << ", " << format_number(s.ci_high) << "]\n";
  return os.str();
}

// Evaluation returns for a checkpointed agent from its derived evaluation command.
inline std::vector<double> checkpoint_eval_returns(const AgentState& agent, std::size_t n_episodes,
                                                   std::uint64_t seed) {
  auto e = make_env_for(agent.config);
  Rng rng(derive_seed(seed, 0));
  return evaluate_returns(agent, *e, agent.eval_command(), n_episodes, rng);
}

inline int cli_eval(const std::string& ckpt, std::size_t n_episodes, std::uint64_t seed,
                    std::ostream& out, std::ostream& err) {
  if (n_episodes == 0) {
    err << "--episodes must be positive\n";
    return kUsage;
  }
  try {
    const AgentState agent = load_checkpoint(ckpt);
    const auto rets = checkpoint_eval_returns(agent, n_episodes, seed);
    out << format_summary(summarize(rets, derive_seed(seed, 1)), n_episodes);
    return kOk;
  } catch (const FormatError& e) {
    err << "bad checkpoint: " << e.what() << '\n';
    return kBadFile;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kUsage;
  }
}

inline std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size()) throw UsageError("not a number in --returns: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

inline int cli_sweep(const std::string& ckpt, const std::string& returns, const std::string& horizon,
                     std::size_t n_episodes, std::uint64_t seed, std::ostream& out,
                     std::ostream& err) {
  try {
    const auto desired = parse_real_list(returns);
    if (desired.empty()) throw UsageError("--returns needs at least one value");
    const HorizonRule rule = HorizonRule::parse(horizon);
    const AgentState agent = load_checkpoint(ckpt);
    const SweepResult r = run_sweep(agent, desired, rule, n_episodes, seed);
    const std::string table = sweep_csv(r);
    out << table << "pearson: " << format_number(r.correlation) << '\n';
    const auto dir = output_dir();
    std::filesystem::create_directories(dir);
    write_text_file((dir / "sweep.csv").string(), table);
    return kOk;
  } catch (const FormatError& e) {
    err << "bad checkpoint: " << e.what() << '\n';
    return kBadFile;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kUsage;
  }
}

// udrl train|eval|sweep ...
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"udrl: command-conditioned agents trained by supervised learning"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "train an agent; extra --key value pairs override the config");
  std::string config_path;
  train->add_option("--config", config_path, "key = value config file")->required();
  train->allow_extras();

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string ckpt;
  std::size_t episodes = 100;
  std::uint64_t seed = 0;
  eval->add_option("--ckpt", ckpt)->required();
  eval->add_option("--episodes", episodes);
  eval->add_option("--seed", seed);

  auto* sweep = app.add_subcommand("sweep", "desired vs obtained return sweep");
  std::string returns, horizon = "from-training";
  sweep->add_option("--ckpt", ckpt)->required();
  sweep->add_option("--returns", returns, "comma separated desired returns")->required();
  sweep->add_option("--horizon", horizon, "fixed:<int> or from-training");
  sweep->add_option("--episodes", episodes);
  sweep->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cli_train(config_path, train->remaining(), out, err);
    if (*eval) return cli_eval(ckpt, episodes, seed, out, err);
    return cli_sweep(ckpt, returns, horizon, episodes, seed, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace udrl::harness
