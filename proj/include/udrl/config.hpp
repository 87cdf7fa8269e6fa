#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "udrl/env/registry.hpp"
#include "udrl/error.hpp"
#include "udrl/nn/network.hpp"

namespace udrl {

// Everything a training run needs. The first ten hyperparameters are the
// algorithm's own; the rest select the environment, network and budget.
struct TrainerConfig {
  std::size_t batch_size = 256;
  nn::FastNet fast_net_option = nn::FastNet::gated;
  double horizon_scale = 0.02;
  std::size_t last_few = 10;
  double learning_rate = 1e-3;
  std::size_t n_episodes_per_iter = 10;
  std::size_t n_updates_per_iter = 100;
  std::size_t n_warm_up_episodes = 20;
  std::size_t replay_size = 100;
  double return_scale = 0.02;

  double warmup_action_std = 0.3;  // continuous action spaces only
  std::string env = "chain10";
  bool sparse_delay = false;
  std::vector<std::size_t> hidden_sizes{32, 32};
  nn::Activation activation = nn::Activation::relu;
  std::uint64_t max_env_steps = 50'000;
  std::uint64_t eval_every_steps = 2'000;
  std::size_t n_eval_episodes = 10;
  bool eval_greedy = false;
  // When false, wall_time_s is written as 0 so metrics files are reproducible.
  bool wall_clock = true;
  std::uint64_t seed = 0;

  void validate() const {
    auto positive = [](std::string_view name, auto v) {
      if (!(v > 0)) throw ConfigError(std::string(name), "must be positive");
    };
    positive("batch_size", batch_size);
    positive("horizon_scale", horizon_scale);
    positive("last_few", last_few);
    positive("learning_rate", learning_rate);
    positive("n_episodes_per_iter", n_episodes_per_iter);
    positive("n_updates_per_iter", n_updates_per_iter);
    positive("n_warm_up_episodes", n_warm_up_episodes);
    positive("replay_size", replay_size);
    positive("return_scale", return_scale);
    positive("warmup_action_std", warmup_action_std);
    positive("eval_every_steps", eval_every_steps);
    positive("n_eval_episodes", n_eval_episodes);
    if (!std::isfinite(horizon_scale)) throw ConfigError("horizon_scale", "must be finite");
    if (!std::isfinite(return_scale)) throw ConfigError("return_scale", "must be finite");
    if (!std::isfinite(learning_rate)) throw ConfigError("learning_rate", "must be finite");
    if (hidden_sizes.empty()) throw ConfigError("hidden_sizes", "need at least one layer");
    for (auto h : hidden_sizes)
      if (h == 0) throw ConfigError("hidden_sizes", "zero-sized layer");
    bool known = false;
    for (const auto& id : env::env_ids()) known = known || id == env;
    if (!known) throw ConfigError("env", "unknown environment '" + env + "'");
  }

  friend bool operator==(const TrainerConfig&, const TrainerConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Unsigned counts; a leading '-' is reported as "must be positive".
inline std::uint64_t parse_count(const std::string& key, const std::string& v) {
  if (!v.empty() && v[0] == '-') {
    long long s = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
    if (ec == std::errc() && p == v.data() + v.size())
      throw ConfigError(key, "must be positive, got " + v);
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  // strtod rather than from_chars<double>: the latter is missing in older libstdc++.
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError(key, "expected a number, got '" + v + "'");
  return d;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

inline std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

// Applies one `key = value` setting. Unknown keys are configuration errors.
inline void set_config_value(TrainerConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "batch_size") c.batch_size = parse_count(key, value);
  else if (key == "fast_net_option") c.fast_net_option = nn::fast_net_from_string(value);
  else if (key == "horizon_scale") c.horizon_scale = parse_real(key, value);
  else if (key == "last_few") c.last_few = parse_count(key, value);
  else if (key == "learning_rate") c.learning_rate = parse_real(key, value);
  else if (key == "n_episodes_per_iter") c.n_episodes_per_iter = parse_count(key, value);
  else if (key == "n_updates_per_iter") c.n_updates_per_iter = parse_count(key, value);
  else if (key == "n_warm_up_episodes") c.n_warm_up_episodes = parse_count(key, value);
  else if (key == "replay_size") c.replay_size = parse_count(key, value);
  else if (key == "return_scale") c.return_scale = parse_real(key, value);
  else if (key == "warmup_action_std") c.warmup_action_std = parse_real(key, value);
  else if (key == "env") c.env = value;
  else if (key == "sparse_delay") c.sparse_delay = parse_bool(key, value);
  else if (key == "hidden_sizes") {
    c.hidden_sizes.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) c.hidden_sizes.push_back(parse_count(key, trim(item)));
  } else if (key == "activation") c.activation = nn::activation_from_string(value);
  else if (key == "max_env_steps") c.max_env_steps = parse_count(key, value);
  else if (key == "eval_every_steps") c.eval_every_steps = parse_count(key, value);
  else if (key == "n_eval_episodes") c.n_eval_episodes = parse_count(key, value);
  else if (key == "eval_greedy") c.eval_greedy = parse_bool(key, value);
  else if (key == "wall_clock") c.wall_clock = parse_bool(key, value);
  else if (key == "seed") c.seed = parse_count(key, value);
  else throw ConfigError(key, "unknown configuration key");
}

// Parses flat `key = value` text. '#' starts a comment.
inline TrainerConfig parse_config(std::string_view text, TrainerConfig base = {}) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(base, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
  }
  return base;
}

inline TrainerConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

// Canonical text form; parse_config(format_config(c)) == c.
inline std::string format_config(const TrainerConfig& c) {
  using detail::format_real;
  std::ostringstream os;
  os << "batch_size = " << c.batch_size << '\n'
     << "fast_net_option = " << nn::to_string(c.fast_net_option) << '\n'
     << "horizon_scale = " << format_real(c.horizon_scale) << '\n'
     << "last_few = " << c.last_few << '\n'
     << "learning_rate = " << format_real(c.learning_rate) << '\n'
     << "n_episodes_per_iter = " << c.n_episodes_per_iter << '\n'
     << "n_updates_per_iter = " << c.n_updates_per_iter << '\n'
     << "n_warm_up_episodes = " << c.n_warm_up_episodes << '\n'
     << "replay_size = " << c.replay_size << '\n'
     << "return_scale = " << format_real(c.return_scale) << '\n'
     << "warmup_action_std = " << format_real(c.warmup_action_std) << '\n'
     << "env = " << c.env << '\n'
     << "sparse_delay = " << (c.sparse_delay ? "true" : "false") << '\n'
     << "hidden_sizes = ";
  for (std::size_t i = 0; i < c.hidden_sizes.size(); ++i) os << (i ? "," : "") << c.hidden_sizes[i];
  os << '\n'
     << "activation = " << nn::to_string(c.activation) << '\n'
     << "max_env_steps = " << c.max_env_steps << '\n'
     << "eval_every_steps = " << c.eval_every_steps << '\n'
     << "n_eval_episodes = " << c.n_eval_episodes << '\n'
     << "eval_greedy = " << (c.eval_greedy ? "true" : "false") << '\n'
     << "wall_clock = " << (c.wall_clock ? "true" : "false") << '\n'
     << "seed = " << c.seed << '\n';
  return os.str();
}

}  // namespace udrl
