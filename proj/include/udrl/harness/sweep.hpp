#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "udrl/harness/metrics.hpp"
#include "udrl/harness/stats.hpp"
#include "udrl/trainer.hpp"

namespace udrl::harness {

// Initial desired horizon for sweep commands: a fixed value, or the H of the
// agent's final exploratory distribution.
struct HorizonRule {
  bool from_training = false;
  long fixed = 1;

  static HorizonRule parse(const std::string& s) {
    if (s == "from-training") return {true, 1};
    const std::string prefix = "fixed:";
    if (s.rfind(prefix, 0) == 0) {
      try {
        std::size_t used = 0;
        const long h = std::stol(s.substr(prefix.size()), &used);
        if (used == s.size() - prefix.size() && h >= 1) return {false, h};
      } catch (const std::exception&) {
      }
    }
    throw UsageError("horizon rule must be 'fixed:<positive int>' or 'from-training', got '" + s + "'");
  }

  long horizon_for(const AgentState& a) const {
    return from_training ? a.eval_command().desired_horizon : fixed;
  }
};

struct SweepRow {
  double desired = 0.0;
  double obtained_mean = 0.0;
  double obtained_std = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double correlation = 0.0;  // Pearson, NaN if undefined
};

inline SweepResult run_sweep(const AgentState& agent, const std::vector<double>& desired_returns,
                             const HorizonRule& rule, std::size_t n_episodes, std::uint64_t seed) {
  if (desired_returns.empty()) throw UsageError("sweep needs at least one desired return");
  if (n_episodes == 0) throw UsageError("sweep needs at least one episode per desired return");
  auto e = make_env_for(agent.config);
  Rng rng(seed);
  const long horizon = rule.horizon_for(agent);
  SweepResult out;
  std::vector<double> desired, obtained;
  for (double d : desired_returns) {
    const auto rets = evaluate_returns(agent, *e, Command{d, horizon}, n_episodes, rng);
    const ReturnStats st = mean_std(rets);
    out.rows.push_back({d, st.mean, st.std});
    desired.push_back(d);
    obtained.push_back(st.mean);
  }
  out.correlation = pearson(desired, obtained);
  return out;
}

inline std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "desired,obtained_mean,obtained_std\n";
  for (const auto& row : r.rows)
    os << format_number(row.desired) << ',' << format_number(row.obtained_mean) << ','
       << format_number(row.obtained_std) << '\n';
  return os.str();
}

}  // namespace udrl::harness
