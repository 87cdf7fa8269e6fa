#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "udrl/error.hpp"
#include "udrl/replay.hpp"
#include "udrl/types.hpp"

namespace udrl::behavior {

inline constexpr double kReturnMatchTolerance = 1e-9;

// Exact behavior function of a trajectory dataset over discrete states and
// actions: P(a | s, d^r, d^h) = N^a(s, d^r, d^h) / N(s, d^r, d^h), where N
// counts segments starting in s with length d^h and reward sum d^r, and N^a
// those whose first action is a.
class TabularBF {
public:
  struct Bucket {
    double desired_return = 0.0;
    std::vector<std::size_t> action_counts;
    std::size_t total = 0;
  };

  static TabularBF build(std::span<const Episode> dataset, std::size_t n_actions) {
    if (n_actions == 0) throw ConfigError("n_actions", "must be positive");
    TabularBF tbf;
    tbf.n_actions_ = n_actions;
    for (const auto& ep : dataset) {
      const std::size_t T = ep.length();
      for (const auto& s : ep.steps) {
        if (s.observation.state < 0)
          throw UnsupportedError("tabular behavior function needs discrete-state episodes");
        if (s.action.index < 0 || static_cast<std::size_t>(s.action.index) >= n_actions)
          throw UnsupportedError("tabular behavior function needs discrete actions");
      }
      for (std::size_t t1 = 0; t1 < T; ++t1) {
        const int state = ep.steps[t1].observation.state;
        const auto action = static_cast<std::size_t>(ep.steps[t1].action.index);
        double ret = 0.0;
        for (std::size_t t2 = t1 + 1; t2 <= T; ++t2) {
          ret += ep.steps[t2 - 1].reward;
          Bucket& b = tbf.bucket(state, static_cast<long>(t2 - t1), ret);
          b.action_counts[action] += 1;
          b.total += 1;
        }
      }
    }
    return tbf;
  }

  // nullopt when no segment matches (s, d^r, d^h).
  std::optional<ActionDistribution> query(int state, double desired_return,
                                          long desired_horizon) const {
    const Bucket* b = find(state, desired_horizon, desired_return);
    if (b == nullptr || b->total == 0) return std::nullopt;
    ActionDistribution d;
    d.probs.resize(n_actions_);
    for (std::size_t a = 0; a < n_actions_; ++a)
      d.probs[a] = static_cast<double>(b->action_counts[a]) / static_cast<double>(b->total);
    return d;
  }

  std::size_t n_actions() const { return n_actions_; }

  // Number of distinct (s, d^r, d^h) keys with at least one segment.
  std::size_t key_count() const {
    std::size_t n = 0;
    for (const auto& [k, v] : table_) n += v.size();
    return n;
  }

  template <class Fn>
  void for_each_key(Fn&& fn) const {
    for (const auto& [k, buckets] : table_)
      for (const auto& b : buckets) fn(k.first, b.desired_return, k.second);
  }

private:
  Bucket& bucket(int state, long horizon, double ret) {
    auto& list = table_[{state, horizon}];
    for (auto& b : list)
      if (std::abs(b.desired_return - ret) <= kReturnMatchTolerance) return b;
    list.push_back(Bucket{ret, std::vector<std::size_t>(n_actions_, 0), 0});
    return list.back();
  }

  const Bucket* find(int state, long horizon, double ret) const {
    auto it = table_.find({state, horizon});
    if (it == table_.end()) return nullptr;
    for (const auto& b : it->second)
      if (std::abs(b.desired_return - ret) <= kReturnMatchTolerance) return &b;
    return nullptr;
  }

  std::size_t n_actions_ = 0;
  std::map<std::pair<int, long>, std::vector<Bucket>> table_;
};

// Adapts TabularBF to the rollout behavior interface. Unobserved commands are
// an error unless a uniform fallback is requested.
class TabularBehavior {
public:
  explicit TabularBehavior(const TabularBF& tbf, bool uniform_fallback = false)
      : tbf_(&tbf), uniform_fallback_(uniform_fallback) {}

  ActionDistribution distribution(const Observation& obs, const Command& cmd) const {
    if (auto d = tbf_->query(obs.state, cmd.desired_return, cmd.desired_horizon)) return *d;
    if (!uniform_fallback_)
      throw UsageError("tabular behavior function has no segment for this command");
    ActionDistribution d;
    d.probs.assign(tbf_->n_actions(), 1.0 / static_cast<double>(tbf_->n_actions()));
    return d;
  }

private:
  const TabularBF* tbf_;
  bool uniform_fallback_;
};

}  // namespace udrl::behavior
