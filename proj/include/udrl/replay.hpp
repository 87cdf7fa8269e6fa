#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "udrl/error.hpp"
#include "udrl/rng.hpp"
#include "udrl/types.hpp"

namespace udrl {

struct Step {
  Observation observation;
  Action action;
  double reward = 0.0;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Episode {
  std::vector<Step> steps;
  double total_return = 0.0;

  std::size_t length() const { return steps.size(); }

  void append(Step s) {
    total_return += s.reward;
    steps.push_back(std::move(s));
  }

  // suffix[t] = r_t + ... + r_{T-1}; suffix[T] = 0.
  std::vector<double> suffix_returns() const {
    std::vector<double> out(steps.size() + 1, 0.0);
    for (std::size_t t = steps.size(); t-- > 0;) out[t] = steps[t].reward + out[t + 1];
    return out;
  }

  friend bool operator==(const Episode&, const Episode&) = default;
};

// Keeps the `capacity` highest-return episodes seen so far, sorted ascending
// by return. Among equal returns the older episode is evicted first.
class ReplayBuffer {
public:
  struct Entry {
    Episode episode;
    std::uint64_t serial = 0;  // insertion order
  };

  explicit ReplayBuffer(std::size_t capacity = 1) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay_size", "must be positive");
  }

  void insert(Episode episode) {
    Entry e{std::move(episode), next_serial_++};
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), e, before);
    entries_.insert(pos, std::move(e));
    if (entries_.size() > capacity_) entries_.erase(entries_.begin());
  }

  // The min(k, size) highest-return episodes, best first.
  std::vector<const Episode*> top_k(std::size_t k) const {
    if (entries_.empty()) throw UsageError("top_k on empty replay buffer");
    if (k == 0) throw UsageError("top_k requires k >= 1");
    std::vector<const Episode*> out;
    const std::size_t n = std::min(k, entries_.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(&entries_[entries_.size() - 1 - i].episode);
    return out;
  }

  const Episode& sample_episode(Rng& rng) const {
    if (entries_.empty()) throw UsageError("sample from empty replay buffer");
    return entries_[rng.index(entries_.size())].episode;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::uint64_t next_serial() const { return next_serial_; }

  // Rebuilds a buffer from serialized entries (already in stored order).
  static ReplayBuffer restore(std::size_t capacity, std::vector<Entry> entries,
                              std::uint64_t next_serial) {
    ReplayBuffer b(capacity);
    if (entries.size() > capacity) throw FormatError("replay buffer larger than its capacity");
    if (!std::is_sorted(entries.begin(), entries.end(), before))
      throw FormatError("replay buffer entries out of order");
    b.entries_ = std::move(entries);
    b.next_serial_ = next_serial;
    return b;
  }

private:
  static bool before(const Entry& a, const Entry& b) {
    if (a.episode.total_return != b.episode.total_return)
      return a.episode.total_return < b.episode.total_return;
    return a.serial < b.serial;
  }

  std::size_t capacity_;
  std::vector<Entry> entries_;
  std::uint64_t next_serial_ = 0;
};

}  // namespace udrl
