#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "udrl/error.hpp"

namespace udrl {

// A seedable random stream whose complete state is the engine state.
//
// Distributions are constructed per draw so no hidden cached values survive
// between calls; that makes `state()`/`restore()` an exact snapshot.
class Rng {
public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  // Closed interval; degenerate when lo == hi.
  double uniform(double lo, double hi) {
    if (!(hi > lo)) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // Uniform over {0, ..., n-1}.
  std::size_t index(std::size_t n) {
    if (n == 0) throw UsageError("Rng::index: empty range");
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  std::uint64_t next_u64() { return engine_(); }

  Engine& engine() { return engine_; }

  std::string state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void restore(const std::string& s) {
    std::istringstream is(s);
    Engine e;
    is >> e;
    if (is.fail()) throw FormatError("corrupt random engine state");
    engine_ = e;
  }

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

private:
  Engine engine_;
};

// Derives an independent stream seed from a base seed and a stream label.
// splitmix64 finalizer over (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace udrl
