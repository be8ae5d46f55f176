#pragma once

#include <cstdint>
#include <random>

namespace fransonlab {

// Deterministic random stream with a documented splitting scheme.
//
// All randomness in a run flows from a single 64-bit seed. Substreams are
// derived by index, never by drawing: derive(i) hashes (key, i) with a
// splitmix64-style finalizer into a child key that seeds an independent
// mt19937_64. The runner derives streams as
//   run seed -> derive(phase index) -> derive(shard index) -> derive(channel)
// so shard and channel streams never overlap and results do not depend on
// thread scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  RandomStream derive(std::uint64_t index) const;
  std::uint64_t key() const { return key_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double u01();
  bool bernoulli(double p) { return u01() < p; }
  /// Exponential waiting time for a Poisson process of the given rate (per second).
  double exponential(double rate_hz);
  /// Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);
  /// Poisson-distributed count (exact; splits large means recursively).
  long long poisson(double mean);
  /// Binomial-distributed count (exact; chunked CDF inversion, cost O(n*p)).
  long long binomial(long long n, double p);

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace fransonlab
