#include "fransonlab/random.hpp"

#include <cmath>
#include <stdexcept>

namespace fransonlab {

namespace {

std::uint64_t mix(std::uint64_t key, std::uint64_t index) {
  std::uint64_t x = key + 0x9E3779B97F4A7C15ull * (index + 1ull);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : key_(seed), engine_(mix(seed, 0)) {}

RandomStream RandomStream::derive(std::uint64_t index) const {
  return RandomStream(mix(key_, index + 1));
}

double RandomStream::u01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double rate_hz) {
  if (!(rate_hz > 0.0)) {
    throw std::domain_error("exponential rate must be positive");
  }
  return -std::log(1.0 - u01()) / rate_hz;
}

std::uint64_t RandomStream::uniform_below(std::uint64_t n) {
  if (n == 0) {
    throw std::domain_error("uniform_below(0)");
  }
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

long long RandomStream::poisson(double mean) {
  if (!(mean > 0.0)) {
    return 0;
  }
  if (mean > 30.0) {
    // Poisson additivity keeps this exact for any mean.
    const double half = 0.5 * mean;
    return poisson(half) + poisson(mean - half);
  }
  const double limit = std::exp(-mean);
  long long k = 0;
  double product = u01();
  while (product > limit) {
    ++k;
    product *= u01();
  }
  return k;
}

long long RandomStream::binomial(long long n, double p) {
  if (n <= 0 || !(p > 0.0)) {
    return 0;
  }
  if (p >= 1.0) {
    return n;
  }
  if (p > 0.5) {
    return n - binomial(n, 1.0 - p);
  }
  // Sum of independent binomial chunks with the same p is binomial; keeping
  // chunk * p modest makes the CDF walk numerically safe.
  long long total = 0;
  long long remaining = n;
  const long long chunk_max = std::max<long long>(1, static_cast<long long>(25.0 / p));
  while (remaining > 0) {
    const long long m = std::min(remaining, chunk_max);
    const double u = u01();
    const double ratio = p / (1.0 - p);
    double pmf = std::exp(static_cast<double>(m) * std::log1p(-p));
    double cdf = pmf;
    long long k = 0;
    while (u > cdf && k < m) {
      pmf *= ratio * static_cast<double>(m - k) / static_cast<double>(k + 1);
      cdf += pmf;
      ++k;
    }
    total += k;
    remaining -= m;
  }
  return total;
}

}  // namespace fransonlab
