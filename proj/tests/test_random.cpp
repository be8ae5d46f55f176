#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fransonlab/random.hpp"

using namespace fransonlab;

TEST_CASE("identical seeds give identical draw sequences") {
  RandomStream a(42);
  RandomStream b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.u01() == b.u01());
  }
}

TEST_CASE("derived streams are independent of parent draws") {
  RandomStream parent(7);
  const RandomStream child_before = parent.derive(3);
  for (int i = 0; i < 100; ++i) {
    (void)parent.u01();
  }
  const RandomStream child_after = parent.derive(3);
  CHECK(child_before.key() == child_after.key());
  CHECK(parent.derive(3).key() != parent.derive(4).key());
  CHECK(RandomStream(1).derive(2).derive(3).key() != RandomStream(1).derive(3).derive(2).key());
}

TEST_CASE("u01 stays in the unit interval with a sane mean") {
  RandomStream rng(5);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.u01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("exponential gaps reproduce the requested rate") {
  RandomStream rng(11);
  const double rate = 2.5e4;
  double t = 0.0;
  long long count = 0;
  while (t < 2.0) {
    t += rng.exponential(rate);
    ++count;
  }
  CHECK(static_cast<double>(count) == doctest::Approx(2.0 * rate).epsilon(0.02));
}

TEST_CASE("poisson mean and variance") {
  RandomStream rng(13);
  for (const double mean : {0.3, 4.0, 120.0}) {
    double sum = 0.0;
    double sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<double>(rng.poisson(mean));
      sum += k;
      sum2 += k * k;
    }
    const double m = sum / n;
    const double var = sum2 / n - m * m;
    CHECK(m == doctest::Approx(mean).epsilon(0.05));
    CHECK(var == doctest::Approx(mean).epsilon(0.10));
  }
}

TEST_CASE("binomial matches mean and variance across regimes") {
  RandomStream rng(17);
  struct Case {
    long long n;
    double p;
  };
  for (const Case c : {Case{40, 0.3}, Case{100000, 5e-4}, Case{2000000, 2e-5}, Case{50, 0.9}}) {
    double sum = 0.0;
    double sum2 = 0.0;
    const int reps = 4000;
    for (int i = 0; i < reps; ++i) {
      const auto k = static_cast<double>(rng.binomial(c.n, c.p));
      REQUIRE(k >= 0);
      REQUIRE(k <= static_cast<double>(c.n));
      sum += k;
      sum2 += k * k;
    }
    const double mean = static_cast<double>(c.n) * c.p;
    const double var = mean * (1.0 - c.p);
    const double m = sum / reps;
    const double v = sum2 / reps - m * m;
    CHECK(std::abs(m - mean) < 5.0 * std::sqrt(var / reps));
    CHECK(v == doctest::Approx(var).epsilon(0.15));
  }
}

TEST_CASE("uniform_below covers the range without bias") {
  RandomStream rng(19);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    ++counts[rng.uniform_below(7)];
  }
  for (const int c : counts) {
    CHECK(c == doctest::Approx(n / 7.0).epsilon(0.05));
  }
}
