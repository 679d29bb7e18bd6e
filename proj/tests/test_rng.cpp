#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "hetnetcov/rng.hpp"
#include "hetnetcov/stats.hpp"

using hetnetcov::Rng;
using hetnetcov::RunningStat;

TEST_CASE("identical seeds give identical streams") {
  Rng a(42, 3, 7);
  Rng b(42, 3, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams are distinct") {
  Rng a(42, 0, 0);
  Rng b(42, 0, 1);
  Rng c(42, 1, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next_u64();
    if (x == b.next_u64()) ++same_ab;
    if (x == c.next_u64()) ++same_ac;
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("uniform stays inside the open interval") {
  Rng rng(7);
  RunningStat s;
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    s.add(u);
  }
  // Fixed seed, so these are deterministic; bounds are ~4 sigma wide.
  CHECK(std::fabs(s.mean() - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 200000.0));
  CHECK(s.variance() == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("normal moments") {
  Rng rng(11);
  RunningStat s;
  double sum3 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s.add(z);
    sum3 += z * z * z;
  }
  CHECK(std::fabs(s.mean()) < 4.0 / std::sqrt(double(n)));
  CHECK(s.variance() == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::fabs(sum3 / n) < 4.0 * std::sqrt(15.0 / n));
}

TEST_CASE("exponential has unit mean") {
  Rng rng(13);
  RunningStat s;
  for (int i = 0; i < 100000; ++i) s.add(rng.exponential());
  CHECK(s.mean() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("bernoulli degenerate probabilities") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("poisson mean and variance across both sampling regimes") {
  // mean < 10 uses sequential inversion, mean >= 10 the rejection sampler;
  // both must reproduce the first two moments.
  for (double mean : {0.3, 4.0, 37.5, 900.0}) {
    Rng rng(29);
    RunningStat s;
    const int n = 60000;
    for (int i = 0; i < n; ++i) s.add(double(rng.poisson(mean)));
    CHECK(s.mean() == doctest::Approx(mean).epsilon(0.02));
    CHECK(s.variance() == doctest::Approx(mean).epsilon(0.05));
  }
}

TEST_CASE("splitmix64 is a pure function of its state") {
  std::uint64_t s1 = 0x123456789abcdef0ull;
  std::uint64_t s2 = s1;
  const auto a = hetnetcov::splitmix64(s1);
  const auto b = hetnetcov::splitmix64(s2);
  CHECK(a == b);
  CHECK(s1 == s2);
  CHECK(hetnetcov::splitmix64(s1) != a);
}
