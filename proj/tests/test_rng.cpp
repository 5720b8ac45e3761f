#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "tsched/errors.hpp"
#include "tsched/rng.hpp"
#include "tsched/variates.hpp"

using namespace tsched;

TEST(Rng, SameSeedSameStream) {
  SeededRng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, MixSeedSeparatesStreams) {
  EXPECT_NE(mix_seed(7, 1), mix_seed(7, 2));
  EXPECT_NE(mix_seed(7, 1), mix_seed(8, 1));
  EXPECT_EQ(mix_seed(7, 1), mix_seed(7, 1));
}

TEST(Rng, Uniform01IsOpenInterval) {
  SeededRng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Rng, BelowCoversRange) {
  SeededRng rng(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(rng.below(1), 0u);
}

TEST(Rng, StateRoundTrip) {
  SeededRng a(99);
  for (int i = 0; i < 17; ++i) a.next_u64();
  SeededRng b(0);
  b.restore(a.state());
  EXPECT_EQ(a, b);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.uniform01(), b.uniform01());
}

TEST(Rng, NormalMoments) {
  SeededRng rng(5);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Variates, GammaMoments) {
  SeededRng rng(11);
  for (const double shape : {0.3, 1.0, 4.5, 50.0}) {
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = gamma_variate(rng, shape);
      ASSERT_GT(g, 0.0);
      s += g;
      s2 += g * g;
    }
    const double m = s / n;
    const double v = s2 / n - m * m;
    EXPECT_NEAR(m, shape, 4.0 * std::sqrt(shape / n)) << shape;
    EXPECT_NEAR(v / shape, 1.0, 0.05) << shape;
  }
}

TEST(Variates, BetaInUnitInterval) {
  SeededRng rng(2);
  for (int i = 0; i < 10000; ++i) {
    const double x = beta_variate(rng, 1001.0, 1e6);
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
    const double y = beta_variate(rng, 1.0, 1e12);
    ASSERT_GE(y, 0.0);
    ASSERT_LT(y, 1.0);
  }
}

TEST(Variates, BetaDeterministicForSeed) {
  SeededRng a(8), b(8);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(beta_variate(a, 2.0, 3.0), beta_variate(b, 2.0, 3.0));
}
