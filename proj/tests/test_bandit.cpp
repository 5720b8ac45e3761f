#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <sstream>

#include "tsched/bandit.hpp"
#include "tsched/errors.hpp"
#include "test_support.hpp"

using namespace tsched;

namespace {

PosteriorState make_state(std::vector<double> a, std::vector<double> b) {
  PosteriorState s;
  s.alpha = std::move(a);
  s.beta = std::move(b);
  return s;
}

}  // namespace

TEST(InitPosterior, AllOnes) {
  const auto s = init_posterior(4);
  EXPECT_EQ(s.alpha, std::vector<double>(4, 1.0));
  EXPECT_EQ(s.beta, std::vector<double>(4, 1.0));
  EXPECT_EQ(init_posterior(1).size(), 1u);
  EXPECT_THROW(init_posterior(0), DimensionError);
}

TEST(ComputeReward, SparseOverHitFeatures) {
  const auto r = compute_reward(CoverageMap({2, 0, 1}), true);
  EXPECT_EQ(r.at(0), std::optional<bool>(true));
  EXPECT_EQ(r.at(1), std::nullopt);
  EXPECT_EQ(r.at(2), std::optional<bool>(true));
  EXPECT_TRUE(compute_reward(CoverageMap({0, 0, 0}), true).entries().empty());
  EXPECT_TRUE(compute_reward(CoverageMap({0, 0, 0}), false).entries().empty());

  // Line 6 only, not interesting.
  const auto line6 = compute_reward(CoverageMap({0, 0, 0, 1}), false);
  ASSERT_EQ(line6.entries().size(), 1u);
  EXPECT_EQ(line6.at(3), std::optional<bool>(false));
}

TEST(UpdatePosterior, MotivatingSteps) {
  auto s = init_posterior(4);
  // Lines 3 and 6, interesting.
  EXPECT_EQ(update_posterior(s, compute_reward(CoverageMap({1, 0, 0, 1}), true)), 2u);
  EXPECT_EQ(s.alpha, (std::vector<double>{2, 1, 1, 2}));
  EXPECT_EQ(s.beta, (std::vector<double>{1, 1, 1, 1}));
  // Line 6 only, not interesting.
  update_posterior(s, compute_reward(CoverageMap({0, 0, 0, 1}), false));
  EXPECT_EQ(s.beta[3], 2.0);
  EXPECT_EQ(s.alpha[3], 2.0);

  const auto before = s;
  EXPECT_EQ(update_posterior(s, compute_reward(CoverageMap(4), true)), 0u);
  EXPECT_EQ(s, before);
}

TEST(UpdatePosterior, DimensionMismatch) {
  auto s = init_posterior(3);
  EXPECT_THROW(update_posterior(s, compute_reward(CoverageMap({1, 1}), true)), DimensionError);
}

TEST(UpdatePosterior, MonotoneAndConserving) {
  SeededRng rng(17);
  auto s = init_posterior(16);
  for (int t = 0; t < 500; ++t) {
    CoverageMap cov(16);
    for (auto& h : cov.hits) h = rng.below(3) == 0 ? 1 + static_cast<std::uint32_t>(rng.below(5)) : 0;
    const auto before = s;
    const auto touched = update_posterior(s, compute_reward(cov, rng.below(2) == 1));
    double gained = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
      ASSERT_GE(s.alpha[k], before.alpha[k]);
      ASSERT_GE(s.beta[k], before.beta[k]);
      gained += (s.alpha[k] - before.alpha[k]) + (s.beta[k] - before.beta[k]);
    }
    EXPECT_EQ(gained, static_cast<double>(touched));
    EXPECT_EQ(touched, cov.features().size());
  }
}

TEST(SampleTheta, UniformAndBeta23Means) {
  SeededRng rng(123);
  const auto uniform = init_posterior(1);
  const auto b23 = make_state({2.0}, {3.0});
  const int n = 1000000;
  double su = 0.0, sb = 0.0;
  for (int i = 0; i < n; ++i) {
    su += sample_theta(uniform, rng)[0];
    sb += sample_theta(b23, rng)[0];
  }
  EXPECT_NEAR(su / n, 0.5, 0.002);
  EXPECT_NEAR(sb / n, 0.4, 0.002);
}

TEST(SampleTheta, DeterministicUnderSeed) {
  const auto s = make_state({1, 2, 3, 40}, {5, 1, 1, 7});
  SeededRng a(9), b(9);
  EXPECT_EQ(sample_theta(s, a), sample_theta(s, b));
  EXPECT_EQ(sample_psi(s, a), sample_psi(s, b));
}

TEST(SamplePsi, Means) {
  SeededRng rng(321);
  const auto s = make_state({1.0, 1000.0}, {1.0, 1.0});
  const int n = 1000000;
  double s0 = 0.0, s1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto psi = sample_psi(s, rng);
    s0 += psi[0];
    s1 += psi[1];
  }
  EXPECT_NEAR(s0 / n, 2.0 / 3.0, 0.002);
  const double expected = 1001.0 / (1001.0 + 1e6);
  EXPECT_LE(std::abs(s1 / n - expected) / expected, 0.01);
}

TEST(ExpectedPhi, ValuesAndAsymptotes) {
  EXPECT_DOUBLE_EQ(expected_phi(1.0, 1.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(expected_phi(3.0, 2.0), 0.35714285714285715);  // scipy beta.mean(5, 9)
  EXPECT_LE(std::abs(expected_phi(1e6, 1.0) - 1e-6) / 1e-6, 2e-6);
  EXPECT_GE(expected_phi(1.0, 1e6), 1.0 - 3e-6);
  const auto v = expected_phi(make_state({1, 2}, {1, 1}));
  EXPECT_DOUBLE_EQ(v[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(v[1], 3.0 / 7.0);
}

TEST(ExpectedPhi, EqualsMeanOfPsiDistribution) {
  for (double a : {1.0, 2.0, 7.0, 150.0}) {
    for (double b : {1.0, 3.0, 99.0}) {
      const double mean = (a + b) / ((a + b) + a * a);
      EXPECT_NEAR(expected_phi(a, b), mean, 1e-15);
    }
  }
}

TEST(ComputePbar, MotivatingRows) {
  const auto t0 = compute_pbar(init_posterior(4));
  for (double p : t0) EXPECT_DOUBLE_EQ(p, 0.25);

  const auto t1 = compute_pbar(make_state({2, 1, 1, 2}, {1, 1, 1, 1}));
  const std::vector<double> want1{0.29, 0.21, 0.21, 0.29};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(t1[k], want1[k], 0.005);

  const auto t2 = compute_pbar(make_state({3, 2, 1, 3}, {1, 1, 1, 1}));
  const std::vector<double> want2{0.28, 0.25, 0.19, 0.28};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(t2[k], want2[k], 0.005);
}

TEST(ComputePbar, SumsToOne) {
  const auto p = compute_pbar(make_state({3, 9, 1, 2, 50}, {4, 1, 8, 2, 1}));
  double sum = 0.0;
  for (double x : p) sum += x;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(SelectAction, StubbedScores) {
  const auto s = init_posterior(3);
  test::ScriptedSource source({0.2, 0.9, 0.5});
  EXPECT_EQ(select_action(s, Variant::kRareMinus, {true, true, true}, source), 1u);

  test::ScriptedSource any({0.9, 0.1, 0.95});
  EXPECT_EQ(select_action(s, Variant::kRareMinus, {false, true, false}, any), 1u);
}

TEST(SelectAction, RarePlusTieGoesToLowestIndex) {
  const auto s = make_state({2, 2}, {1, 1});
  test::ScriptedSource source({0.6, 0.6});
  EXPECT_EQ(select_action(s, Variant::kRarePlus, {true, true}, source), 0u);
}

TEST(SelectAction, EmptyMaskThrows) {
  SeededRng rng(0);
  EXPECT_THROW(select_action(init_posterior(2), Variant::kSample, {false, false}, rng),
               EmptyCorpusError);
}

TEST(SelectAction, SampleUsesPsiTimesTheta) {
  // A small psi on feature 0 overturns its larger theta.
  const auto s = make_state({1, 1}, {1, 1});
  test::ScriptedSource source({0.8, 0.5, 0.1, 0.9});  // theta0, theta1, psi0, psi1
  EXPECT_EQ(select_action(s, Variant::kSample, {true, true}, source), 1u);
  EXPECT_EQ(source.calls(), 4u);
}

TEST(SelectAction, RarePlusUsesExpectedPhi) {
  const auto s = make_state({10, 1}, {1, 1});
  // phi(10,1) = 11/111 ~ 0.099, phi(1,1) = 2/3.
  test::ScriptedSource source({0.9, 0.2});
  EXPECT_EQ(select_action(s, Variant::kRarePlus, {true, true}, source), 1u);
  test::ScriptedSource plain({0.9, 0.2});
  EXPECT_EQ(select_action(s, Variant::kRareMinus, {true, true}, plain), 0u);
}

TEST(SelectAction, OpCounts) {
  SeededRng rng(1);
  const auto s = init_posterior(8);
  const std::vector<bool> all(8, true);
  std::uint64_t ops = 0;
  select_action(s, Variant::kRareMinus, all, rng, &ops);
  EXPECT_EQ(ops, 16u);
  ops = 0;
  select_action(s, Variant::kRarePlus, all, rng, &ops);
  EXPECT_EQ(ops, 16u);
  ops = 0;
  select_action(s, Variant::kSample, all, rng, &ops);
  EXPECT_EQ(ops, 24u);
}

TEST(SelectAction, VariantsAgreeAtInitialState) {
  // With all (1,1) every feature has the same phi, so RARE_PLUS ranks exactly like RARE_MINUS.
  const auto s = init_posterior(5);
  const std::vector<bool> all(5, true);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SeededRng a(seed), b(seed);
    EXPECT_EQ(select_action(s, Variant::kRareMinus, all, a),
              select_action(s, Variant::kRarePlus, all, b));
  }
}

TEST(SelectAction, ScaleInvarianceOfRarePlus) {
  // Scaling every score by the same phi keeps the argmax.
  const auto s = make_state({4, 4, 4}, {2, 2, 2});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SeededRng a(seed), b(seed);
    EXPECT_EQ(select_action(s, Variant::kRareMinus, {true, true, true}, a),
              select_action(s, Variant::kRarePlus, {true, true, true}, b));
  }
}

TEST(VariantNames, RoundTrip) {
  for (auto v : {Variant::kRareMinus, Variant::kRarePlus, Variant::kSample}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_EQ(parse_variant("thompson"), std::nullopt);
}

TEST(PosteriorSnapshot, BitExactRoundTrip) {
  auto s = make_state({1.0, 1e12 + 3.0, 1.1 + 0.2, 7.0}, {1.0, 2.0, 1.0 + 1.0 / 3.0, 65537.0});
  std::stringstream buf;
  save_posterior(buf, s);
  EXPECT_EQ(load_posterior(buf), s);
}

TEST(PosteriorSnapshot, RejectsOtherVersion) {
  std::stringstream buf("tsched-posterior 2\nk 1\nalpha 1\nbeta 1\n");
  EXPECT_THROW(load_posterior(buf), SnapshotVersionError);
  std::stringstream junk("hello");
  EXPECT_THROW(load_posterior(junk), SnapshotError);
  std::stringstream below_prior("tsched-posterior 1\nk 1\nalpha 0.5\nbeta 1\n");
  EXPECT_THROW(load_posterior(below_prior), SnapshotError);
}
