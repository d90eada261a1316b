#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "surftest/globe.hpp"
#include "surftest/sim.hpp"

using namespace surftest;

namespace {

std::pair<FunctionalSample, FunctionalSample> example(int which, std::size_t n1, std::size_t n2,
                                                      double delta, std::uint64_t seed,
                                                      std::size_t N = 30, std::size_t M = 20) {
  StreamRng rng(seed, 0);
  const auto gs = Grid::uniform(0, 1, N), gt = Grid::uniform(0, 1, M);
  return which == 1 ? generate_example1(n1, n2, delta, gs, gt, rng)
                    : generate_example2(n1, n2, delta, gs, gt, rng);
}

FunctionalSample affine(const FunctionalSample& s, double a, const std::vector<double>& shift = {}) {
  std::vector<double> v(s.values().begin(), s.values().end());
  const std::size_t cell = s.N() * s.M();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a * v[k] + (shift.empty() ? 0.0 : shift[k % cell]);
  return FunctionalSample(std::move(v), s.grid_s(), s.grid_t(), s.label());
}

struct Systems {
  MarginalEigenSystem marginal;
  SecondStageEigenSystem second;
};

Systems build(const FunctionalSample& a, const FunctionalSample& b) {
  Systems s{pooled_marginal_system(a, b), {}};
  s.second = second_stage_systems(score_curves(a, s.marginal), score_curves(b, s.marginal));
  return s;
}

SurfaceScores manual_scores(double mean, double var, std::size_t n) {
  SurfaceScores s;
  s.index = {{0, 0}};
  s.replicate_scores.assign(n, mean);
  s.means = {mean};
  s.variances = {var};
  s.n = n;
  return s;
}

}  // namespace

TEST(ScoreCurves, ConstantSampleGivesZeroCurves) {
  auto [a, b] = example(1, 10, 10, 0.0, 1);
  const auto sys = pooled_marginal_system(a, b);
  const FunctionalSample c(std::vector<double>(5 * a.N() * a.M(), 4.2), a.grid_s(), a.grid_t());
  for (double v : score_curves(c, sys).values) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(ScoreCurves, SeparableReplicatesRecoverTimeProfile) {
  std::mt19937_64 rng(2);
  const auto a = oracle::random_sample(10, 16, 9, rng);
  const auto b = oracle::random_sample(10, 16, 9, rng);
  const auto sys = pooled_marginal_system(a, b, 0.99);
  ASSERT_GE(sys.J, 2);
  // X_i = a_i psi_1(s) g(t) with sum a_i = 0, so the sample is already centered.
  const std::vector<double> amp = {1.5, -0.5, -1.0};
  std::vector<double> g(9);
  for (std::size_t l = 0; l < 9; ++l) g[l] = std::cos(3.0 * l);
  auto x = FunctionalSample::zeros(3, a.grid_s(), a.grid_t());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t l1 = 0; l1 < 16; ++l1)
      for (std::size_t l2 = 0; l2 < 9; ++l2) x(i, l1, l2) = amp[i] * sys.psi(0)[l1] * g[l2];
  const auto xi = score_curves(x, sys);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t l2 = 0; l2 < 9; ++l2) {
      EXPECT_NEAR(xi(0, i, l2), amp[i] * g[l2], 1e-12);
      for (std::size_t j = 1; j < xi.J; ++j) EXPECT_NEAR(xi(j, i, l2), 0.0, 1e-12);
    }
}

TEST(ScoreCurves, MatchesBruteForceOnExampleTwo) {
  auto [a, b] = example(2, 40, 40, 0.2, 3);
  const auto sys = pooled_marginal_system(a, b);
  const auto xi = score_curves(b, sys);
  const auto xc = oracle::centered(oracle::to_block(b));
  const double w = oracle::weight(b.grid_s().points());
  for (std::size_t j = 0; j < xi.J; ++j)
    for (std::size_t i = 0; i < b.n(); ++i)
      for (std::size_t t = 0; t < b.M(); ++t) {
        double acc = 0.0;
        for (std::size_t l = 0; l < b.N(); ++l) acc += xc[i][l][t] * sys.psi(j)[l];
        EXPECT_NEAR(xi(j, i, t), w * acc, 1e-10);
      }
  // centered input: curves average to zero across replicates
  for (std::size_t j = 0; j < xi.J; ++j)
    for (std::size_t t = 0; t < b.M(); ++t) {
      double m = 0.0;
      for (std::size_t i = 0; i < b.n(); ++i) m += xi(j, i, t);
      EXPECT_LE(std::abs(m / b.n()), 1e-10);
    }
}

TEST(SurfaceScores, ZeroSampleGivesZeros) {
  auto [a, b] = example(1, 20, 20, 0.0, 4);
  const auto sys = build(a, b);
  const auto zero = FunctionalSample::zeros(3, a.grid_s(), a.grid_t());
  const auto sc = surface_scores(zero, sys.marginal, sys.second);
  EXPECT_EQ(static_cast<int>(sc.columns()), sys.second.total_components());
  for (double v : sc.replicate_scores) EXPECT_EQ(v, 0.0);
  for (double v : sc.variances) EXPECT_EQ(v, 0.0);
}

TEST(SurfaceScores, ProductBasisReplicateHasUnitScore) {
  auto [a, b] = example(1, 30, 30, 0.0, 5);
  const auto sys = build(a, b);
  auto x = FunctionalSample::zeros(1, a.grid_s(), a.grid_t());
  for (std::size_t l1 = 0; l1 < a.N(); ++l1)
    for (std::size_t l2 = 0; l2 < a.M(); ++l2)
      x(0, l1, l2) = sys.second.phi(0, 0)[l2] * sys.marginal.psi(0)[l1];
  const auto sc = surface_scores(x, sys.marginal, sys.second);
  ASSERT_EQ(sc.index[0], std::make_pair(0, 0));
  EXPECT_NEAR(sc(0, 0), 1.0, 1e-10);
  for (std::size_t c = 1; c < sc.columns(); ++c) EXPECT_NEAR(sc(0, c), 0.0, 1e-10);
  const auto m = estimate_mean_surface(x, sys.marginal, sys.second);
  for (std::size_t l1 = 0; l1 < a.N(); ++l1)
    for (std::size_t l2 = 0; l2 < a.M(); ++l2) EXPECT_NEAR(m(l1, l2), x(0, l1, l2), 1e-6);
}

TEST(SurfaceScores, MatchesQuadrupleLoop) {
  auto [a, b] = example(2, 25, 35, 0.5, 6);
  const auto sys = build(a, b);
  const auto sc = surface_scores(a, sys.marginal, sys.second);
  const double ws = oracle::weight(a.grid_s().points()), wt = oracle::weight(a.grid_t().points());
  for (std::size_t c = 0; c < sc.columns(); ++c) {
    const auto [j, k] = sc.index[c];
    std::vector<double> eta(a.n());
    double mean = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i) {
      double acc = 0.0;
      for (std::size_t l1 = 0; l1 < a.N(); ++l1)
        for (std::size_t l2 = 0; l2 < a.M(); ++l2)
          acc += a(i, l1, l2) * sys.marginal.psi(j)[l1] * sys.second.phi(j, k)[l2];
      eta[i] = ws * wt * acc;
      mean += eta[i] / a.n();
      EXPECT_NEAR(sc(i, c), eta[i], 1e-10);
    }
    double var = 0.0;
    for (double e : eta) var += (e - mean) * (e - mean) / (a.n() - 1.0);
    EXPECT_NEAR(sc.means[c], mean, 1e-10);
    EXPECT_NEAR(sc.variances[c], var, 1e-10 * (1.0 + var));
  }
}

TEST(GlobeStatistic, IdenticalScoresGiveZero) {
  auto [a, b] = example(1, 20, 20, 0.0, 7);
  const auto sys = build(a, a);
  const auto sc = surface_scores(a, sys.marginal, sys.second);
  const auto r = globe_statistic(sc, sc);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.df, sys.second.total_components());
}

TEST(GlobeStatistic, HandComputedSingleComponent) {
  const auto r = globe_statistic(manual_scores(1.0, 1.0, 2), manual_scores(0.0, 1.0, 2));
  EXPECT_DOUBLE_EQ(r.statistic, 1.0);
  EXPECT_EQ(r.df, 1);
  EXPECT_NEAR(r.p_value, 0.3173, 1e-4);
  ASSERT_EQ(r.K.size(), 1u);
  EXPECT_EQ(r.K[0], 1);
}

TEST(GlobeStatistic, StructureMismatchAndTinySamples) {
  auto p = manual_scores(1.0, 1.0, 3);
  auto q = p;
  q.index = {{0, 1}};
  EXPECT_THROW(globe_statistic(p, q), ValidationError);
  EXPECT_THROW(globe_statistic(manual_scores(1.0, 1.0, 1), p), ValidationError);
}

TEST(GlobeStatistic, DegenerateVariance) {
  EXPECT_THROW(globe_statistic(manual_scores(1.0, 0.0, 3), manual_scores(0.0, 0.0, 3)),
               DegenerateError);
}

TEST(GlobeTest, IdenticalSamplesGiveZero) {
  auto [a, b] = example(2, 30, 30, 0.0, 8);
  const auto r = globe_test(a, a);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(GlobeTest, EqualsStagedComposition) {
  auto [a, b] = example(1, 40, 60, 0.4, 9);
  const auto sys = build(a, b);
  const auto staged = globe_statistic(surface_scores(a, sys.marginal, sys.second),
                                      surface_scores(b, sys.marginal, sys.second));
  const auto r = globe_test(a, b);
  EXPECT_EQ(r.statistic, staged.statistic);
  EXPECT_EQ(r.df, staged.df);
  EXPECT_EQ(r.K, staged.K);
  EXPECT_EQ(r.J, sys.marginal.J);
}

TEST(GlobeTest, ShiftRaisesRejectionWellAboveSize) {
  // Only the t-varying half of delta (s + t) is visible to the zero-mean
  // second-stage eigenfunctions, so power at delta = 1.2 is moderate here.
  int alt = 0, null = 0;
  for (std::uint64_t r = 0; r < 30; ++r) {
    auto [a, b] = example(1, 100, 300, 1.2, 1000 + r, 100, 50);
    alt += globe_test(a, b).p_value < 0.05;
    auto [c, d] = example(1, 100, 300, 0.0, 2000 + r, 100, 50);
    null += globe_test(c, d).p_value < 0.05;
  }
  EXPECT_GE(alt, 12);
  EXPECT_LE(null, 6);
}

TEST(GlobeTest, GridMismatchThrows) {
  auto [a, b] = example(1, 5, 5, 0.0, 10);
  auto [c, d] = example(1, 5, 5, 0.0, 10, 30, 21);
  EXPECT_THROW(globe_test(a, d), ValidationError);
}

TEST(MeanSurface, ZeroSampleGivesZeroSurface) {
  auto [a, b] = example(1, 20, 20, 0.0, 11);
  const auto sys = build(a, b);
  const auto m = estimate_mean_surface(FunctionalSample::zeros(2, a.grid_s(), a.grid_t()),
                                       sys.marginal, sys.second);
  for (double v : m.values) EXPECT_EQ(v, 0.0);
}

TEST(MeanSurface, ApproachesProjectionOfKnownMean) {
  auto [a, b] = example(1, 2000, 2000, 0.6, 12, 30, 20);
  const auto sys = build(a, b);
  const auto m = estimate_mean_surface(b, sys.marginal, sys.second);
  const auto& gs = a.grid_s();
  const auto& gt = a.grid_t();
  const double ws = oracle::weight(gs.points()), wt = oracle::weight(gt.points());
  std::vector<double> proj(gs.size() * gt.size(), 0.0);
  for (std::size_t j = 0; j < sys.second.J(); ++j)
    for (int k = 0; k < sys.second.K[j]; ++k) {
      const auto psi = sys.marginal.psi(j);
      const auto phi = sys.second.phi(j, static_cast<std::size_t>(k));
      double c = 0.0;
      for (std::size_t l1 = 0; l1 < gs.size(); ++l1)
        for (std::size_t l2 = 0; l2 < gt.size(); ++l2) c += ws * wt * 0.6 * (gs[l1] + gt[l2]) * psi[l1] * phi[l2];
      for (std::size_t l1 = 0; l1 < gs.size(); ++l1)
        for (std::size_t l2 = 0; l2 < gt.size(); ++l2) proj[l1 * gt.size() + l2] += c * psi[l1] * phi[l2];
    }
  for (std::size_t k = 0; k < proj.size(); ++k) EXPECT_NEAR(m.values[k], proj[k], 0.05) << k;
}

class GlobeInvariance : public ::testing::TestWithParam<int> {};

TEST_P(GlobeInvariance, RelabelScaleShiftSign) {
  const int trial = GetParam();
  std::mt19937_64 rng(300 + trial);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  std::normal_distribution<double> z;
  auto [a, b] = example(1 + trial % 2, 10 + trial % 6, 14 + trial % 4, 0.3 * (trial % 3),
                        400 + trial, 12, 9);
  const double base = globe_test(a, b).statistic;
  EXPECT_LE(oracle::rel_diff(globe_test(b, a).statistic, base), 1e-8);
  const double c = u(rng);
  EXPECT_LE(oracle::rel_diff(globe_test(affine(a, c), affine(b, c)).statistic, base), 1e-8);
  std::vector<double> mu0(a.N() * a.M());
  for (double& v : mu0) v = 3.0 * z(rng);
  EXPECT_LE(oracle::rel_diff(globe_test(affine(a, 1.0, mu0), affine(b, 1.0, mu0)).statistic, base),
            1e-8);

  auto sys = build(a, b);
  const double ref = globe_statistic(surface_scores(a, sys.marginal, sys.second),
                                     surface_scores(b, sys.marginal, sys.second))
                         .statistic;
  for (std::size_t j = 0; j < sys.second.J(); ++j) {
    if (rng() % 2)
      for (double& v : sys.marginal.spectrum.function(j)) v = -v;
    for (int k = 0; k < sys.second.K[j]; ++k)
      if (rng() % 2)
        for (double& v : sys.second.per_component[j].function(static_cast<std::size_t>(k))) v = -v;
  }
  const double flipped = globe_statistic(surface_scores(a, sys.marginal, sys.second),
                                         surface_scores(b, sys.marginal, sys.second))
                             .statistic;
  EXPECT_LE(oracle::rel_diff(flipped, ref), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Random, GlobeInvariance, ::testing::Range(0, 20));
