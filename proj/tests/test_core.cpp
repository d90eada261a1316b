#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "surftest/core.hpp"

using namespace surftest;

namespace {

FunctionalSample constant_sample(std::size_t n, double c) {
  return FunctionalSample(std::vector<double>(n * 3 * 4, c), Grid::uniform(0, 1, 3),
                          Grid::uniform(0, 1, 4));
}

}  // namespace

TEST(Grid, RejectsShortUnorderedAndUneven) {
  EXPECT_THROW(Grid({0.5}), ValidationError);
  EXPECT_THROW(Grid({0.0, 0.5, 0.5}), ValidationError);
  EXPECT_THROW(Grid({0.0, 0.4, 1.0}), ValidationError);
  EXPECT_NO_THROW(Grid({1.0, 2.0, 3.0}));
}

TEST(Grid, UniformSpacingAndNearest) {
  const Grid g = Grid::uniform(0.0, 1.0, 101);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.01);
  EXPECT_EQ(g.nearest_index(0.504), 50u);
  EXPECT_EQ(g.nearest_index(-3.0), 0u);
  EXPECT_EQ(g.nearest_index(7.0), 100u);
}

TEST(FunctionalSample, RejectsNonFiniteWithCoordinates) {
  std::vector<double> v(2 * 2 * 2, 1.0);
  v[5] = std::nan("");
  try {
    FunctionalSample(v, Grid::uniform(0, 1, 2), Grid::uniform(0, 1, 2), "g");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("replicate 1"), std::string::npos);
  }
}

TEST(FunctionalSample, SwapAxesTransposesEachReplicate) {
  std::mt19937_64 rng(3);
  const auto s = oracle::random_sample(2, 3, 4, rng);
  const auto t = s.swap_axes();
  ASSERT_EQ(t.N(), 4u);
  ASSERT_EQ(t.M(), 3u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(s(i, a, b), t(i, b, a));
  EXPECT_EQ(t.swap_axes(), s);
}

TEST(GroupMean, ConstantSampleGivesConstantSurface) {
  const auto m = group_mean(constant_sample(5, 2.5));
  for (double v : m.values) EXPECT_DOUBLE_EQ(v, 2.5);
}

TEST(GroupMean, OppositeReplicatesCancel) {
  std::mt19937_64 rng(1);
  const auto a = oracle::random_sample(1, 3, 4, rng);
  std::vector<double> v(a.values().begin(), a.values().end());
  for (double x : a.values()) v.push_back(-x);
  const auto m = group_mean(FunctionalSample(v, a.grid_s(), a.grid_t()));
  for (double x : m.values) EXPECT_EQ(x, 0.0);
}

TEST(GroupMean, MatchesDirectSummation) {
  std::mt19937_64 rng(2);
  const auto s = oracle::random_sample(3, 2, 2, rng);
  const auto m = group_mean(s);
  const auto ref = oracle::mean(oracle::to_block(s));
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) EXPECT_NEAR(m(a, b), ref[a][b], 1e-15);
}

TEST(Center, ConstantAndSingleReplicateVanish) {
  const auto a = center(constant_sample(4, 7.0));
  for (double v : a.values()) EXPECT_EQ(v, 0.0);
  std::mt19937_64 rng(4);
  const auto b = center(oracle::random_sample(1, 3, 4, rng));
  for (double v : b.values()) EXPECT_EQ(v, 0.0);
}

TEST(Center, ResultHasZeroMeanAndIsIdempotent) {
  std::mt19937_64 rng(5);
  const auto s = oracle::random_sample(4, 5, 6, rng, 3.0);
  const auto c = center(s);
  for (double v : group_mean(c).values) EXPECT_LE(std::abs(v), 1e-10);
  const auto cc = center(c);
  for (std::size_t k = 0; k < c.values().size(); ++k)
    EXPECT_NEAR(cc.values()[k], c.values()[k], 1e-12);
}

TEST(QuadInnerProduct, ConstantIntegratesToRange) {
  const Grid g = Grid::uniform(0, 1, 101);
  const std::vector<double> one(101, 1.0);
  EXPECT_NEAR(quad_inner_product(one, one, g), 1.0, 1e-9);
}

TEST(QuadInnerProduct, SineCosineOrthogonalAndNormalized) {
  const Grid g = Grid::uniform(0, 1, 200);
  std::vector<double> s(200), c(200), f(200);
  for (std::size_t l = 0; l < 200; ++l) {
    s[l] = std::sin(2 * std::numbers::pi * g[l]);
    c[l] = std::cos(2 * std::numbers::pi * g[l]);
    f[l] = std::numbers::sqrt2 * s[l];
  }
  EXPECT_NEAR(quad_inner_product(s, c, g), 0.0, 1e-3);
  EXPECT_NEAR(quad_inner_product(f, f, g), 1.0, 1e-2);
}

TEST(QuadInnerProduct, LengthMismatchThrows) {
  const Grid g = Grid::uniform(0, 1, 5);
  const std::vector<double> a(5, 1.0), b(4, 1.0);
  EXPECT_THROW(quad_inner_product(a, b, g), ValidationError);
}

TEST(QuadInnerProduct, BilinearAndSymmetric) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z;
  const Grid g = Grid::uniform(-2, 3, 17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(17), h(17), k(17), comb(17);
    for (std::size_t l = 0; l < 17; ++l) {
      f[l] = z(rng);
      h[l] = z(rng);
      k[l] = z(rng);
    }
    const double a = z(rng), b = z(rng);
    for (std::size_t l = 0; l < 17; ++l) comb[l] = a * f[l] + b * h[l];
    EXPECT_EQ(quad_inner_product(f, k, g), quad_inner_product(k, f, g));
    const double lhs = quad_inner_product(comb, k, g);
    const double rhs = a * quad_inner_product(f, k, g) + b * quad_inner_product(h, k, g);
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST(ChiSquare, SurvivalAtZeroIsOne) {
  EXPECT_EQ(chisq_survival(0.0, {5}), 1.0);
}

TEST(ChiSquare, TwoDfIsExponential) {
  EXPECT_NEAR(chisq_survival(5.991465, {2}), 0.05, 1e-6);
  for (int k = 0; k < 100; ++k) {
    const double x = 0.3 * k;
    EXPECT_NEAR(chisq_survival(x, {2}), std::exp(-x / 2), 1e-10) << x;
  }
}

TEST(ChiSquare, NineDfCriticalValueAgainstQuadrature) {
  const double ref = oracle::chisq_tail_quadrature(16.9190, 9);
  EXPECT_NEAR(ref, 0.05, 1e-4);
  EXPECT_NEAR(chisq_survival(16.9190, {9}), ref, 1e-8);
}

TEST(ChiSquare, AgreesWithQuadratureAcrossDf) {
  for (int df : {1, 2, 3, 4, 7, 12, 30}) {
    for (double x : {0.05, 0.5, 1.0, 3.0, 8.0, 20.0, 45.0}) {
      EXPECT_NEAR(chisq_survival(x, {df}), oracle::chisq_tail_quadrature(x, df), 1e-8)
          << "df=" << df << " x=" << x;
    }
  }
}

TEST(ChiSquare, OneDfMatchesErfc) {
  for (double x : {0.1, 1.0, 2.5, 10.0}) {
    EXPECT_NEAR(chisq_survival(x, {1}), std::erfc(std::sqrt(x / 2)), 1e-12);
  }
}

TEST(ChiSquare, StrictlyDecreasingWhereRepresentable) {
  // Near 0 for large df the survival is 1 - O(1e-30), which rounds to 1; strict
  // decrease is only observable once the value separates from 1 in doubles.
  for (int df : {1, 3, 9, 25}) {
    double prev = chisq_survival(0.0, {df});
    for (int k = 1; k < 1000; ++k) {
      const double cur = chisq_survival(0.1 * k, {df});
      ASSERT_LE(cur, prev) << "df=" << df << " x=" << 0.1 * k;
      if (prev < 1.0 - 1e-15 && cur > 1e-300) {
        ASSERT_LT(cur, prev) << "df=" << df << " x=" << 0.1 * k;
      }
      prev = cur;
    }
  }
}

TEST(ChiSquare, RejectsBadArguments) {
  EXPECT_THROW(chisq_survival(-1.0, {2}), ValidationError);
  EXPECT_THROW(chisq_survival(1.0, {0}), ValidationError);
}
