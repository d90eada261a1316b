#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "surftest/core.hpp"
#include "surftest/report.hpp"
#include "surftest/spectral.hpp"

namespace surftest {

/// Projections of each replicate onto the product eigensurfaces
/// phi_jk(t) psi_j(s), stored ragged over k <= K_j.
struct SurfaceScores {
  std::vector<std::pair<int, int>> index;  // 0-based (j, k) for each column
  std::vector<double> replicate_scores;    // n x index.size() row-major
  std::vector<double> means;
  std::vector<double> variances;           // divisor n - 1
  std::size_t n = 0;

  std::size_t columns() const { return index.size(); }
  double operator()(std::size_t i, std::size_t c) const {
    return replicate_scores[i * columns() + c];
  }
};

/// xi_{j,i}(t) from the centered sample and the retained marginal eigenfunctions.
ScoreCurves score_curves(const FunctionalSample& sample, const MarginalEigenSystem& eigensys);

/// Projections of the raw observations onto the retained product surfaces.
SurfaceScores surface_scores(const FunctionalSample& sample, const MarginalEigenSystem& eigensys,
                             const SecondStageEigenSystem& second);

/// TM statistic with a chi^2 reference on sum_j K_j degrees of freedom.
TestReport globe_statistic(const SurfaceScores& s1, const SurfaceScores& s2);

/// Full pipeline from two samples to the globe test report.
TestReport globe_test(const FunctionalSample& sample1, const FunctionalSample& sample2,
                      double q = 0.9);

/// Truncated reconstruction sum_jk eta_jk phi_jk(t) psi_j(s) on the N x M grid.
Surface estimate_mean_surface(const FunctionalSample& sample, const MarginalEigenSystem& eigensys,
                              const SecondStageEigenSystem& second);

}  // namespace surftest
