#pragma once

#include <cstddef>
#include <vector>

#include "surftest/core.hpp"
#include "surftest/report.hpp"
#include "surftest/spectral.hpp"

namespace surftest {

/// Projections of every replicate's slice X_i(., t*) onto the retained
/// marginal eigenfunctions.
struct ProfileScores {
  std::vector<double> replicate_scores;  // n x J row-major
  std::vector<double> means;             // length J
  std::vector<double> variances;         // length J, divisor n
  std::size_t n = 0;
  std::size_t J = 0;
  std::size_t slice_index = 0;

  double operator()(std::size_t i, std::size_t j) const { return replicate_scores[i * J + j]; }
};

enum class ProfileAxis { fix_t, fix_s };

ProfileScores profile_scores(const FunctionalSample& sample, const MarginalEigenSystem& eigensys,
                             std::size_t t_star_index);

/// TP statistic with a chi^2_J reference. Throws DegenerateError when a pooled
/// score variance is not above 1e-12 of the largest pooled variance or squared
/// score mean.
TestReport profile_statistic(const ProfileScores& s1, const ProfileScores& s2);

/// One report per slice index along the fixed axis. With fix_s the two
/// arguments trade places: the eigen system lives on the t-grid and slices run
/// over s. The eigen system is built once from the pooled covariance.
std::vector<TestReport> profile_test_sweep(const FunctionalSample& sample1,
                                           const FunctionalSample& sample2, ProfileAxis axis,
                                           double q = 0.9);

/// Same as the sweep restricted to the listed slice indices.
std::vector<TestReport> profile_test_slices(const FunctionalSample& sample1,
                                            const FunctionalSample& sample2, ProfileAxis axis,
                                            const std::vector<std::size_t>& indices,
                                            double q = 0.9);

/// J-term reconstruction sum_j eta_j(t*) psi_j(s) on the s-grid.
std::vector<double> estimate_profile_mean(const FunctionalSample& sample,
                                          const MarginalEigenSystem& eigensys,
                                          std::size_t t_star_index);

}  // namespace surftest
