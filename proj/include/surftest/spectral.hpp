#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "surftest/core.hpp"

namespace surftest {

/// Symmetric kernel values on a grid, row-major L x L.
struct CovarianceMatrix {
  std::vector<double> entries;
  Grid grid;

  std::size_t size() const { return grid.size(); }
  double operator()(std::size_t h, std::size_t l) const { return entries[h * size() + l]; }
  double& operator()(std::size_t h, std::size_t l) { return entries[h * size() + l]; }
};

/// Eigenpairs of the integral operator of a kernel: eigenvalues nonincreasing
/// and clamped at zero, eigenfunctions orthonormal under the grid quadrature.
struct KernelSpectrum {
  std::vector<double> eigenvalues;
  std::vector<double> eigenfunctions;  // row j holds function j, length L
  Grid grid;

  std::size_t count() const { return eigenvalues.size(); }
  std::span<const double> function(std::size_t j) const {
    return std::span<const double>(eigenfunctions).subspan(j * grid.size(), grid.size());
  }
  std::span<double> function(std::size_t j) {
    return std::span<double>(eigenfunctions).subspan(j * grid.size(), grid.size());
  }
};

/// Pooled marginal eigen system over the s-grid with the retained count J.
struct MarginalEigenSystem {
  KernelSpectrum spectrum;
  std::vector<double> fve;  // cumulative fraction of variance explained
  int J = 0;
  std::vector<std::string> warnings;

  const Grid& grid() const { return spectrum.grid; }
  std::span<const double> psi(std::size_t j) const { return spectrum.function(j); }
  /// First J eigenfunctions as a J x N row-major block.
  std::span<const double> retained_basis() const {
    return std::span<const double>(spectrum.eigenfunctions)
        .first(static_cast<std::size_t>(J) * grid().size());
  }
};

/// Score curves xi_{j,i}(t): a J x n x M block on grid_t.
struct ScoreCurves {
  std::vector<double> values;
  std::size_t J = 0;
  std::size_t n = 0;
  Grid grid_t;

  std::size_t M() const { return grid_t.size(); }
  double operator()(std::size_t j, std::size_t i, std::size_t l2) const {
    return values[(j * n + i) * M() + l2];
  }
  /// The n x M block of curves for component j.
  std::span<const double> component(std::size_t j) const {
    return std::span<const double>(values).subspan(j * n * M(), n * M());
  }
};

/// Per-j second-stage eigen systems over the t-grid with retained counts K_j.
struct SecondStageEigenSystem {
  std::vector<KernelSpectrum> per_component;
  std::vector<int> K;
  std::vector<std::string> warnings;

  std::size_t J() const { return K.size(); }
  int total_components() const;
  std::span<const double> phi(std::size_t j, std::size_t k) const {
    return per_component[j].function(k);
  }
};

CovarianceMatrix marginal_covariance(const FunctionalSample& sample);

/// (n2 G1 + n1 G2) / (n1 + n2): each group is weighted by the other's size.
CovarianceMatrix pool_covariances(const CovarianceMatrix& G1, const CovarianceMatrix& G2,
                                  std::size_t n1, std::size_t n2);

KernelSpectrum eigendecompose_kernel(const CovarianceMatrix& G);

/// Cumulative fraction of variance explained by the leading components.
std::vector<double> cumulative_fve(std::span<const double> eigenvalues);

/// Smallest j whose cumulative fraction of variance strictly exceeds q.
int select_components(std::span<const double> eigenvalues, double q = 0.9);

/// Eigendecomposition of a pooled marginal covariance followed by selection of J.
MarginalEigenSystem marginal_eigen_system(const CovarianceMatrix& pooled, double q = 0.9);

/// Pooled covariance of both samples over s and its eigen system.
MarginalEigenSystem pooled_marginal_system(const FunctionalSample& sample1,
                                           const FunctionalSample& sample2,
                                           double q = 0.9);

/// Pools per-j covariances of the score curves and selects K_j at 0.9.
SecondStageEigenSystem second_stage_systems(const ScoreCurves& scores1,
                                            const ScoreCurves& scores2);

/// Warnings for retained eigenvalues that are tied to within 1e-6 relative.
std::vector<std::string> near_tie_warnings(std::span<const double> eigenvalues, int retained,
                                           const std::string& what);

}  // namespace surftest
