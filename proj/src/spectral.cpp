#include "surftest/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "surftest/kernels.hpp"

namespace surftest {

int SecondStageEigenSystem::total_components() const {
  return std::accumulate(K.begin(), K.end(), 0);
}

CovarianceMatrix marginal_covariance(const FunctionalSample& sample) {
  const FunctionalSample centered = center(sample);
  return CovarianceMatrix{
      kernels::marginal_gram(centered.values(), sample.n(), sample.N(), sample.M()),
      sample.grid_s()};
}

CovarianceMatrix pool_covariances(const CovarianceMatrix& G1, const CovarianceMatrix& G2,
                                  std::size_t n1, std::size_t n2) {
  if (!G1.grid.matches(G2.grid)) {
    throw ValidationError("cannot pool covariances on different grids (" +
                          std::to_string(G1.size()) + " vs " + std::to_string(G2.size()) +
                          " points)");
  }
  if (n1 == 0 || n2 == 0) throw ValidationError("pooling needs positive group sizes");
  const double total = static_cast<double>(n1 + n2);
  const double w1 = static_cast<double>(n2) / total;
  const double w2 = static_cast<double>(n1) / total;
  CovarianceMatrix pooled{std::vector<double>(G1.entries.size()), G1.grid};
  for (std::size_t idx = 0; idx < pooled.entries.size(); ++idx) {
    pooled.entries[idx] = w1 * G1.entries[idx] + w2 * G2.entries[idx];
  }
  return pooled;
}

KernelSpectrum eigendecompose_kernel(const CovarianceMatrix& G) {
  const std::size_t L = G.size();
  if (G.entries.size() != L * L) {
    throw ValidationError("covariance matrix has " + std::to_string(G.entries.size()) +
                          " entries for a grid of " + std::to_string(L));
  }
  double max_abs = 0.0;
  for (double v : G.entries) max_abs = std::max(max_abs, std::abs(v));
  for (std::size_t h = 0; h < L; ++h)
    for (std::size_t l = h + 1; l < L; ++l) {
      if (std::abs(G(h, l) - G(l, h)) > 1e-10 * max_abs) {
        std::ostringstream msg;
        msg << "non-symmetric input: entries (" << h << "," << l << ") and (" << l << ","
            << h << ") differ by " << std::abs(G(h, l) - G(l, h));
        throw ValidationError(msg.str());
      }
    }

  // Uniform weights w: W^{1/2} G W^{1/2} = w G, eigenvectors map back by w^{-1/2}.
  const double w = G.grid.weight();
  const auto Ld = static_cast<Eigen::Index>(L);
  Eigen::MatrixXd scaled(Ld, Ld);
  for (std::size_t h = 0; h < L; ++h)
    for (std::size_t l = 0; l < L; ++l)
      scaled(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(l)) = w * G(h, l);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scaled);
  if (solver.info() != Eigen::Success) {
    throw DegenerateError("symmetric eigensolver failed to converge");
  }

  KernelSpectrum out;
  out.grid = G.grid;
  out.eigenvalues.resize(L);
  out.eigenfunctions.resize(L * L);
  const double back = 1.0 / std::sqrt(w);
  for (std::size_t j = 0; j < L; ++j) {
    const auto src = static_cast<Eigen::Index>(L - 1 - j);  // solver sorts ascending
    out.eigenvalues[j] = std::max(0.0, solver.eigenvalues()(src));
    auto fn = out.function(j);
    std::size_t arg = 0;
    for (std::size_t l = 0; l < L; ++l) {
      fn[l] = back * solver.eigenvectors()(static_cast<Eigen::Index>(l), src);
      if (std::abs(fn[l]) > std::abs(fn[arg])) arg = l;
    }
    if (fn[arg] < 0.0) {
      for (double& v : fn) v = -v;
    }
  }
  return out;
}

std::vector<double> cumulative_fve(std::span<const double> eigenvalues) {
  double total = 0.0;
  for (double v : eigenvalues) total += std::max(0.0, v);
  std::vector<double> fve(eigenvalues.size(), 0.0);
  if (total <= 0.0) return fve;
  double running = 0.0;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    running += std::max(0.0, eigenvalues[j]);
    fve[j] = running / total;
  }
  return fve;
}

int select_components(std::span<const double> eigenvalues, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw ValidationError("variance threshold q must lie in (0,1), got " + std::to_string(q));
  }
  const auto fve = cumulative_fve(eigenvalues);
  if (fve.empty() || fve.back() <= 0.0) throw DegenerateError("degenerate spectrum");
  for (std::size_t j = 0; j < fve.size(); ++j) {
    if (fve[j] > q) return static_cast<int>(j + 1);
  }
  // Rounding can leave the final cumulative fraction a hair below q < 1.
  std::size_t last = eigenvalues.size();
  while (last > 0 && !(eigenvalues[last - 1] > 0.0)) --last;
  return static_cast<int>(last);
}

std::vector<std::string> near_tie_warnings(std::span<const double> eigenvalues, int retained,
                                           const std::string& what) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < static_cast<std::size_t>(retained); ++j) {
    if (j + 1 >= eigenvalues.size() || !(eigenvalues[j + 1] > 0.0)) break;
    const double ratio = eigenvalues[j] / eigenvalues[j + 1];
    if (ratio < 1.0 + 1e-6) {
      std::ostringstream msg;
      msg << what << " eigenvalues " << j + 1 << " and " << j + 2
          << " are nearly tied (ratio " << ratio << ")";
      out.push_back(msg.str());
    }
  }
  return out;
}

MarginalEigenSystem marginal_eigen_system(const CovarianceMatrix& pooled, double q) {
  MarginalEigenSystem sys;
  sys.spectrum = eigendecompose_kernel(pooled);
  sys.fve = cumulative_fve(sys.spectrum.eigenvalues);
  sys.J = select_components(sys.spectrum.eigenvalues, q);
  sys.warnings = near_tie_warnings(sys.spectrum.eigenvalues, sys.J, "marginal");
  return sys;
}

MarginalEigenSystem pooled_marginal_system(const FunctionalSample& sample1,
                                           const FunctionalSample& sample2, double q) {
  if (!sample1.grid_s().matches(sample2.grid_s()) ||
      !sample1.grid_t().matches(sample2.grid_t())) {
    throw ValidationError("samples '" + sample1.label() + "' and '" + sample2.label() +
                          "' are observed on different grids");
  }
  const auto G1 = marginal_covariance(sample1);
  const auto G2 = marginal_covariance(sample2);
  return marginal_eigen_system(pool_covariances(G1, G2, sample1.n(), sample2.n()), q);
}

SecondStageEigenSystem second_stage_systems(const ScoreCurves& scores1,
                                            const ScoreCurves& scores2) {
  if (scores1.J != scores2.J) {
    throw ValidationError("score curves disagree on J: " + std::to_string(scores1.J) +
                          " vs " + std::to_string(scores2.J));
  }
  if (!scores1.grid_t.matches(scores2.grid_t)) {
    throw ValidationError("score curves live on different t-grids");
  }
  const std::size_t J = scores1.J;
  const std::size_t M = scores1.M();
  SecondStageEigenSystem out;
  out.per_component.resize(J);
  out.K.assign(J, 0);
  std::vector<std::string> errors(J);
  std::vector<std::vector<std::string>> warnings(J);

  const auto Jd = static_cast<std::ptrdiff_t>(J);
#pragma omp parallel for schedule(dynamic, 1) if (J > 1)
  for (std::ptrdiff_t jd = 0; jd < Jd; ++jd) {
    const auto j = static_cast<std::size_t>(jd);
    try {
      const CovarianceMatrix G1{kernels::curve_gram(scores1.component(j), scores1.n, M),
                                scores1.grid_t};
      const CovarianceMatrix G2{kernels::curve_gram(scores2.component(j), scores2.n, M),
                                scores2.grid_t};
      out.per_component[j] = eigendecompose_kernel(pool_covariances(G1, G2, scores1.n, scores2.n));
      out.K[j] = select_components(out.per_component[j].eigenvalues, 0.9);
      warnings[j] = near_tie_warnings(out.per_component[j].eigenvalues, out.K[j],
                                      "second-stage j=" + std::to_string(j + 1));
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }
  for (std::size_t j = 0; j < J; ++j) {
    if (!errors[j].empty()) {
      throw DegenerateError(errors[j] + " in second-stage component j=" + std::to_string(j + 1));
    }
    out.warnings.insert(out.warnings.end(), warnings[j].begin(), warnings[j].end());
  }
  return out;
}

}  // namespace surftest
