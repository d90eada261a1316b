#include "surftest/globe.hpp"

#include <algorithm>
#include <sstream>

#include "surftest/kernels.hpp"

namespace surftest {

namespace {

void check_system(const FunctionalSample& sample, const MarginalEigenSystem& eigensys) {
  if (!eigensys.grid().matches(sample.grid_s())) {
    throw ValidationError("marginal eigen system grid does not match the s-grid of '" +
                          sample.label() + "'");
  }
  if (eigensys.J < 1) throw ValidationError("marginal eigen system retains no components");
}

void check_second(const FunctionalSample& sample, const MarginalEigenSystem& eigensys,
                  const SecondStageEigenSystem& second) {
  check_system(sample, eigensys);
  if (second.J() != static_cast<std::size_t>(eigensys.J)) {
    throw ValidationError("second-stage system has " + std::to_string(second.J()) +
                          " components but the marginal system retains J=" +
                          std::to_string(eigensys.J));
  }
  for (std::size_t j = 0; j < second.J(); ++j) {
    if (!second.per_component[j].grid.matches(sample.grid_t())) {
      throw ValidationError("second-stage system j=" + std::to_string(j + 1) +
                            " does not match the t-grid of '" + sample.label() + "'");
    }
    if (second.K[j] < 1) {
      throw ValidationError("second-stage system j=" + std::to_string(j + 1) +
                            " retains no components");
    }
  }
}

}  // namespace

ScoreCurves score_curves(const FunctionalSample& sample, const MarginalEigenSystem& eigensys) {
  check_system(sample, eigensys);
  const FunctionalSample centered = center(sample);
  const std::size_t J = static_cast<std::size_t>(eigensys.J);
  ScoreCurves out;
  out.values = kernels::project_s(centered.values(), sample.n(), sample.N(), sample.M(),
                                  eigensys.retained_basis(), J, sample.grid_s().weight());
  out.J = J;
  out.n = sample.n();
  out.grid_t = sample.grid_t();
  return out;
}

SurfaceScores surface_scores(const FunctionalSample& sample, const MarginalEigenSystem& eigensys,
                             const SecondStageEigenSystem& second) {
  check_second(sample, eigensys, second);
  const std::size_t J = static_cast<std::size_t>(eigensys.J);
  const std::size_t n = sample.n();
  const std::size_t M = sample.M();
  const auto raw = kernels::project_s(sample.values(), n, sample.N(), M,
                                      eigensys.retained_basis(), J, sample.grid_s().weight());

  SurfaceScores out;
  out.n = n;
  for (std::size_t j = 0; j < J; ++j)
    for (int k = 0; k < second.K[j]; ++k) out.index.emplace_back(static_cast<int>(j), k);
  const std::size_t cols = out.index.size();
  out.replicate_scores.assign(n * cols, 0.0);

  std::size_t col0 = 0;
  const double wt = sample.grid_t().weight();
  for (std::size_t j = 0; j < J; ++j) {
    const auto K = static_cast<std::size_t>(second.K[j]);
    const auto basis = std::span<const double>(second.per_component[j].eigenfunctions).first(K * M);
    const auto curves = std::span<const double>(raw).subspan(j * n * M, n * M);
    const auto proj = kernels::project_t(curves, n, M, basis, K, wt);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < K; ++k) out.replicate_scores[i * cols + col0 + k] = proj[i * K + k];
    col0 += K;
  }

  out.means.assign(cols, 0.0);
  out.variances.assign(cols, 0.0);
  for (std::size_t c = 0; c < cols; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += out(i, c);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = out(i, c) - mean;
      ss += d * d;
    }
    out.means[c] = mean;
    out.variances[c] = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  }
  return out;
}

TestReport globe_statistic(const SurfaceScores& s1, const SurfaceScores& s2) {
  if (s1.index != s2.index) {
    throw ValidationError("surface scores disagree on the (j,k) component structure");
  }
  if (s1.index.empty()) throw ValidationError("surface scores carry no components");
  if (s1.n < 2 || s2.n < 2) {
    throw ValidationError("globe statistic needs at least 2 replicates per group (got " +
                          std::to_string(s1.n) + ", " + std::to_string(s2.n) + ")");
  }
  const double n1 = static_cast<double>(s1.n);
  const double n2 = static_cast<double>(s2.n);
  const double w1 = n2 / (n1 + n2);
  const double w2 = n1 / (n1 + n2);

  TestReport report;
  double scale = 0.0;
  for (std::size_t c = 0; c < s1.columns(); ++c) {
    const auto [j, k] = s1.index[c];
    ComponentTerm term;
    term.j = j + 1;
    term.k = k + 1;
    term.score_difference = s1.means[c] - s2.means[c];
    term.pooled_variance = w1 * s1.variances[c] + w2 * s2.variances[c];
    // scores that only carry rounding noise around a common level count as degenerate
    scale = std::max({scale, term.pooled_variance, s1.means[c] * s1.means[c],
                        s2.means[c] * s2.means[c]});
    report.per_component.push_back(term);
    if (static_cast<std::size_t>(j) >= report.K.size()) report.K.resize(j + 1, 0);
    ++report.K[j];
  }
  const double floor = 1e-12 * scale;
  double sum = 0.0;
  for (const auto& term : report.per_component) {
    if (!(term.pooled_variance > floor)) {
      std::ostringstream msg;
      msg << "degenerate component variance at (j,k)=(" << term.j << "," << *term.k
          << ") (pooled variance " << term.pooled_variance << ")";
      throw DegenerateError(msg.str());
    }
    sum += term.score_difference * term.score_difference / term.pooled_variance;
  }
  report.J = static_cast<int>(report.K.size());
  report.df = static_cast<int>(report.per_component.size());
  report.statistic = n1 * n2 / (n1 + n2) * sum;
  report.p_value = chisq_survival(report.statistic, ChiSquareRef{report.df});
  return report;
}

TestReport globe_test(const FunctionalSample& sample1, const FunctionalSample& sample2,
                      double q) {
  sample1.require_replicates(2);
  sample2.require_replicates(2);
  const MarginalEigenSystem sys = pooled_marginal_system(sample1, sample2, q);
  const ScoreCurves xi1 = score_curves(sample1, sys);
  const ScoreCurves xi2 = score_curves(sample2, sys);
  const SecondStageEigenSystem second = second_stage_systems(xi1, xi2);
  TestReport report = globe_statistic(surface_scores(sample1, sys, second),
                                      surface_scores(sample2, sys, second));
  report.warnings = sys.warnings;
  report.warnings.insert(report.warnings.end(), second.warnings.begin(), second.warnings.end());
  return report;
}

Surface estimate_mean_surface(const FunctionalSample& sample, const MarginalEigenSystem& eigensys,
                              const SecondStageEigenSystem& second) {
  const SurfaceScores scores = surface_scores(sample, eigensys, second);
  Surface out{std::vector<double>(sample.N() * sample.M(), 0.0), sample.N(), sample.M()};
  for (std::size_t c = 0; c < scores.columns(); ++c) {
    const auto [j, k] = scores.index[c];
    const auto psi = eigensys.psi(static_cast<std::size_t>(j));
    const auto phi = second.phi(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
    const double eta = scores.means[c];
    for (std::size_t l1 = 0; l1 < out.rows; ++l1)
      for (std::size_t l2 = 0; l2 < out.cols; ++l2) out(l1, l2) += eta * psi[l1] * phi[l2];
  }
  return out;
}

}  // namespace surftest
