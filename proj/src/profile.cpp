#include "surftest/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "surftest/kernels.hpp"

namespace surftest {

namespace {

void summarize(ProfileScores& out) {
  out.means.assign(out.J, 0.0);
  out.variances.assign(out.J, 0.0);
  const double inv_n = 1.0 / static_cast<double>(out.n);
  for (std::size_t j = 0; j < out.J; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < out.n; ++i) sum += out(i, j);
    const double mean = sum * inv_n;
    double ss = 0.0;
    for (std::size_t i = 0; i < out.n; ++i) {
      const double d = out(i, j) - mean;
      ss += d * d;
    }
    out.means[j] = mean;
    out.variances[j] = ss * inv_n;
  }
}

// Scores for one slice out of a J x n x M projection block.
ProfileScores slice_scores(const std::vector<double>& projected, std::size_t n, std::size_t J,
                           std::size_t M, std::size_t slice) {
  ProfileScores out;
  out.n = n;
  out.J = J;
  out.slice_index = slice;
  out.replicate_scores.resize(n * J);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < J; ++j)
      out.replicate_scores[i * J + j] = projected[(j * n + i) * M + slice];
  summarize(out);
  return out;
}

void check_grids(const FunctionalSample& a, const FunctionalSample& b) {
  if (!a.grid_s().matches(b.grid_s()) || !a.grid_t().matches(b.grid_t())) {
    throw ValidationError("samples '" + a.label() + "' and '" + b.label() +
                          "' are observed on different grids");
  }
}

}  // namespace

ProfileScores profile_scores(const FunctionalSample& sample, const MarginalEigenSystem& eigensys,
                             std::size_t t_star_index) {
  if (t_star_index >= sample.M()) {
    throw ValidationError("slice index " + std::to_string(t_star_index) +
                          " out of range for a grid of " + std::to_string(sample.M()) +
                          " points");
  }
  if (eigensys.J < 1) throw ValidationError("eigen system retains no components");
  if (!eigensys.grid().matches(sample.grid_s())) {
    throw ValidationError("eigen system grid does not match the sample's s-grid");
  }
  const std::size_t J = static_cast<std::size_t>(eigensys.J);
  const double w = sample.grid_s().weight();
  ProfileScores out;
  out.n = sample.n();
  out.J = J;
  out.slice_index = t_star_index;
  out.replicate_scores.resize(out.n * J);
  for (std::size_t i = 0; i < out.n; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      const auto psi = eigensys.psi(j);
      double acc = 0.0;
      for (std::size_t l = 0; l < sample.N(); ++l) acc += sample(i, l, t_star_index) * psi[l];
      out.replicate_scores[i * J + j] = w * acc;
    }
  }
  summarize(out);
  return out;
}

TestReport profile_statistic(const ProfileScores& s1, const ProfileScores& s2) {
  if (s1.J != s2.J) {
    throw ValidationError("profile scores disagree on J: " + std::to_string(s1.J) + " vs " +
                          std::to_string(s2.J));
  }
  if (s1.slice_index != s2.slice_index) {
    throw ValidationError("profile scores come from different slices (" +
                          std::to_string(s1.slice_index) + " vs " +
                          std::to_string(s2.slice_index) + ")");
  }
  if (s1.n == 0 || s2.n == 0) throw ValidationError("profile scores need replicates");
  const double n1 = static_cast<double>(s1.n);
  const double n2 = static_cast<double>(s2.n);
  const double w1 = n2 / (n1 + n2);
  const double w2 = n1 / (n1 + n2);

  TestReport report;
  report.J = static_cast<int>(s1.J);
  report.df = report.J;
  double scale = 0.0;
  for (std::size_t j = 0; j < s1.J; ++j) {
    ComponentTerm term;
    term.j = static_cast<int>(j + 1);
    term.score_difference = s1.means[j] - s2.means[j];
    term.pooled_variance = w1 * s1.variances[j] + w2 * s2.variances[j];
    // scores that only carry rounding noise around a common level count as degenerate
    scale = std::max({scale, term.pooled_variance, s1.means[j] * s1.means[j],
                        s2.means[j] * s2.means[j]});
    report.per_component.push_back(term);
  }
  const double floor = 1e-12 * scale;
  double sum = 0.0;
  for (const auto& term : report.per_component) {
    if (!(term.pooled_variance > floor)) {
      std::ostringstream msg;
      msg << "degenerate component variance at j=" << term.j << " (pooled variance "
          << term.pooled_variance << ", slice index " << s1.slice_index << ")";
      throw DegenerateError(msg.str());
    }
    sum += term.score_difference * term.score_difference / term.pooled_variance;
  }
  report.statistic = n1 * n2 / (n1 + n2) * sum;
  report.p_value = chisq_survival(report.statistic, ChiSquareRef{report.df});
  return report;
}

std::vector<TestReport> profile_test_slices(const FunctionalSample& sample1,
                                            const FunctionalSample& sample2, ProfileAxis axis,
                                            const std::vector<std::size_t>& indices, double q) {
  check_grids(sample1, sample2);
  sample1.require_replicates(2);
  sample2.require_replicates(2);
  const bool swap = axis == ProfileAxis::fix_s;
  const FunctionalSample a = swap ? sample1.swap_axes() : sample1;
  const FunctionalSample b = swap ? sample2.swap_axes() : sample2;
  const std::size_t M = a.M();
  for (std::size_t idx : indices) {
    if (idx >= M) {
      throw ValidationError("slice index " + std::to_string(idx) + " out of range for a " +
                            std::to_string(M) + "-point " + (swap ? "s" : "t") + "-grid");
    }
  }

  const MarginalEigenSystem sys = pooled_marginal_system(a, b, q);
  const std::size_t J = static_cast<std::size_t>(sys.J);
  const double w = a.grid_s().weight();
  const auto proj1 = kernels::project_s(a.values(), a.n(), a.N(), M, sys.retained_basis(), J, w);
  const auto proj2 = kernels::project_s(b.values(), b.n(), b.N(), M, sys.retained_basis(), J, w);

  std::vector<TestReport> reports(indices.size());
  std::vector<std::string> errors(indices.size());
  const auto count = static_cast<std::ptrdiff_t>(indices.size());
#pragma omp parallel for schedule(static) if (indices.size() > 8)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    const auto slot = static_cast<std::size_t>(r);
    const std::size_t idx = indices[slot];
    try {
      reports[slot] = profile_statistic(slice_scores(proj1, a.n(), J, M, idx),
                                        slice_scores(proj2, b.n(), J, M, idx));
      reports[slot].slice = SliceInfo{swap ? 's' : 't', idx, a.grid_t()[idx]};
      reports[slot].warnings = sys.warnings;
    } catch (const std::exception& e) {
      errors[slot] = e.what();
    }
  }
  for (std::size_t slot = 0; slot < errors.size(); ++slot) {
    if (!errors[slot].empty()) {
      std::ostringstream msg;
      msg << errors[slot] << " at " << (swap ? "s" : "t") << "="
          << a.grid_t()[indices[slot]];
      throw DegenerateError(msg.str());
    }
  }
  return reports;
}

std::vector<TestReport> profile_test_sweep(const FunctionalSample& sample1,
                                           const FunctionalSample& sample2, ProfileAxis axis,
                                           double q) {
  const std::size_t count = axis == ProfileAxis::fix_s ? sample1.N() : sample1.M();
  std::vector<std::size_t> indices(count);
  for (std::size_t k = 0; k < count; ++k) indices[k] = k;
  return profile_test_slices(sample1, sample2, axis, indices, q);
}

std::vector<double> estimate_profile_mean(const FunctionalSample& sample,
                                          const MarginalEigenSystem& eigensys,
                                          std::size_t t_star_index) {
  const ProfileScores scores = profile_scores(sample, eigensys, t_star_index);
  std::vector<double> curve(sample.N(), 0.0);
  for (std::size_t j = 0; j < scores.J; ++j) {
    const auto psi = eigensys.psi(j);
    for (std::size_t l = 0; l < curve.size(); ++l) curve[l] += scores.means[j] * psi[l];
  }
  return curve;
}

}  // namespace surftest
