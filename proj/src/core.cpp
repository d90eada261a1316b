#include "surftest/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace surftest {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw ValidationError("grid needs at least 2 points, got " +
                          std::to_string(points_.size()));
  }
  for (std::size_t l = 0; l < points_.size(); ++l) {
    if (!std::isfinite(points_[l])) {
      throw ValidationError("grid point " + std::to_string(l) + " is not finite");
    }
    if (l > 0 && !(points_[l] > points_[l - 1])) {
      std::ostringstream msg;
      msg << "grid not strictly increasing at index " << l << " (" << points_[l - 1]
          << " then " << points_[l] << ")";
      throw ValidationError(msg.str());
    }
  }
  spacing_ = range() / static_cast<double>(points_.size() - 1);
  double worst = 0.0;
  std::size_t worst_at = 0;
  for (std::size_t l = 1; l < points_.size(); ++l) {
    const double dev = std::abs((points_[l] - points_[l - 1]) - spacing_);
    if (dev > worst) {
      worst = dev;
      worst_at = l;
    }
  }
  if (worst > 1e-12 * range()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "grid not equispaced: max spacing deviation " << worst << " at point "
        << points_[worst_at] << " (index " << worst_at << ")";
    throw ValidationError(msg.str());
  }
}

Grid Grid::uniform(double lo, double hi, std::size_t count) {
  if (count < 2) throw ValidationError("grid needs at least 2 points");
  std::vector<double> pts(count);
  const double h = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t l = 0; l < count; ++l) pts[l] = lo + h * static_cast<double>(l);
  pts.back() = hi;
  return Grid(std::move(pts));
}

std::size_t Grid::nearest_index(double x) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it == points_.begin()) return 0;
  if (it == points_.end()) return points_.size() - 1;
  const auto hi_idx = static_cast<std::size_t>(it - points_.begin());
  return (x - points_[hi_idx - 1] <= points_[hi_idx] - x) ? hi_idx - 1 : hi_idx;
}

bool Grid::matches(const Grid& other) const {
  if (size() != other.size()) return false;
  const double tol = 1e-12 * std::max(range(), other.range());
  for (std::size_t l = 0; l < size(); ++l) {
    if (std::abs(points_[l] - other.points_[l]) > tol) return false;
  }
  return true;
}

FunctionalSample::FunctionalSample(std::vector<double> values, Grid grid_s, Grid grid_t,
                                   std::string label)
    : values_(std::move(values)),
      grid_s_(std::move(grid_s)),
      grid_t_(std::move(grid_t)),
      label_(std::move(label)) {
  const std::size_t cell = grid_s_.size() * grid_t_.size();
  if (cell == 0 || values_.size() % cell != 0 || values_.empty()) {
    throw ValidationError("sample block of " + std::to_string(values_.size()) +
                          " values does not tile a " + std::to_string(grid_s_.size()) +
                          " x " + std::to_string(grid_t_.size()) + " grid");
  }
  n_ = values_.size() / cell;
  for (std::size_t idx = 0; idx < values_.size(); ++idx) {
    if (!std::isfinite(values_[idx])) {
      const std::size_t i = idx / cell;
      const std::size_t l1 = (idx % cell) / grid_t_.size();
      const std::size_t l2 = idx % grid_t_.size();
      std::ostringstream msg;
      msg << "non-finite value in sample '" << label_ << "' at replicate " << i
          << " (s=" << grid_s_[l1] << ", t=" << grid_t_[l2] << ")";
      throw ValidationError(msg.str());
    }
  }
}

FunctionalSample FunctionalSample::zeros(std::size_t n, Grid grid_s, Grid grid_t,
                                         std::string label) {
  std::vector<double> v(n * grid_s.size() * grid_t.size(), 0.0);
  return FunctionalSample(std::move(v), std::move(grid_s), std::move(grid_t),
                          std::move(label));
}

FunctionalSample FunctionalSample::swap_axes() const {
  std::vector<double> out(values_.size());
  const std::size_t n_s = N(), n_t = M();
  for (std::size_t i = 0; i < n_; ++i) {
    const double* src = values_.data() + i * n_s * n_t;
    double* dst = out.data() + i * n_s * n_t;
    for (std::size_t l1 = 0; l1 < n_s; ++l1)
      for (std::size_t l2 = 0; l2 < n_t; ++l2) dst[l2 * n_s + l1] = src[l1 * n_t + l2];
  }
  return FunctionalSample(std::move(out), grid_t_, grid_s_, label_);
}

void FunctionalSample::require_replicates(std::size_t min_n) const {
  if (n_ < min_n) {
    throw ValidationError("sample '" + label_ + "' has " + std::to_string(n_) +
                          " replicates; at least " + std::to_string(min_n) + " required");
  }
}

Surface group_mean(const FunctionalSample& sample) {
  const std::size_t cell = sample.N() * sample.M();
  Surface mean{std::vector<double>(cell, 0.0), sample.N(), sample.M()};
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const auto rep = sample.replicate(i);
    for (std::size_t c = 0; c < cell; ++c) mean.values[c] += rep[c];
  }
  const double inv_n = 1.0 / static_cast<double>(sample.n());
  for (double& v : mean.values) v *= inv_n;
  return mean;
}

FunctionalSample center(const FunctionalSample& sample) {
  const Surface mean = group_mean(sample);
  const std::size_t cell = mean.values.size();
  std::vector<double> out(sample.values().begin(), sample.values().end());
  for (std::size_t i = 0; i < sample.n(); ++i) {
    double* rep = out.data() + i * cell;
    for (std::size_t c = 0; c < cell; ++c) rep[c] -= mean.values[c];
  }
  return FunctionalSample(std::move(out), sample.grid_s(), sample.grid_t(), sample.label());
}

double quad_inner_product(std::span<const double> f, std::span<const double> g,
                          const Grid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    throw ValidationError("inner product length mismatch: " + std::to_string(f.size()) +
                          ", " + std::to_string(g.size()) + " on a grid of " +
                          std::to_string(grid.size()));
  }
  double acc = 0.0;
  for (std::size_t l = 0; l < f.size(); ++l) acc += f[l] * g[l];
  return acc * grid.weight();
}

}  // namespace surftest
