#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace surftest {

// Input that violates a documented precondition (bad grid, malformed file,
// mismatched shapes). The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A statistic could not be formed because the data carry no variance in a
// required direction. The CLI maps this to exit code 2.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Equispaced, strictly increasing set of observation coordinates.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<double> points);

  /// `count` points from `lo` to `hi` inclusive.
  static Grid uniform(double lo, double hi, std::size_t count);

  std::size_t size() const { return points_.size(); }
  const std::vector<double>& points() const { return points_; }
  double operator[](std::size_t l) const { return points_[l]; }
  double spacing() const { return spacing_; }
  double lo() const { return points_.front(); }
  double hi() const { return points_.back(); }
  double range() const { return hi() - lo(); }

  /// Quadrature weight attached to every grid point: range / L, so the L
  /// uniform weights sum to the range.
  double weight() const { return range() / static_cast<double>(points_.size()); }

  /// Index of the grid point closest to `x` (ties go to the lower index).
  std::size_t nearest_index(double x) const;

  /// True when both grids have the same length and their points agree to
  /// 1e-12 of the range.
  bool matches(const Grid& other) const;

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<double> points_;
  double spacing_ = 0.0;
};

/// n replicates of a surface observed on grid_s x grid_t. Values are stored
/// replicate-major, then s, then t: index (i * N + l1) * M + l2.
class FunctionalSample {
 public:
  FunctionalSample() = default;
  FunctionalSample(std::vector<double> values, Grid grid_s, Grid grid_t,
                   std::string label = {});

  /// Zero-filled sample.
  static FunctionalSample zeros(std::size_t n, Grid grid_s, Grid grid_t,
                                std::string label = {});

  std::size_t n() const { return n_; }
  std::size_t N() const { return grid_s_.size(); }
  std::size_t M() const { return grid_t_.size(); }
  const Grid& grid_s() const { return grid_s_; }
  const Grid& grid_t() const { return grid_t_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  double operator()(std::size_t i, std::size_t l1, std::size_t l2) const {
    return values_[(i * N() + l1) * M() + l2];
  }
  double& operator()(std::size_t i, std::size_t l1, std::size_t l2) {
    return values_[(i * N() + l1) * M() + l2];
  }

  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  /// Contiguous N x M block of replicate i.
  std::span<const double> replicate(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * N() * M(), N() * M());
  }

  /// Same data with the roles of s and t exchanged (M x N surfaces).
  FunctionalSample swap_axes() const;

  /// Throws ValidationError when the sample has fewer than `min_n` replicates.
  void require_replicates(std::size_t min_n) const;

  bool operator==(const FunctionalSample& other) const = default;

 private:
  std::vector<double> values_;
  Grid grid_s_;
  Grid grid_t_;
  std::string label_;
  std::size_t n_ = 0;
};

/// Row-major N x M surface on a pair of grids.
struct Surface {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

/// Reference chi-square distribution for calibrating a statistic.
struct ChiSquareRef {
  int df = 1;
};

Surface group_mean(const FunctionalSample& sample);

FunctionalSample center(const FunctionalSample& sample);

/// Uniformly weighted dot product approximating the integral of f * g.
double quad_inner_product(std::span<const double> f, std::span<const double> g,
                          const Grid& grid);

/// Regularized upper incomplete gamma function Q(a, x).
double gamma_q(double a, double x);

/// P(chi^2_df > x).
double chisq_survival(double x, ChiSquareRef ref);

}  // namespace surftest
