#include <Eigen/Dense>

#include "surftest/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace surftest::kernels {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;

constexpr std::ptrdiff_t kRowBlock = 16;

// Fills the upper triangle of `G` block-row by block-row from G = A A^T / scale,
// then mirrors it. Block boundaries depend only on the row count.
void blocked_gram(const ConstRowMap& A, double scale, RowMap& G) {
  const auto rows = A.rows();
  const auto blocks = (rows + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(dynamic, 1) if (blocks > 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const auto h0 = b * kRowBlock;
    const auto len = std::min(kRowBlock, rows - h0);
    G.block(h0, h0, len, rows - h0).noalias() =
        A.middleRows(h0, len) * A.middleRows(h0, rows - h0).transpose();
  }
  const double inv = 1.0 / scale;
  for (std::ptrdiff_t h = 0; h < rows; ++h) {
    for (std::ptrdiff_t l = h; l < rows; ++l) {
      G(h, l) *= inv;
      G(l, h) = G(h, l);
    }
  }
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<double> marginal_gram(std::span<const double> values, std::size_t n,
                                  std::size_t N, std::size_t M) {
  // Regroup (i, l1, l2) into an N x (n M) matrix so the Gram is one product.
  std::vector<double> stacked(values.size());
  const auto reps = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for if (n * N * M > 100000)
  for (std::ptrdiff_t i = 0; i < reps; ++i) {
    for (std::size_t l1 = 0; l1 < N; ++l1) {
      const double* src = values.data() + (static_cast<std::size_t>(i) * N + l1) * M;
      double* dst = stacked.data() + l1 * n * M + static_cast<std::size_t>(i) * M;
      std::copy(src, src + M, dst);
    }
  }
  std::vector<double> out(N * N, 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(N);
  ConstRowMap A(stacked.data(), rows, static_cast<std::ptrdiff_t>(n * M));
  RowMap G(out.data(), rows, rows);
  blocked_gram(A, static_cast<double>(n * M), G);
  return out;
}

std::vector<double> project_s(std::span<const double> values, std::size_t n,
                              std::size_t N, std::size_t M,
                              std::span<const double> basis, std::size_t J,
                              double weight) {
  std::vector<double> out(J * n * M, 0.0);
  const auto Jd = static_cast<std::ptrdiff_t>(J);
  const auto Nd = static_cast<std::ptrdiff_t>(N);
  const auto Md = static_cast<std::ptrdiff_t>(M);
  ConstRowMap B(basis.data(), Jd, Nd);
  const auto reps = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n * N * M * J > 200000)
  for (std::ptrdiff_t i = 0; i < reps; ++i) {
    ConstRowMap X(values.data() + static_cast<std::size_t>(i) * N * M, Nd, Md);
    const RowMatrix scores = weight * (B * X);
    for (std::ptrdiff_t j = 0; j < Jd; ++j) {
      double* dst = out.data() + (static_cast<std::size_t>(j) * n + static_cast<std::size_t>(i)) * M;
      for (std::ptrdiff_t t = 0; t < Md; ++t) dst[t] = scores(j, t);
    }
  }
  return out;
}

std::vector<double> curve_gram(std::span<const double> curves, std::size_t n,
                               std::size_t M) {
  // Transpose to M x n so rows index the grid.
  std::vector<double> cols(n * M);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < M; ++t) cols[t * n + i] = curves[i * M + t];
  std::vector<double> out(M * M, 0.0);
  const auto Md = static_cast<std::ptrdiff_t>(M);
  ConstRowMap A(cols.data(), Md, static_cast<std::ptrdiff_t>(n));
  RowMap G(out.data(), Md, Md);
  blocked_gram(A, static_cast<double>(n), G);
  return out;
}

std::vector<double> project_t(std::span<const double> curves, std::size_t n,
                              std::size_t M, std::span<const double> basis,
                              std::size_t K, double weight) {
  std::vector<double> out(n * K, 0.0);
  const auto nd = static_cast<std::ptrdiff_t>(n);
  const auto Md = static_cast<std::ptrdiff_t>(M);
  const auto Kd = static_cast<std::ptrdiff_t>(K);
  ConstRowMap C(curves.data(), nd, Md);
  ConstRowMap B(basis.data(), Kd, Md);
  RowMap O(out.data(), nd, Kd);
#pragma omp parallel for schedule(static) if (n * M * K > 200000)
  for (std::ptrdiff_t i = 0; i < nd; ++i) {
    O.row(i).noalias() = weight * (C.row(i) * B.transpose());
  }
  return out;
}

}  // namespace surftest::kernels
