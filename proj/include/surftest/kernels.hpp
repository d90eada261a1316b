#pragma once

// Data-parallel inner loops shared by the test statistics. Every kernel has
// an OpenMP version (namespace kernels) and a plain-loop reference with the
// identical contract (namespace kernels::serial) that the tests and the
// benchmark compare against.
//
// Work is split into blocks whose shape depends only on the problem size, so
// results are bitwise identical for any thread count.

#include <cstddef>
#include <span>
#include <vector>

namespace surftest::kernels {

/// G(h, l) = 1/(n M) sum_i sum_l2 X(i, h, l2) X(i, l, l2) for a block laid out
/// (i, l1, l2). Returns N x N row-major, exactly symmetric.
std::vector<double> marginal_gram(std::span<const double> values, std::size_t n,
                                  std::size_t N, std::size_t M);

/// out(j, i, l2) = weight * sum_l1 X(i, l1, l2) basis(j, l1), basis J x N.
/// Returns a J x n x M block.
std::vector<double> project_s(std::span<const double> values, std::size_t n,
                              std::size_t N, std::size_t M,
                              std::span<const double> basis, std::size_t J,
                              double weight);

/// G(h, l) = 1/n sum_i c(i, h) c(i, l) for n curves of length M.
std::vector<double> curve_gram(std::span<const double> curves, std::size_t n,
                               std::size_t M);

/// out(i, k) = weight * sum_l c(i, l) basis(k, l), basis K x M. Returns n x K.
std::vector<double> project_t(std::span<const double> curves, std::size_t n,
                              std::size_t M, std::span<const double> basis,
                              std::size_t K, double weight);

namespace serial {

std::vector<double> marginal_gram(std::span<const double> values, std::size_t n,
                                  std::size_t N, std::size_t M);
std::vector<double> project_s(std::span<const double> values, std::size_t n,
                              std::size_t N, std::size_t M,
                              std::span<const double> basis, std::size_t J,
                              double weight);
std::vector<double> curve_gram(std::span<const double> curves, std::size_t n,
                               std::size_t M);
std::vector<double> project_t(std::span<const double> curves, std::size_t n,
                              std::size_t M, std::span<const double> basis,
                              std::size_t K, double weight);

}  // namespace serial

/// Threads available to the kernels (1 when built without OpenMP).
int max_threads();

}  // namespace surftest::kernels
