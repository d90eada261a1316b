#include "surftest/kernels.hpp"

namespace surftest::kernels::serial {

std::vector<double> marginal_gram(std::span<const double> values, std::size_t n,
                                  std::size_t N, std::size_t M) {
  std::vector<double> G(N * N, 0.0);
  for (std::size_t h = 0; h < N; ++h) {
    for (std::size_t l = h; l < N; ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* a = values.data() + (i * N + h) * M;
        const double* b = values.data() + (i * N + l) * M;
        for (std::size_t t = 0; t < M; ++t) acc += a[t] * b[t];
      }
      G[h * N + l] = G[l * N + h] = acc / static_cast<double>(n * M);
    }
  }
  return G;
}

std::vector<double> project_s(std::span<const double> values, std::size_t n,
                              std::size_t N, std::size_t M,
                              std::span<const double> basis, std::size_t J,
                              double weight) {
  std::vector<double> out(J * n * M, 0.0);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < M; ++t) {
        double acc = 0.0;
        for (std::size_t l = 0; l < N; ++l)
          acc += values[(i * N + l) * M + t] * basis[j * N + l];
        out[(j * n + i) * M + t] = weight * acc;
      }
  return out;
}

std::vector<double> curve_gram(std::span<const double> curves, std::size_t n,
                               std::size_t M) {
  std::vector<double> G(M * M, 0.0);
  for (std::size_t h = 0; h < M; ++h)
    for (std::size_t l = h; l < M; ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += curves[i * M + h] * curves[i * M + l];
      G[h * M + l] = G[l * M + h] = acc / static_cast<double>(n);
    }
  return G;
}

std::vector<double> project_t(std::span<const double> curves, std::size_t n,
                              std::size_t M, std::span<const double> basis,
                              std::size_t K, double weight) {
  std::vector<double> out(n * K, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < K; ++k) {
      double acc = 0.0;
      for (std::size_t l = 0; l < M; ++l) acc += curves[i * M + l] * basis[k * M + l];
      out[i * K + k] = weight * acc;
    }
  return out;
}

}  // namespace surftest::kernels::serial
