#include <cmath>
#include <limits>
#include <string>

#include "surftest/core.hpp"

namespace surftest {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// Lower regularized gamma P(a, x) by its power series; converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int it = 0; it < kMaxIter; ++it) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by modified Lentz continued fraction; x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw ValidationError("gamma_q: shape must be positive");
  if (!(x >= 0.0)) throw ValidationError("gamma_q: argument must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chisq_survival(double x, ChiSquareRef ref) {
  if (ref.df < 1) {
    throw ValidationError("chi-square df must be >= 1, got " + std::to_string(ref.df));
  }
  if (!(x >= 0.0)) {
    throw ValidationError("chi-square statistic must be >= 0, got " + std::to_string(x));
  }
  return gamma_q(0.5 * ref.df, 0.5 * x);
}

}  // namespace surftest
