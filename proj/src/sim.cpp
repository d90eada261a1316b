#include "surftest/sim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "surftest/globe.hpp"
#include "surftest/profile.hpp"

namespace surftest {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::seed_seq make_seed(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  return std::seed_seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                       static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
}

// Basis values of one replicate model term: psi_j on s and phi_jk on t.
struct ModelTerm {
  std::vector<double> psi;               // on grid_s
  std::vector<std::vector<double>> phi;  // per k, on grid_t
  std::vector<double> sd;                // per k
};

std::vector<double> eval(const Grid& g, double (*f)(double)) {
  std::vector<double> out(g.size());
  for (std::size_t l = 0; l < g.size(); ++l) out[l] = f(g[l]);
  return out;
}

// Fills replicate i with mean_shift * (s + t) + sum over terms of xi_j(t) psi_j(s).
void draw_replicate(FunctionalSample& sample, std::size_t i, const std::vector<ModelTerm>& terms,
                    double mean_shift, StreamRng& rng) {
  const std::size_t N = sample.N(), M = sample.M();
  std::vector<std::vector<double>> xi(terms.size(), std::vector<double>(M, 0.0));
  for (std::size_t j = 0; j < terms.size(); ++j) {
    for (std::size_t k = 0; k < terms[j].phi.size(); ++k) {
      const double chi = terms[j].sd[k] * rng.normal();
      for (std::size_t l2 = 0; l2 < M; ++l2) xi[j][l2] += chi * terms[j].phi[k][l2];
    }
  }
  const auto& gs = sample.grid_s();
  const auto& gt = sample.grid_t();
  for (std::size_t l1 = 0; l1 < N; ++l1) {
    for (std::size_t l2 = 0; l2 < M; ++l2) {
      double v = mean_shift * (gs[l1] + gt[l2]);
      for (std::size_t j = 0; j < terms.size(); ++j) v += xi[j][l2] * terms[j].psi[l1];
      sample(i, l1, l2) = v;
    }
  }
}

std::pair<FunctionalSample, FunctionalSample> generate(std::size_t n1, std::size_t n2,
                                                       double delta, const Grid& grid_s,
                                                       const Grid& grid_t,
                                                       const std::vector<ModelTerm>& terms1,
                                                       const std::vector<ModelTerm>& terms2,
                                                       StreamRng& rng) {
  auto g1 = FunctionalSample::zeros(n1, grid_s, grid_t, "group1");
  auto g2 = FunctionalSample::zeros(n2, grid_s, grid_t, "group2");
  for (std::size_t i = 0; i < n1; ++i) draw_replicate(g1, i, terms1, 0.0, rng);
  for (std::size_t i = 0; i < n2; ++i) draw_replicate(g2, i, terms2, delta, rng);
  return {std::move(g1), std::move(g2)};
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double s_squared(double s) { return s * s; }
double s_cubed(double s) { return s * s * s; }
double neg_sqrt2_cos2(double t) { return -std::numbers::sqrt2 * std::cos(kTwoPi * t); }
double sqrt2_cos2(double t) { return std::numbers::sqrt2 * std::cos(kTwoPi * t); }
double sqrt2_sin2(double t) { return std::numbers::sqrt2 * std::sin(kTwoPi * t); }
double two_cos4(double t) { return 2.0 * std::cos(2.0 * kTwoPi * t); }
double two_sin4(double t) { return 2.0 * std::sin(2.0 * kTwoPi * t); }

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream) {
  auto seq = make_seed(seed, stream);
  engine_.seed(seq);
}

double StreamRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double StreamRng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u, v, r2;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = v * scale;
  return u * scale;
}

std::pair<FunctionalSample, FunctionalSample> generate_example1(std::size_t n1, std::size_t n2,
                                                                double delta, const Grid& grid_s,
                                                                const Grid& grid_t,
                                                                StreamRng& rng) {
  const auto cos_term = eval(grid_t, neg_sqrt2_cos2);
  const auto sin_term = eval(grid_t, sqrt2_sin2);
  const std::vector<ModelTerm> terms{
      {eval(grid_s, s_squared), {cos_term, sin_term}, {std::sqrt(3.0), std::sqrt(1.5)}},
      {eval(grid_s, s_cubed), {cos_term, sin_term}, {std::sqrt(2.0), 1.0}}};
  return generate(n1, n2, delta, grid_s, grid_t, terms, terms, rng);
}

std::pair<FunctionalSample, FunctionalSample> generate_example2(std::size_t n1, std::size_t n2,
                                                                double delta, const Grid& grid_s,
                                                                const Grid& grid_t,
                                                                StreamRng& rng) {
  const std::vector<ModelTerm> terms1{
      {eval(grid_s, s_squared),
       {eval(grid_t, sqrt2_cos2), eval(grid_t, two_cos4)},
       {std::sqrt(3.0), std::sqrt(1.5)}},
      {eval(grid_s, s_cubed),
       {eval(grid_t, sqrt2_sin2), eval(grid_t, two_sin4)},
       {std::sqrt(2.0), 1.0}}};
  const std::vector<ModelTerm> terms2{terms1.front()};
  return generate(n1, n2, delta, grid_s, grid_t, terms1, terms2, rng);
}

void SimConfig::validate() const {
  if (example != 1 && example != 2) {
    throw ValidationError("example must be 1 or 2, got " + std::to_string(example));
  }
  if (n1 < 2 || n2 < 2) throw ValidationError("group sizes must be at least 2");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be >= 0");
  if (reps < 1) throw ValidationError("reps must be positive");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("level must lie in (0,1)");
  if (N < 2 || M < 2) throw ValidationError("grids need at least 2 points");
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("q must lie in (0,1)");
  if (profile_index && *profile_index >= M) {
    throw ValidationError("profile index " + std::to_string(*profile_index) +
                          " out of range for a " + std::to_string(M) + "-point t-grid");
  }
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ReplicateOutcome run_replicate(const SimConfig& config, std::size_t replicate) {
  const Grid grid_s = Grid::uniform(0.0, 1.0, config.N);
  const Grid grid_t = Grid::uniform(0.0, 1.0, config.M);
  StreamRng rng(config.seed, replicate);
  auto [g1, g2] = config.example == 1
                      ? generate_example1(config.n1, config.n2, config.delta, grid_s, grid_t, rng)
                      : generate_example2(config.n1, config.n2, config.delta, grid_s, grid_t, rng);
  TestReport report;
  if (config.profile_index) {
    report = profile_test_slices(g1, g2, ProfileAxis::fix_t, {*config.profile_index},
                                 config.q)
                 .front();
  } else {
    report = globe_test(g1, g2, config.q);
  }
  return {report.statistic, report.df, report.p_value};
}

SimReport run_monte_carlo(const SimConfig& config) {
  config.validate();
  const std::size_t reps = config.reps;
  std::vector<ReplicateOutcome> outcomes(reps);
  std::vector<std::string> errors(reps);
  const auto count = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    const auto slot = static_cast<std::size_t>(r);
    try {
      outcomes[slot] = run_replicate(config, slot);
    } catch (const std::exception& e) {
      errors[slot] = e.what();
    }
  }

  SimReport report;
  report.reps = reps;
  double stat_sum = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    if (!errors[r].empty()) {
      throw DegenerateError("replicate " + std::to_string(r) + ": " + errors[r]);
    }
    const auto& o = outcomes[r];
    if (o.p_value < config.level) ++report.rejections;
    ++report.df_histogram[o.df];
    stat_sum += o.statistic;
    report.statistics.push_back(o.statistic);
    report.p_values.push_back(o.p_value);
    report.dfs.push_back(o.df);
  }
  report.rejection_rate = static_cast<double>(report.rejections) / static_cast<double>(reps);
  report.wilson_ci_95 = wilson_interval(report.rejections, reps);
  report.mean_statistic = stat_sum / static_cast<double>(reps);
  return report;
}

}  // namespace surftest
