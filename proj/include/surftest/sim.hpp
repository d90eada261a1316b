#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "surftest/core.hpp"

namespace surftest {

/// Independent random stream keyed by (seed, stream id). Streams for
/// different ids do not depend on the order in which they are created.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct SimConfig {
  int example = 1;
  std::size_t n1 = 100;
  std::size_t n2 = 100;
  double delta = 0.0;
  std::size_t reps = 1000;
  double level = 0.05;
  std::size_t N = 100;
  std::size_t M = 50;
  std::uint64_t seed = 1;
  /// Empty runs the globe test; a value runs the profile test at that t-index.
  std::optional<std::size_t> profile_index;
  double q = 0.9;

  void validate() const;
};

struct SimReport {
  double rejection_rate = 0.0;
  std::size_t rejections = 0;
  std::size_t reps = 0;
  std::pair<double, double> wilson_ci_95{0.0, 1.0};
  std::map<int, std::size_t> df_histogram;
  double mean_statistic = 0.0;
  // Per-replicate values in replicate order.
  std::vector<double> statistics;
  std::vector<double> p_values;
  std::vector<int> dfs;
};

/// Example 1: identical covariances; group 2 carries the mean delta (s + t).
std::pair<FunctionalSample, FunctionalSample> generate_example1(std::size_t n1, std::size_t n2,
                                                                double delta, const Grid& grid_s,
                                                                const Grid& grid_t,
                                                                StreamRng& rng);

/// Example 2: group 2 keeps only the first marginal term, so covariances differ.
std::pair<FunctionalSample, FunctionalSample> generate_example2(std::size_t n1, std::size_t n2,
                                                                double delta, const Grid& grid_s,
                                                                const Grid& grid_t,
                                                                StreamRng& rng);

/// Wilson score interval at 95% for `successes` out of `trials`.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials);

/// Replicates run in parallel; replicate r draws from StreamRng(seed, r), so
/// the report does not depend on thread count or execution order.
SimReport run_monte_carlo(const SimConfig& config);

/// Statistic, df and p-value of a single replicate (used by run_monte_carlo).
struct ReplicateOutcome {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};
ReplicateOutcome run_replicate(const SimConfig& config, std::size_t replicate);

}  // namespace surftest
