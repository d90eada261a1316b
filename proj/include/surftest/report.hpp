#pragma once

#include <optional>
#include <string>
#include <vector>

namespace surftest {

/// One term of a chi-square statistic.
struct ComponentTerm {
  int j = 0;                // 1-based marginal component
  std::optional<int> k;     // 1-based second-stage component (globe test only)
  double score_difference = 0.0;
  double pooled_variance = 0.0;
};

/// Which slice a profile test was run on.
struct SliceInfo {
  char fixed_axis = 't';  // 't' tests mu(., t*); 's' tests mu(s*, .)
  std::size_t index = 0;
  double coordinate = 0.0;
};

struct TestReport {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  int J = 0;
  std::vector<int> K;  // empty for the profile test
  std::vector<ComponentTerm> per_component;
  std::vector<std::string> warnings;
  std::optional<SliceInfo> slice;
};

}  // namespace surftest
