#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace tpc::stats {

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, std::size_t dof);

/// Two-sample homogeneity test over the union of keys. Bins whose pooled
/// count is below `min_pooled` are merged into one bin.
ChiSquare chi_square_homogeneity(const std::map<std::string, std::size_t>& first,
                                 const std::map<std::string, std::size_t>& second, std::size_t min_pooled = 10);

/// Goodness of fit of `observed` counts to `expected_probs` (same length, sums to 1).
ChiSquare chi_square_gof(const std::vector<std::size_t>& observed, const std::vector<double>& expected_probs);

struct Proportion {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials); }
  /// Standard error sqrt(p(1-p)/n) at the supplied true p.
  double sigma_at(double p) const;
  /// Wilson score interval at ~95%.
  std::pair<double, double> wilson95() const;
};

/// Runs fn(i) for i in [0, count) on up to hardware_concurrency threads.
/// fn must not share mutable state between indices.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace tpc::stats
