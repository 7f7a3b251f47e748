#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rsk::stats {

/// Streaming mean/variance with fourth central moment, mergeable in a fixed
/// order (Chan et al. pairwise update).
class RunningStats {
public:
  void add(double x);
  void merge(const RunningStats& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const;
  double stderr_mean() const;
  /// Standard error of the sample variance from the fourth central moment.
  double stderr_variance() const;

private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
};

struct TwoSampleResult {
  double statistic;
  double p_value;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov law.
TwoSampleResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Upper tail of the chi-square law with `dof` degrees of freedom.
double chi_square_sf(double x, double dof);

/// Pearson chi-square goodness of fit. `expected` holds cell probabilities,
/// renormalized over the listed cells (counts are conditional on them).
TwoSampleResult chi_square_gof(std::span<const std::size_t> counts, std::span<const double> expected);

double student_t_quantile(double p, double dof);
double normal_quantile(double p);

}  // namespace rsk::stats
