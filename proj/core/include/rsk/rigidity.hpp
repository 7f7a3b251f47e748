#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rsk/domain.hpp"
#include "rsk/noise.hpp"

namespace rsk {

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_ci_95 = 0.0;  // half width
  double r_squared = 0.0;
  std::size_t n_points = 0;
  std::size_t dropped = 0;  // nonpositive estimates left out of the fit
};

struct ScanPoint {
  double t = 0.0;
  double estimate = 0.0;
  double std_err = 0.0;
  std::size_t n = 0;
};

/// (t, estimate, std_err, n) series with its log-log fit. `samples` optionally
/// keeps the raw per-t realizations (normalized where the producer says so).
struct ScanResult {
  std::string label;
  std::vector<ScanPoint> points;
  std::optional<ExponentFit> fit;
  bool degenerate = false;  // every estimate is exactly zero
  std::vector<std::vector<double>> samples;
};

}  // namespace rsk

namespace rsk::rigidity {

/// Weighted least squares of log(estimate) on log(t) with weights
/// (estimate/std_err)^2 (uniform when any std_err is zero); 95% CI from the
/// Student-t law with n-2 degrees of freedom. Nonpositive estimates are
/// dropped when they are at most 20% of the points, otherwise StatisticsError.
ExponentFit fit_exponent(const ScanResult& scan);

/// Case 3: d - 1. Cases 1 & 2: d - 1/2 - 1/a for compactly supported noise
/// (white counts as compact), d - 1 - 2/a otherwise.
double predicted_exponent(const domain::DomainSpec& spec, const noise::CovarianceModel& model,
                          const std::optional<domain::GrowthCertificate>& growth);

/// Growth exponent above which the sufficient condition holds (Cases 1 & 2):
/// 2/(2d - 1) for compact support, 2/(d - 1) otherwise.
double growth_threshold(const noise::CovarianceModel& model);

struct RigidityVerdict {
  domain::Case case_tag;
  bool condition_holds;
  double threshold_exponent;  // 0 for Case 3
  std::string reason;
};

RigidityVerdict growth_verdict(const domain::DomainSpec& spec, const noise::CovarianceModel& model,
                               const std::optional<domain::GrowthCertificate>& growth);

struct ReportInput {
  domain::DomainSpec spec;
  noise::CovarianceModel model;
  std::optional<domain::GrowthCertificate> growth;
  double slope_tolerance = 0.1;  // observed slope must reach predicted - tolerance
};

struct RigidityReport {
  std::string text;
  std::string json;
  RigidityVerdict verdict;
  bool all_pass;
};

RigidityReport rigidity_report(const ReportInput& input, const std::vector<ScanResult>& scans);

}  // namespace rsk::rigidity
