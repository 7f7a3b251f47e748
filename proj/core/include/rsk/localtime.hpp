#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rsk/domain.hpp"
#include "rsk/noise.hpp"
#include "rsk/paths.hpp"
#include "rsk/random.hpp"
#include "rsk/rigidity.hpp"

namespace rsk::localtime {

/// Discretization and parallel layout shared by the Monte Carlo studies.
/// Unset n_steps / bin_width fall back to the per-t defaults of `paths`.
struct StudyParams {
  std::size_t n_paths = 10000;
  std::optional<int> n_steps;
  std::optional<double> bin_width;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct ScalingSample {
  double q;
  double t;
  double value;       // ||L_t||_q^2
  double normalized;  // value / t^(1 + 1/q)
};

/// (h sum density^q)^(2/q); q must lie in [1, 2].
double lq_norm_sq(const noise::StepFunction& density, double q);
double lq_norm_sq(const paths::LocalTimeField& field, double q);

/// One draw of R_q. Cases 1 & 2: 2^(2(q-1)/q) ||L_1(B^0)||_q^2. Case 3 on (0, b):
/// c L^(2(1-1/q)) + c (2 L^2 + 2 (M - m)^2)^(2(1-1/q)) with L the largest bin
/// density of B^0 on [0, 1], M - m its range and c = 4 max(1, b^(q-1))^(2/q).
double rq_sample(const domain::DomainSpec& spec, double q, Rng& rng, std::optional<int> n_steps = std::nullopt,
                 std::optional<double> bin_width = std::nullopt);

double rq_constant(double b, double q);

/// One realization of ||L_t(B^0)||_q^2 for a free Brownian motion from 0.
ScalingSample scaling_sample(double q, double t, Rng& rng, std::optional<int> n_steps = std::nullopt,
                             std::optional<double> bin_width = std::nullopt);

/// E ||L_t(B^0)||_q^2 per t with standard errors and the log-log fit (expected
/// slope 1 + 1/q). `samples[i]` keeps the normalized draws at t_list[i].
ScanResult scaling_study(double q, const std::vector<double>& t_list, const StudyParams& params);

/// Start-point grid used for the supremum: 9 points, spaced sqrt(t)/2 on the
/// line (centred at 0) and half-line, b/8 on the interval.
std::vector<double> start_grid(const domain::DomainSpec& spec, double t);

/// sup over the start grid of E^x ||L_t(Z)||_gamma^2 for the free (reflected)
/// process of the domain, per t; fit against d_exponent(model).
ScanResult gamma_lt_scaling(const noise::CovarianceModel& model, const domain::DomainSpec& spec,
                            const std::vector<double>& t_list, const StudyParams& params);

}  // namespace rsk::localtime
