#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rsk/domain.hpp"
#include "rsk/noise.hpp"
#include "rsk/paths.hpp"
#include "rsk/random.hpp"
#include "rsk/rigidity.hpp"

namespace rsk::feynman_kac {

struct FkParams {
  std::size_t n_paths = 256;  // paths per node (mean) or path pairs per node pair (variance)
  std::optional<int> n_steps;
  std::optional<double> bin_width;
  std::optional<double> spacing;           // quadrature spacing override
  std::optional<double> boundary_epsilon;  // boundary local time window
  bool symmetric = true;                   // variance: visit node pairs i <= j only
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct FkConfig {
  domain::DomainSpec spec;
  domain::PotentialSpec potential;
  noise::CovarianceModel model;
  FkParams params;
};

/// One joint realization from independent bridges Z^{x,x}_t and Zbar^{y,y}_t.
/// B is the log boundary weight (-inf when a Dirichlet side is hit).
struct FunctionalSample {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  bool separated = false;  // path ranges further apart than the support radius
};

struct TraceMoments {
  double mean = 0.0;             // trace_mean: E Tr
  double variance = 0.0;         // trace_variance / direct_variance: Var Tr
  double stderr_mean = 0.0;
  double stderr_variance = 0.0;
  std::size_t n_paths = 0;       // total paths or path pairs (realizations for the direct oracle)
  double t = 0.0;
};

/// Truncation radius for Cases 1 & 2: (kappa R)^a = 2 ln(1e10)/t + nu.
double truncation_radius(const domain::PotentialSpec& potential, double t);

struct Quadrature {
  std::vector<double> nodes;
  double weight = 0.0;  // midpoint cell width
};

/// Midpoint nodes with spacing min(sqrt(t)/2, b/64) on (0, b) or
/// min(sqrt(t)/2, 0.1) on (-R, R) / (0, R).
Quadrature quadrature(const FkConfig& config, double t);

FunctionalSample abcd_sample(double x, double y, double t, const FkConfig& config, Rng& rng);

TraceMoments trace_mean(double t, const FkConfig& config);
TraceMoments trace_variance(double t, const FkConfig& config);

/// trace_variance over t_list (at least 4 points in (0, 1]) with the log-log fit.
ScanResult variance_scan(const std::vector<double>& t_list, const FkConfig& config);

}  // namespace rsk::feynman_kac
