#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rsk/domain.hpp"
#include "rsk/feynman_kac.hpp"
#include "rsk/noise.hpp"
#include "rsk/random.hpp"

namespace rsk::spectrum {

/// Symmetric tridiagonal finite-difference matrix of -1/2 d^2/dx^2 + V + xi.
/// Robin ends keep the boundary node (ghost-point elimination, symmetrized
/// with trapezoid weights); Dirichlet ends, including the artificial ends of
/// truncated unbounded domains, drop it.
struct DiscreteOperator {
  double lower = 0.0, upper = 0.0;  // computational interval
  double h = 0.0;
  std::vector<double> nodes;
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;  // size n - 1
  bool robin_lower = false, robin_upper = false;

  std::size_t size() const { return diagonal.size(); }
};

/// Grid, kinetic part and potential, without noise.
DiscreteOperator discretize_deterministic(const domain::DomainSpec& spec, const domain::PotentialSpec& potential,
                                          std::size_t n, std::optional<double> radius = std::nullopt);

/// Noise cells of the grid nodes: [x_i - h/2, x_i + h/2] clipped to the domain.
std::vector<noise::StepFunction> node_cells(const DiscreteOperator& op);

/// Truncation radius used when none is given: V reaches 50 + nu, i.e. (kappa R)^a = 50 + nu.
double default_radius(const domain::PotentialSpec& potential);

/// Full operator with one draw of cell-averaged noise (nullopt model = no noise).
DiscreteOperator discretize(const domain::DomainSpec& spec, const domain::PotentialSpec& potential,
                            const std::optional<noise::CovarianceModel>& model, std::size_t n,
                            std::optional<double> radius, Rng& rng);

/// Number of eigenvalues strictly below x (Sturm sequence).
std::size_t sturm_count(const DiscreteOperator& op, double x);

/// k smallest eigenvalues by bisection, ascending, each to max(1e-10, 4 eps |lambda|).
std::vector<double> eigenvalues(const DiscreteOperator& op, std::size_t k);

/// sum_k exp(-t lambda_k), skipping eigenvalues above lambda_1 + 45/t.
double direct_trace(const DiscreteOperator& op, double t);

struct DirectConfig {
  domain::DomainSpec spec;
  domain::PotentialSpec potential;
  std::optional<noise::CovarianceModel> model;
  std::size_t n = 256;
  std::optional<double> radius;
  std::size_t n_realizations = 500;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Sample mean and variance of direct_trace over independent noise draws;
/// the noise factorization is computed once.
feynman_kac::TraceMoments direct_variance(double t, const DirectConfig& config);

/// Relative change of the noiseless trace when the truncation radius grows from R to 1.5 R.
double radius_sensitivity(const domain::DomainSpec& spec, const domain::PotentialSpec& potential, std::size_t n,
                          double radius, double t);

}  // namespace rsk::spectrum
