#pragma once

#include <map>
#include <optional>
#include <vector>

#include "rsk/domain.hpp"
#include "rsk/noise.hpp"
#include "rsk/random.hpp"

namespace rsk::paths {

/// Discretized path on [0, t] with n_steps equal steps. `unfolded` is the
/// underlying full-line Brownian path; `values` is its image in the domain
/// (identity, |.| or the reflection fold onto [0, b]).
struct BridgePath {
  double t = 0.0;
  int n_steps = 0;
  std::vector<double> values;
  std::vector<double> unfolded;
  double image_endpoint = 0.0;  // unfolded endpoint chosen from the image set
  domain::DomainSpec spec = domain::DomainSpec::full_line();

  double dt() const { return t / n_steps; }
};

struct LocalTimeField {
  noise::StepFunction occupation;
  std::map<double, double> boundary_local_times;  // c -> L^c_t for c on the boundary
};

/// Default discretization: h = sqrt(t)/8, n = max(64, ceil(256 t)).
double default_bin_width(double t);
int default_steps(double t);

/// Maps a full-line point into the domain (identity, |z|, or the fold onto [0, b]).
double fold(const domain::DomainSpec& spec, double z);

/// Conditioned path Z^{x,y}_t: endpoint image e drawn with probability
/// proportional to G_t(x - e), a full-line bridge x -> e, then folded.
BridgePath sample_bridge(const domain::DomainSpec& spec, double x, double y, double t, int n_steps, Rng& rng);
void sample_bridge_into(const domain::DomainSpec& spec, double x, double y, double t, int n_steps, Rng& rng,
                        BridgePath& out);

/// Unconditioned process Z^x on [0, t]: Brownian motion from x, folded into the domain.
BridgePath sample_process(const domain::DomainSpec& spec, double x, double t, int n_steps, Rng& rng);
void sample_process_into(const domain::DomainSpec& spec, double x, double t, int n_steps, Rng& rng, BridgePath& out);

/// Occupation density on bins [k h, (k+1) h): each step deposits dt/h at the
/// bin holding its midpoint. Boundary local times use the default epsilon.
LocalTimeField occupation_local_time(const BridgePath& path, double h);
/// Occupation density only, written into `out` (buffers reused).
void occupation_into(const BridgePath& path, double h, noise::StepFunction& out);

/// (1/2 eps) * time spent within eps of c (trapezoid node weights); eps defaults to sqrt(dt).
double boundary_local_time(const BridgePath& path, double c, std::optional<double> epsilon = std::nullopt);

/// Conditional probability that the continuous path avoids every Dirichlet
/// boundary given its nodes: product over steps of 1 - exp(-2 a_i a_{i+1} / dt),
/// with a_i the distances of the unfolded nodes to the nearest images of the
/// Dirichlet points. A step whose endpoints lie on different sides of an image
/// gives 0. Returns 1 without Dirichlet sides.
double dirichlet_survival_weight(const BridgePath& path);

}  // namespace rsk::paths
