#include "rsk/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsk/error.hpp"
#include "rsk/stats.hpp"

namespace rsk::feynman_kac {

using domain::Case;

double truncation_radius(const domain::PotentialSpec& potential, double t) {
  const auto& g = potential.growth();
  if (!g) throw ConfigError("unbounded domains need a potential with a growth certificate");
  const double target = 2.0 * std::log(1e10) / t + g->nu;
  const double r = std::pow(target, 1.0 / g->a) / g->kappa;
  if (!std::isfinite(r) || r > 1e6)
    throw ConfigError("growth certificate too weak: truncation radius " + std::to_string(r) + " exceeds 1e6");
  return r;
}

Quadrature quadrature(const FkConfig& config, double t) {
  if (!(t > 0.0)) throw InputError("t must be > 0");
  const auto& spec = config.spec;
  double lo = 0.0, hi = 0.0, spacing = 0.0;
  if (spec.kind() == Case::Interval) {
    hi = spec.length();
    spacing = std::min(std::sqrt(t) / 2.0, hi / 64.0);
  } else {
    const double r = truncation_radius(config.potential, t);
    lo = spec.kind() == Case::FullLine ? -r : 0.0;
    hi = r;
    spacing = std::min(std::sqrt(t) / 2.0, 0.1);
  }
  if (config.params.spacing) spacing = *config.params.spacing;
  if (!(spacing > 0.0)) throw InputError("quadrature spacing must be > 0");
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / spacing - 1e-9));
  if (n > 200000) throw ConfigError("quadrature grid too large");
  Quadrature q;
  q.weight = (hi - lo) / static_cast<double>(n);
  q.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) q.nodes[i] = lo + (static_cast<double>(i) + 0.5) * q.weight;
  return q;
}

namespace {

/// Per-path pieces of the exponent.
struct PathTerms {
  double v_integral = 0.0;  // <L, V>
  double log_boundary = 0.0;
  double lo = 0.0, hi = 0.0;  // path range
};

struct Workspace {
  paths::BridgePath path[2];
  noise::StepFunction occ[2];
};

PathTerms path_terms(const paths::BridgePath& p, const FkConfig& cfg) {
  PathTerms pt;
  const double dt = p.dt();
  const int n = p.n_steps;
  if (!cfg.potential.is_zero()) {
    double s = 0.0;
    for (int i = 0; i <= n; ++i) s += (i == 0 || i == n ? 0.5 : 1.0) * cfg.potential(p.values[i]);
    pt.v_integral = s * dt;
  }
  const auto [mn, mx] = std::minmax_element(p.values.begin(), p.values.end());
  pt.lo = *mn;
  pt.hi = *mx;

  double log_w = 0.0;
  const auto eps = cfg.params.boundary_epsilon;
  if (const auto* hl = std::get_if<domain::HalfLine>(&cfg.spec.variant())) {
    if (hl->alpha_bar != domain::kDirichlet) log_w += hl->alpha_bar * paths::boundary_local_time(p, 0.0, eps);
  } else if (const auto* iv = std::get_if<domain::Interval>(&cfg.spec.variant())) {
    if (iv->alpha_bar != domain::kDirichlet) log_w += iv->alpha_bar * paths::boundary_local_time(p, 0.0, eps);
    if (iv->beta_bar != domain::kDirichlet) log_w += iv->beta_bar * paths::boundary_local_time(p, iv->b, eps);
  }
  if (cfg.spec.has_dirichlet()) {
    const double w = paths::dirichlet_survival_weight(p);
    log_w = w > 0.0 ? log_w + std::log(w) : -std::numeric_limits<double>::infinity();
  }
  pt.log_boundary = log_w;
  return pt;
}

int steps_for(const FkConfig& cfg, double t) { return cfg.params.n_steps.value_or(paths::default_steps(t)); }
double bin_for(const FkConfig& cfg, double t) { return cfg.params.bin_width.value_or(paths::default_bin_width(t)); }

double self_norm(const noise::GridKernel& k, const noise::StepFunction& f, long off) {
  return std::max(0.0, k.inner(f.values, off, f.values, off));
}

FunctionalSample pair_sample(double x, double y, double t, const FkConfig& cfg, const noise::GridKernel& kernel,
                             Rng& rng, Workspace& ws) {
  const int n = steps_for(cfg, t);
  const double h = kernel.h();
  paths::sample_bridge_into(cfg.spec, x, x, t, n, rng, ws.path[0]);
  paths::sample_bridge_into(cfg.spec, y, y, t, n, rng, ws.path[1]);
  const PathTerms p = path_terms(ws.path[0], cfg), q = path_terms(ws.path[1], cfg);
  FunctionalSample s;
  s.A = -(p.v_integral + q.v_integral);
  s.B = p.log_boundary + q.log_boundary;
  if (s.B == -std::numeric_limits<double>::infinity()) return s;  // zero weight: C, D irrelevant
  paths::occupation_into(ws.path[0], h, ws.occ[0]);
  paths::occupation_into(ws.path[1], h, ws.occ[1]);
  const long o0 = std::lround(ws.occ[0].origin / h), o1 = std::lround(ws.occ[1].origin / h);
  s.C = 0.5 * (self_norm(kernel, ws.occ[0], o0) + self_norm(kernel, ws.occ[1], o1));
  const auto& k = cfg.model.support_radius();
  if (k) {
    const double gap = std::max(q.lo - p.hi, p.lo - q.hi);
    if (gap > *k) {
      s.separated = true;
      return s;
    }
  }
  s.D = kernel.inner(ws.occ[0].values, o0, ws.occ[1].values, o1);
  return s;
}

double pair_value(const FunctionalSample& s) {
  if (s.B == -std::numeric_limits<double>::infinity() || s.D == 0.0) return 0.0;
  return std::exp(s.A + s.B + s.C) * std::expm1(s.D);
}

void check_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("t must be > 0");
}

void check_config(const FkConfig& cfg) {
  if (cfg.spec.kind() != Case::Interval && !cfg.potential.growth())
    throw ConfigError("unbounded domains need a potential with a growth certificate");
  if (cfg.params.n_paths < 2) throw StatisticsError("need at least 2 paths per quadrature node");
}

}  // namespace

FunctionalSample abcd_sample(double x, double y, double t, const FkConfig& config, Rng& rng) {
  check_t(t);
  check_config(config);
  const noise::GridKernel kernel(config.model, bin_for(config, t), 64);
  Workspace ws;
  return pair_sample(x, y, t, config, kernel, rng, ws);
}

TraceMoments trace_mean(double t, const FkConfig& config) {
  check_t(t);
  check_config(config);
  const auto quad = quadrature(config, t);
  const noise::GridKernel kernel(config.model, bin_for(config, t), 64);
  const std::size_t m = quad.nodes.size();
  std::vector<stats::RunningStats> per_node(m);
  const int n = steps_for(config, t);
  const double h = kernel.h();
  parallel_for(m, config.params.threads, [&](std::size_t i) {
    Rng rng = Rng::stream(config.params.seed, i);
    const double x = quad.nodes[i];
    paths::BridgePath path;
    noise::StepFunction occ;
    for (std::size_t k = 0; k < config.params.n_paths; ++k) {
      paths::sample_bridge_into(config.spec, x, x, t, n, rng, path);
      const PathTerms pt = path_terms(path, config);
      double v = 0.0;
      if (pt.log_boundary != -std::numeric_limits<double>::infinity()) {
        paths::occupation_into(path, h, occ);
        const long off = std::lround(occ.origin / h);
        v = std::exp(-pt.v_integral + pt.log_boundary + 0.5 * self_norm(kernel, occ, off));
      }
      per_node[i].add(v);
    }
  });
  TraceMoments tm;
  tm.t = t;
  double var = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double w = quad.weight * domain::transition_kernel(config.spec, t, quad.nodes[i], quad.nodes[i]);
    tm.mean += w * per_node[i].mean();
    var += w * w * per_node[i].variance() / static_cast<double>(per_node[i].count());
    tm.n_paths += per_node[i].count();
  }
  tm.stderr_mean = std::sqrt(var);
  return tm;
}

TraceMoments trace_variance(double t, const FkConfig& config) {
  check_t(t);
  check_config(config);
  const auto quad = quadrature(config, t);
  const noise::GridKernel kernel(config.model, bin_for(config, t), 64);
  const std::size_t m = quad.nodes.size();
  std::vector<double> diag(m);
  for (std::size_t i = 0; i < m; ++i) diag[i] = domain::transition_kernel(config.spec, t, quad.nodes[i], quad.nodes[i]);

  // One task per row i; row i visits j >= i (symmetric) or every j.
  struct RowResult {
    double sum = 0.0, var = 0.0;
    std::size_t count = 0;
  };
  std::vector<RowResult> rows(m);
  const bool sym = config.params.symmetric;
  parallel_for(m, config.params.threads, [&](std::size_t i) {
    Workspace ws;
    RowResult r;
    for (std::size_t j = sym ? i : 0; j < m; ++j) {
      Rng rng = Rng::stream(config.params.seed, i * m + j);
      stats::RunningStats rs;
      for (std::size_t k = 0; k < config.params.n_paths; ++k)
        rs.add(pair_value(pair_sample(quad.nodes[i], quad.nodes[j], t, config, kernel, rng, ws)));
      const double mult = (sym && j != i) ? 2.0 : 1.0;
      const double w = mult * quad.weight * quad.weight * diag[i] * diag[j];
      r.sum += w * rs.mean();
      r.var += w * w * rs.variance() / static_cast<double>(rs.count());
      r.count += rs.count();
    }
    rows[i] = r;
  });
  TraceMoments tm;
  tm.t = t;
  double var = 0.0;
  for (const auto& r : rows) {
    tm.variance += r.sum;
    var += r.var;
    tm.n_paths += r.count;
  }
  tm.stderr_variance = std::sqrt(var);
  return tm;
}

ScanResult variance_scan(const std::vector<double>& t_list, const FkConfig& config) {
  if (t_list.size() < 4) throw InputError("variance_scan needs at least 4 t values");
  for (double t : t_list)
    if (!(t > 0.0 && t <= 1.0)) throw InputError("variance_scan times must lie in (0, 1]");
  ScanResult scan;
  scan.label = "variance_" + config.model.name();
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    FkConfig cfg = config;
    cfg.params.seed = splitmix64(config.params.seed ^ (0x9e3779b97f4a7c15ULL * (ti + 1)));
    const auto tm = trace_variance(t_list[ti], cfg);
    scan.points.push_back({t_list[ti], tm.variance, tm.stderr_variance, tm.n_paths});
  }
  scan.degenerate =
      std::all_of(scan.points.begin(), scan.points.end(), [](const ScanPoint& p) { return p.estimate == 0.0; });
  if (!scan.degenerate) scan.fit = rigidity::fit_exponent(scan);
  return scan;
}

}  // namespace rsk::feynman_kac
