#include "rsk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rsk/error.hpp"
#include "rsk/stats.hpp"

namespace rsk::spectrum {

using domain::Case;

double default_radius(const domain::PotentialSpec& potential) {
  const auto& g = potential.growth();
  if (!g) throw ConfigError("unbounded domains need a potential with a growth certificate");
  return std::pow(50.0 + g->nu, 1.0 / g->a) / g->kappa;
}

DiscreteOperator discretize_deterministic(const domain::DomainSpec& spec, const domain::PotentialSpec& potential,
                                          std::size_t n, std::optional<double> radius) {
  if (n < 16) throw InputError("discretize: n must be >= 16");
  DiscreteOperator op;
  double alpha = domain::kDirichlet, beta = domain::kDirichlet;
  switch (spec.kind()) {
    case Case::FullLine: {
      const double r = radius.value_or(default_radius(potential));
      op.lower = -r;
      op.upper = r;
      break;
    }
    case Case::HalfLine: {
      op.lower = 0.0;
      op.upper = radius.value_or(default_radius(potential));
      alpha = std::get<domain::HalfLine>(spec.variant()).alpha_bar;
      break;
    }
    case Case::Interval: {
      const auto& iv = std::get<domain::Interval>(spec.variant());
      op.upper = iv.b;
      alpha = iv.alpha_bar;
      beta = iv.beta_bar;
      break;
    }
  }
  if (!(op.upper > op.lower)) throw InputError("discretize: truncation radius must be > 0");
  op.robin_lower = alpha != domain::kDirichlet;
  op.robin_upper = beta != domain::kDirichlet;
  const std::size_t intervals = n - 1 + (op.robin_lower ? 0 : 1) + (op.robin_upper ? 0 : 1);
  op.h = (op.upper - op.lower) / static_cast<double>(intervals);
  const double h2 = op.h * op.h;
  const double first = op.lower + (op.robin_lower ? 0.0 : op.h);

  op.nodes.resize(n);
  op.diagonal.resize(n);
  op.off_diagonal.assign(n - 1, -0.5 / h2);
  for (std::size_t i = 0; i < n; ++i) {
    op.nodes[i] = first + static_cast<double>(i) * op.h;
    op.diagonal[i] = 1.0 / h2 + potential(op.nodes[i]);
  }
  op.nodes.back() = op.robin_upper ? op.upper : op.upper - op.h;
  if (op.robin_lower) {
    op.diagonal[0] = (1.0 - op.h * alpha) / h2 + potential(op.nodes[0]);
    op.off_diagonal[0] = -1.0 / (std::numbers::sqrt2 * h2);
  }
  if (op.robin_upper) {
    op.diagonal[n - 1] = (1.0 - op.h * beta) / h2 + potential(op.nodes[n - 1]);
    op.off_diagonal[n - 2] = -1.0 / (std::numbers::sqrt2 * h2);
  }
  return op;
}

std::vector<noise::StepFunction> node_cells(const DiscreteOperator& op) {
  std::vector<noise::StepFunction> cells;
  cells.reserve(op.size());
  const double half = 0.5 * op.h;
  for (double x : op.nodes) {
    // Cells are unions of half-width bins so that every cell sits on one grid.
    const double a = std::max(op.lower, x - half), b = std::min(op.upper, x + half);
    noise::StepFunction f;
    f.origin = a;
    f.bin_width = half;
    f.values.assign(static_cast<std::size_t>(std::lround((b - a) / half)), 1.0);
    cells.push_back(std::move(f));
  }
  return cells;
}

DiscreteOperator discretize(const domain::DomainSpec& spec, const domain::PotentialSpec& potential,
                            const std::optional<noise::CovarianceModel>& model, std::size_t n,
                            std::optional<double> radius, Rng& rng) {
  auto op = discretize_deterministic(spec, potential, n, radius);
  if (model) {
    const auto cells = node_cells(op);
    const noise::CellNoiseSampler sampler(cells, *model);
    const auto xi = sampler.sample(rng);
    for (std::size_t i = 0; i < op.size(); ++i) op.diagonal[i] += xi[i];
  }
  return op;
}

std::size_t sturm_count(const DiscreteOperator& op, double x) {
  const std::size_t n = op.size();
  std::size_t count = 0;
  double d = 1.0;
  const double tiny = std::numeric_limits<double>::min() * 1e4;
  for (std::size_t i = 0; i < n; ++i) {
    const double b2 = i > 0 ? op.off_diagonal[i - 1] * op.off_diagonal[i - 1] : 0.0;
    d = (op.diagonal[i] - x) - (i > 0 ? b2 / d : 0.0);
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

namespace {

std::pair<double, double> gershgorin(const DiscreteOperator& op) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const std::size_t n = op.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(op.off_diagonal[i - 1]) : 0.0) + (i + 1 < n ? std::abs(op.off_diagonal[i]) : 0.0);
    lo = std::min(lo, op.diagonal[i] - r);
    hi = std::max(hi, op.diagonal[i] + r);
  }
  const double pad = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  return {lo - pad, hi + pad};
}

/// j-th smallest eigenvalue (0-based) within [lo, hi].
double bisect(const DiscreteOperator& op, std::size_t j, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double tol = std::max(1e-10, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mid));
    if (hi - lo <= tol) break;
    if (sturm_count(op, mid) > j)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> eigenvalues(const DiscreteOperator& op, std::size_t k) {
  if (k > op.size()) throw InputError("eigenvalues: k exceeds the matrix size");
  const auto [lo, hi] = gershgorin(op);
  std::vector<double> ev(k);
  double floor = lo;
  for (std::size_t j = 0; j < k; ++j) {
    ev[j] = bisect(op, j, floor, hi);
    floor = std::max(floor, ev[j] - std::max(1e-10, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(ev[j])));
  }
  return ev;
}

double direct_trace(const DiscreteOperator& op, double t) {
  if (!(t > 0.0)) throw InputError("direct_trace: t must be > 0");
  const double l1 = eigenvalues(op, 1).front();
  const std::size_t m = std::max<std::size_t>(1, sturm_count(op, l1 + 45.0 / t));
  const auto ev = eigenvalues(op, std::min(m, op.size()));
  double s = 0.0;
  for (auto it = ev.rbegin(); it != ev.rend(); ++it) s += std::exp(-t * *it);
  return s;
}

feynman_kac::TraceMoments direct_variance(double t, const DirectConfig& config) {
  if (config.n_realizations < 100) throw InputError("direct_variance needs at least 100 realizations");
  const auto base = discretize_deterministic(config.spec, config.potential, config.n, config.radius);
  std::optional<noise::CellNoiseSampler> sampler;
  if (config.model) sampler.emplace(node_cells(base), *config.model);
  std::vector<double> traces(config.n_realizations);
  parallel_for(config.n_realizations, config.threads, [&](std::size_t r) {
    DiscreteOperator op = base;
    if (sampler) {
      Rng rng = Rng::stream(config.seed, r);
      std::vector<double> xi(op.size());
      sampler->sample_into(rng, xi);
      for (std::size_t i = 0; i < op.size(); ++i) op.diagonal[i] += xi[i];
    }
    traces[r] = direct_trace(op, t);
  });
  stats::RunningStats rs;
  for (double v : traces) rs.add(v);
  feynman_kac::TraceMoments tm;
  tm.t = t;
  tm.mean = rs.mean();
  tm.variance = rs.variance();
  tm.stderr_mean = rs.stderr_mean();
  tm.stderr_variance = rs.stderr_variance();
  tm.n_paths = rs.count();
  return tm;
}

double radius_sensitivity(const domain::DomainSpec& spec, const domain::PotentialSpec& potential, std::size_t n,
                          double radius, double t) {
  const auto a = discretize_deterministic(spec, potential, n, radius);
  const auto b = discretize_deterministic(spec, potential, static_cast<std::size_t>(std::ceil(1.5 * n)), 1.5 * radius);
  const double ta = direct_trace(a, t), tb = direct_trace(b, t);
  return std::abs(tb - ta) / std::abs(tb);
}

}  // namespace rsk::spectrum
