#include "rsk/paths.hpp"

#include <algorithm>
#include <cmath>

#include "rsk/error.hpp"

namespace rsk::paths {

using domain::Case;
using domain::DomainSpec;

double default_bin_width(double t) { return std::sqrt(t) / 8.0; }

int default_steps(double t) { return std::max(64, static_cast<int>(std::ceil(256.0 * t))); }

double fold(const DomainSpec& spec, double z) {
  switch (spec.kind()) {
    case Case::FullLine: return z;
    case Case::HalfLine: return std::abs(z);
    case Case::Interval: {
      const double b = spec.length();
      double r = std::fmod(z, 2.0 * b);
      if (r < 0.0) r += 2.0 * b;
      return r > b ? 2.0 * b - r : r;
    }
  }
  return z;
}

namespace {

void check_args(double t, int n_steps) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("path horizon t must be > 0");
  if (n_steps < 2) throw InputError("n_steps must be >= 2");
}

double choose_image(const DomainSpec& spec, double x, double y, double t, Rng& rng) {
  if (spec.kind() == Case::FullLine) return y;
  const auto images = domain::endpoint_images(spec, t, y);
  std::vector<double> w(images.size());
  double total = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double d = x - images[i];
    w[i] = std::exp(-d * d / (2.0 * t));
    total += w[i];
  }
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < images.size(); ++i) {
    u -= w[i];
    if (u < 0.0) return images[i];
  }
  return images.back();
}

void fill_folded(BridgePath& p) {
  p.values.resize(p.unfolded.size());
  for (std::size_t i = 0; i < p.unfolded.size(); ++i) p.values[i] = fold(p.spec, p.unfolded[i]);
}

}  // namespace

void sample_bridge_into(const DomainSpec& spec, double x, double y, double t, int n_steps, Rng& rng, BridgePath& out) {
  check_args(t, n_steps);
  if (!spec.contains(x) || !spec.contains(y)) throw InputError("bridge endpoints must lie in the domain");
  out.t = t;
  out.n_steps = n_steps;
  out.spec = spec;
  const double e = choose_image(spec, x, y, t, rng);
  out.image_endpoint = e;

  auto& u = out.unfolded;
  u.resize(static_cast<std::size_t>(n_steps) + 1);
  const double sd = std::sqrt(t / n_steps);
  u[0] = 0.0;
  for (int i = 1; i <= n_steps; ++i) u[i] = u[i - 1] + sd * rng.normal();
  const double w_end = u[n_steps];
  for (int i = 0; i <= n_steps; ++i) {
    const double s = static_cast<double>(i) / n_steps;
    u[i] = x + u[i] - s * w_end + s * (e - x);
  }
  u[0] = x;
  u[n_steps] = e;
  fill_folded(out);
  out.values.front() = x;
  out.values.back() = y;
}

BridgePath sample_bridge(const DomainSpec& spec, double x, double y, double t, int n_steps, Rng& rng) {
  BridgePath p;
  sample_bridge_into(spec, x, y, t, n_steps, rng, p);
  return p;
}

void sample_process_into(const DomainSpec& spec, double x, double t, int n_steps, Rng& rng, BridgePath& out) {
  check_args(t, n_steps);
  if (!spec.contains(x)) throw InputError("start point must lie in the domain");
  out.t = t;
  out.n_steps = n_steps;
  out.spec = spec;
  auto& u = out.unfolded;
  u.resize(static_cast<std::size_t>(n_steps) + 1);
  const double sd = std::sqrt(t / n_steps);
  u[0] = x;
  for (int i = 1; i <= n_steps; ++i) u[i] = u[i - 1] + sd * rng.normal();
  out.image_endpoint = u[n_steps];
  fill_folded(out);
}

BridgePath sample_process(const DomainSpec& spec, double x, double t, int n_steps, Rng& rng) {
  BridgePath p;
  sample_process_into(spec, x, t, n_steps, rng, p);
  return p;
}

void occupation_into(const BridgePath& path, double h, noise::StepFunction& out) {
  if (!(h > 0.0)) throw InputError("bin width must be > 0");
  const int n = path.n_steps;
  const auto& u = path.unfolded;
  // Bin indices of the step midpoints, folded back into the domain.
  thread_local std::vector<long> idx;
  idx.resize(static_cast<std::size_t>(n));
  long lo = 0, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double m = fold(path.spec, 0.5 * (u[i] + u[i + 1]));
    idx[i] = static_cast<long>(std::floor(m / h));
    if (i == 0 || idx[i] < lo) lo = idx[i];
    if (i == 0 || idx[i] > hi) hi = idx[i];
  }
  out.bin_width = h;
  out.origin = static_cast<double>(lo) * h;
  out.values.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  const double deposit = path.dt() / h;
  for (int i = 0; i < n; ++i) out.values[idx[i] - lo] += deposit;
}

LocalTimeField occupation_local_time(const BridgePath& path, double h) {
  LocalTimeField f;
  occupation_into(path, h, f.occupation);
  switch (path.spec.kind()) {
    case Case::FullLine: break;
    case Case::HalfLine: f.boundary_local_times[0.0] = boundary_local_time(path, 0.0); break;
    case Case::Interval:
      f.boundary_local_times[0.0] = boundary_local_time(path, 0.0);
      f.boundary_local_times[path.spec.length()] = boundary_local_time(path, path.spec.length());
      break;
  }
  return f;
}

double boundary_local_time(const BridgePath& path, double c, std::optional<double> epsilon) {
  const double dt = path.dt();
  const double eps = epsilon.value_or(std::sqrt(dt));
  if (!(eps > 0.0)) throw InputError("boundary local time epsilon must be > 0");
  double s = 0.0;
  const int n = path.n_steps;
  for (int i = 0; i <= n; ++i) {
    if (std::abs(path.values[i] - c) < eps) s += (i == 0 || i == n) ? 0.5 * dt : dt;
  }
  return s / (2.0 * eps);
}

double dirichlet_survival_weight(const BridgePath& path) {
  const auto& spec = path.spec;
  double offset = 0.0, period = 0.0;  // Dirichlet images {offset + k * period}; period 0 means {offset}
  switch (spec.kind()) {
    case Case::FullLine: return 1.0;
    case Case::HalfLine:
      if (std::get<domain::HalfLine>(spec.variant()).alpha_bar != domain::kDirichlet) return 1.0;
      break;
    case Case::Interval: {
      const auto& iv = std::get<domain::Interval>(spec.variant());
      const bool left = iv.alpha_bar == domain::kDirichlet, right = iv.beta_bar == domain::kDirichlet;
      if (!left && !right) return 1.0;
      if (left && right) {
        period = iv.b;
      } else {
        period = 2.0 * iv.b;
        offset = left ? 0.0 : iv.b;
      }
    }
  }
  const double dt = path.dt();
  const auto& u = path.unfolded;
  double w = 1.0;
  for (int i = 0; i < path.n_steps; ++i) {
    const double a = u[i] - offset, b = u[i + 1] - offset;
    if (period == 0.0) {
      if (a * b <= 0.0) return 0.0;
      w *= -std::expm1(-2.0 * a * b / dt);
      continue;
    }
    const double ka = std::floor(a / period), kb = std::floor(b / period);
    if (ka != kb) return 0.0;
    const double lo_a = a - ka * period, lo_b = b - kb * period;
    const double hi_a = period - lo_a, hi_b = period - lo_b;
    if (lo_a <= 0.0 || lo_b <= 0.0) return 0.0;
    w *= -std::expm1(-2.0 * lo_a * lo_b / dt) * -std::expm1(-2.0 * hi_a * hi_b / dt);
    if (w == 0.0) return 0.0;
  }
  return w;
}

}  // namespace rsk::paths
