#include "rsk/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "rsk/error.hpp"

namespace rsk::noise {

StepFunction StepFunction::indicator(double a, double b) {
  if (!(b > a)) throw InputError("indicator: empty interval");
  return StepFunction{a, b - a, {1.0}};
}

double StepFunction::l1_norm() const {
  double s = 0.0;
  for (double v : values) s += std::abs(v);
  return bin_width * s;
}

double StepFunction::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return bin_width * s;
}

double StepFunction::lq_norm(double q) const {
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v), q);
  return std::pow(bin_width * s, 1.0 / q);
}

std::optional<std::pair<double, double>> StepFunction::support() const {
  std::size_t lo = values.size(), hi = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) {
      lo = std::min(lo, i);
      hi = i;
    }
  }
  if (lo == values.size()) return std::nullopt;
  return std::pair{origin + bin_width * static_cast<double>(lo), origin + bin_width * static_cast<double>(hi + 1)};
}

// ---------------------------------------------------------------------------

CovarianceModel::CovarianceModel(Variant v, std::optional<double> support_radius, std::string name)
    : v_(std::move(v)), support_radius_(support_radius), name_(std::move(name)) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, White>) {
          if (!(m.sigma2 > 0.0)) throw InputError("white noise: sigma2 must be > 0");
        } else if constexpr (std::is_same_v<T, Fractional>) {
          if (!(m.hurst > 0.5 && m.hurst < 1.0)) throw InputError("fractional noise: hurst must lie in (1/2, 1)");
          if (!(m.sigma2 > 0.0)) throw InputError("fractional noise: sigma2 must be > 0");
        } else if constexpr (std::is_same_v<T, LpSingular>) {
          if (!(m.p >= 1.0)) throw InputError("L^p-singular noise: p must be >= 1");
          if (!m.gamma1_psi) throw InputError("L^p-singular noise: missing second antiderivative of gamma1");
        } else {
          if (!m.gamma) throw InputError("bounded noise: missing kernel");
        }
      },
      v_);
  if (support_radius_ && !(*support_radius_ >= 0.0)) throw InputError("support_radius must be >= 0");
}

CovarianceModel CovarianceModel::white(double sigma2) { return {White{sigma2}, 0.0, "white"}; }

CovarianceModel CovarianceModel::fractional(double hurst, double sigma2) {
  return {Fractional{hurst, sigma2}, std::nullopt, "fractional"};
}

CovarianceModel CovarianceModel::lp_power(double e, double p, double sigma2) {
  if (!(e > 0.0 && e * p < 1.0)) throw InputError("lp_power: need 0 < e and e*p < 1");
  if (!(sigma2 > 0.0)) throw InputError("lp_power: sigma2 must be > 0");
  const double c = sigma2 / ((1.0 - e) * (2.0 - e));
  const double slope = sigma2 / (1.0 - e);
  auto psi = [=](double z) {
    const double a = std::abs(z);
    if (a <= 1.0) return c * std::pow(a, 2.0 - e);
    return c + slope * (a - 1.0);
  };
  const double norm = sigma2 * std::pow(2.0 / (1.0 - e * p), 1.0 / p);
  return {LpSingular{p, psi, {}, norm, 0.0}, 1.0, "lp_power"};
}

CovarianceModel CovarianceModel::lp_log(double e, double p, double sigma2) {
  if (!(e > 0.0)) throw InputError("lp_log: exponent must be > 0");
  if (!(sigma2 > 0.0)) throw InputError("lp_log: sigma2 must be > 0");
  const double g = std::tgamma(e + 1.0);
  const double psi1 = g * (1.0 - std::pow(2.0, -e - 1.0));
  auto psi = [=](double z) {
    const double a = std::abs(z);
    if (a == 0.0) return 0.0;
    if (a <= 1.0) {
      const double l = -std::log(a);
      return sigma2 * (a * boost::math::tgamma(e + 1.0, l) - std::pow(2.0, -e - 1.0) * boost::math::tgamma(e + 1.0, 2.0 * l));
    }
    return sigma2 * (psi1 + g * (a - 1.0));
  };
  const double norm = sigma2 * std::pow(2.0 * std::tgamma(e * p + 1.0), 1.0 / p);
  return {LpSingular{p, psi, {}, norm, 0.0}, 1.0, "lp_log"};
}

CovarianceModel CovarianceModel::bounded_gaussian(double sigma2) {
  if (!(sigma2 >= 0.0)) throw InputError("bounded_gaussian: sigma2 must be >= 0");
  return {Bounded{[sigma2](double x) { return sigma2 * std::exp(-0.5 * x * x); }, sigma2}, std::nullopt,
          "bounded_gaussian"};
}

CovarianceModel CovarianceModel::bounded_const(double sigma2) {
  if (!(sigma2 >= 0.0)) throw InputError("bounded_const: sigma2 must be >= 0");
  return {Bounded{[sigma2](double) { return sigma2; }, sigma2}, std::nullopt, "bounded_const"};
}

CovarianceModel CovarianceModel::bounded_triangle(double radius, double sigma2) {
  if (!(radius > 0.0)) throw InputError("bounded_triangle: radius must be > 0");
  if (!(sigma2 >= 0.0)) throw InputError("bounded_triangle: sigma2 must be >= 0");
  return {Bounded{[=](double x) { return sigma2 * std::max(0.0, 1.0 - std::abs(x) / radius); }, sigma2}, radius,
          "bounded_triangle"};
}

bool CovarianceModel::compactly_supported() const { return is_white() || support_radius_.has_value(); }

namespace {

// Second difference psi(k-1) - 2 psi(k) + psi(k+1) of psi(z) = |z|^{2H}/2,
// by series for large k to avoid cancellation.
double fbm_second_difference(double hurst, long k) {
  const double a = 2.0 * hurst;
  const long m = std::abs(k);
  if (m < 8) {
    auto p = [a](double z) { return 0.5 * std::pow(std::abs(z), a); };
    const double x = static_cast<double>(m);
    return p(x - 1.0) - 2.0 * p(x) + p(x + 1.0);
  }
  const double x = static_cast<double>(m);
  const double inv2 = 1.0 / (x * x);
  // (1-u)^a - 2 + (1+u)^a = 2 sum_{j>=1} binom(a, 2j) u^{2j}
  double binom = 1.0, sum = 0.0, upow = 1.0;
  for (int j = 1; j <= 12; ++j) {
    const double n0 = 2.0 * j - 2.0;
    binom *= (a - n0) * (a - n0 - 1.0) / ((n0 + 1.0) * (n0 + 2.0));
    upow *= inv2;
    sum += binom * upow;
  }
  return std::pow(x, a) * sum;
}

double psi_second_difference(const Kernel& psi, double h, long lag) {
  const double x = static_cast<double>(lag) * h;
  return psi(x - h) - 2.0 * psi(x) + psi(x + h);
}

}  // namespace

double CovarianceModel::cell_pair_weight(double h, long lag) const {
  return std::visit(
      [h, lag](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, White>) {
          return lag == 0 ? m.sigma2 * h : 0.0;
        } else if constexpr (std::is_same_v<T, Fractional>) {
          return m.sigma2 * std::pow(h, 2.0 * m.hurst) * fbm_second_difference(m.hurst, lag);
        } else if constexpr (std::is_same_v<T, LpSingular>) {
          double w = psi_second_difference(m.gamma1_psi, h, lag);
          if (m.gamma2) w += h * h * m.gamma2(static_cast<double>(lag) * h);
          return w;
        } else {
          return h * h * m.gamma(static_cast<double>(lag) * h);
        }
      },
      v_);
}

// ---------------------------------------------------------------------------

GridKernel::GridKernel(const CovarianceModel& model, double h, std::size_t max_lag)
    : model_(model), h_(h), white_(model.is_white()) {
  if (!(h > 0.0)) throw InputError("GridKernel: bin width must be > 0");
  if (model.support_radius() && !white_) {
    // Cells at lag L are at least (L-1) h apart.
    zero_beyond_ = static_cast<long>(std::floor(*model.support_radius() / h)) + 2;
  }
  std::size_t n = max_lag + 1;
  if (zero_beyond_) n = std::min<std::size_t>(n, static_cast<std::size_t>(*zero_beyond_));
  table_.resize(white_ ? 1 : n);
  for (std::size_t k = 0; k < table_.size(); ++k) table_[k] = model_.cell_pair_weight(h_, static_cast<long>(k));
}

double GridKernel::weight(long lag) const {
  const long a = std::abs(lag);
  if (white_) return a == 0 ? table_[0] : 0.0;
  if (zero_beyond_ && a >= *zero_beyond_) return 0.0;
  if (static_cast<std::size_t>(a) < table_.size()) return table_[static_cast<std::size_t>(a)];
  return model_.cell_pair_weight(h_, a);
}

double GridKernel::inner(std::span<const double> f, long f_off, std::span<const double> g, long g_off) const {
  const long nf = static_cast<long>(f.size()), ng = static_cast<long>(g.size());
  if (nf == 0 || ng == 0) return 0.0;
  if (white_) {
    const long lo = std::max(f_off, g_off), hi = std::min(f_off + nf, g_off + ng);
    double s = 0.0;
    for (long k = lo; k < hi; ++k) s += f[static_cast<std::size_t>(k - f_off)] * g[static_cast<std::size_t>(k - g_off)];
    return table_[0] * s;
  }
  const long reach = zero_beyond_ ? *zero_beyond_ - 1 : std::numeric_limits<long>::max() / 4;
  if (g_off - (f_off + nf - 1) > reach || f_off - (g_off + ng - 1) > reach) return 0.0;
  // Lag weights covering every pair that can interact, then a direct double sum.
  const long max_lag = std::min(reach, std::max(std::abs(g_off + ng - 1 - f_off), std::abs(f_off + nf - 1 - g_off)));
  std::vector<double> local;
  const double* w = table_.data();
  long wsize = static_cast<long>(table_.size());
  if (max_lag >= wsize) {
    local.resize(static_cast<std::size_t>(max_lag) + 1);
    for (long k = 0; k <= max_lag; ++k) local[static_cast<std::size_t>(k)] = weight(k);
    w = local.data();
    wsize = max_lag + 1;
  }
  double total = 0.0;
  for (long i = 0; i < nf; ++i) {
    const double fi = f[static_cast<std::size_t>(i)];
    if (fi == 0.0) continue;
    const long base = g_off - (f_off + i);  // lag of g[0] relative to f[i]
    long j0 = 0, j1 = ng;
    if (zero_beyond_) {
      j0 = std::max(j0, -reach - base);
      j1 = std::min(j1, reach - base + 1);
    }
    double s = 0.0;
    for (long j = j0; j < j1; ++j) {
      const long lag = std::abs(base + j);
      if (lag < wsize) s += w[lag] * g[static_cast<std::size_t>(j)];
    }
    total += fi * s;
  }
  return total;
}

// ---------------------------------------------------------------------------

namespace {

struct Aligned {
  double h;
  std::vector<double> f, g;
  long g_shift;  // offset of g's first bin relative to f's, in units of h
};

long exact_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double rr = std::round(r);
  if (std::abs(r - rr) > 1e-9 * std::max(1.0, std::abs(r))) throw InputError(std::string("inner_product: ") + what);
  return static_cast<long>(rr);
}

std::vector<double> refine(const StepFunction& f, long factor) {
  std::vector<double> out;
  out.reserve(f.values.size() * static_cast<std::size_t>(factor));
  for (double v : f.values)
    for (long k = 0; k < factor; ++k) out.push_back(v);
  return out;
}

Aligned align(const StepFunction& f, const StepFunction& g) {
  if (!(f.bin_width > 0.0) || !(g.bin_width > 0.0)) throw InputError("inner_product: bin width must be > 0");
  const double h = std::min(f.bin_width, g.bin_width);
  const long rf = exact_ratio(f.bin_width, h, "bin widths are not commensurable");
  const long rg = exact_ratio(g.bin_width, h, "bin widths are not commensurable");
  const long shift = exact_ratio(g.origin - f.origin, h, "grids are misaligned");
  return {h, rf == 1 ? f.values : refine(f, rf), rg == 1 ? g.values : refine(g, rg), shift};
}

}  // namespace

double inner_product(const StepFunction& f, const StepFunction& g, const CovarianceModel& model) {
  if (model.support_radius()) {
    const auto sf = f.support(), sg = g.support();
    if (!sf || !sg) return 0.0;
    const double gap = std::max(sg->first - sf->second, sf->first - sg->second);
    if (gap > *model.support_radius()) return 0.0;
  }
  const Aligned a = align(f, g);
  const GridKernel kernel(model, a.h);
  const double r = kernel.inner(a.f, 0, a.g, a.g_shift);
  if (std::isnan(r)) throw NumericError("inner_product: NaN in kernel integral");
  return r;
}

double seminorm_sq(const StepFunction& f, const CovarianceModel& model) {
  const double r = inner_product(f, f, model);
  if (r < 0.0 && r >= -1e-12) return 0.0;
  return r;
}

double SymMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (*this)(i, i);
  return s;
}

SymMatrix clamped_cholesky(const SymMatrix& m, double rel_tol) {
  const std::size_t n = m.n;
  const double tol = rel_tol * std::max(m.trace(), 0.0);
  SymMatrix l{n, std::vector<double>(n * n, 0.0)};
  std::vector<std::size_t> perm(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    perm[i] = i;
    d[i] = m(i, i);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (d[perm[i]] > d[perm[best]]) best = i;
    std::swap(perm[k], perm[best]);
    const std::size_t pk = perm[k];
    if (d[pk] <= tol) {
      for (std::size_t i = k; i < n; ++i)
        if (d[perm[i]] < -tol)
          throw ModelError("covariance is not positive semidefinite on this grid (pivot " +
                           std::to_string(d[perm[i]]) + ")");
      break;  // remaining Schur complement is below tolerance: clamped to zero
    }
    const double lkk = std::sqrt(d[pk]);
    l(pk, k) = lkk;
    const double* lk = &l.data[pk * n];
    for (std::size_t i = k + 1; i < n; ++i) {
      const std::size_t pi = perm[i];
      const double* li = &l.data[pi * n];
      double s = m(pi, pk);
      for (std::size_t j = 0; j < k; ++j) s -= li[j] * lk[j];
      const double v = s / lkk;
      l(pi, k) = v;
      d[pi] -= v * v;
    }
  }
  return l;
}

SymMatrix gram_matrix(std::span<const StepFunction> cells, const CovarianceModel& model) {
  if (cells.empty()) throw InputError("gram_matrix: empty cell list");
  const std::size_t n = cells.size();
  SymMatrix g{n, std::vector<double>(n * n, 0.0)};

  // Common grid: finest width, all origins on it.
  double h = cells[0].bin_width;
  for (const auto& c : cells) h = std::min(h, c.bin_width);
  const double origin = cells[0].origin;
  std::vector<std::vector<double>> refined(n);
  std::vector<long> offsets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long r = exact_ratio(cells[i].bin_width, h, "bin widths are not commensurable");
    refined[i] = r == 1 ? cells[i].values : refine(cells[i], r);
    offsets[i] = exact_ratio(cells[i].origin - origin, h, "grids are misaligned");
  }
  const GridKernel kernel(model, h, 64);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel.inner(refined[i], offsets[i], refined[j], offsets[j]);
      if (std::isnan(v)) throw NumericError("gram_matrix: NaN in kernel integral");
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  (void)clamped_cholesky(g);
  return g;
}

// ---------------------------------------------------------------------------

CellNoiseSampler::CellNoiseSampler(std::span<const StepFunction> cells, const CovarianceModel& model)
    : n_(cells.size()) {
  SymMatrix cov = gram_matrix(cells, model);
  std::vector<double> mass(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    mass[i] = cells[i].integral();
    if (mass[i] == 0.0) throw InputError("sample_cell_noise: cell with zero integral");
  }
  bool diagonal = true;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      cov(i, j) /= mass[i] * mass[j];
      if (i != j && cov(i, j) != 0.0) diagonal = false;
    }
  diagonal_ = diagonal;
  if (diagonal_) {
    diag_sd_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) diag_sd_[i] = std::sqrt(std::max(cov(i, i), 0.0));
  } else {
    factor_ = clamped_cholesky(cov);
    rank_ = 0;
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t i = 0; i < n_; ++i)
        if (factor_(i, k) != 0.0) rank_ = k + 1;
  }
}

void CellNoiseSampler::sample_into(Rng& rng, std::span<double> out) const {
  if (out.size() != n_) throw InputError("sample_into: size mismatch");
  if (diagonal_) {
    for (std::size_t i = 0; i < n_; ++i) out[i] = diag_sd_[i] * rng.normal();
    return;
  }
  std::vector<double> z(n_);
  for (auto& v : z) v = rng.normal();
  for (std::size_t i = 0; i < n_; ++i) {
    const double* li = &factor_.data[i * n_];
    double s = 0.0;
    for (std::size_t k = 0; k < rank_; ++k) s += li[k] * z[k];
    out[i] = s;
  }
}

std::vector<double> CellNoiseSampler::sample(Rng& rng) const {
  std::vector<double> out(n_);
  sample_into(rng, out);
  return out;
}

std::vector<double> sample_cell_noise(std::span<const StepFunction> cells, const CovarianceModel& model, Rng& rng) {
  return CellNoiseSampler(cells, model).sample(rng);
}

double d_exponent(const CovarianceModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, White>) return 1.5;
        else if constexpr (std::is_same_v<T, Fractional>) return 1.0 + m.hurst;
        else if constexpr (std::is_same_v<T, LpSingular>) return 2.0 - 1.0 / (2.0 * m.p);
        else return 2.0;
      },
      model.variant());
}

double seminorm_lp_bound(const StepFunction& f, const CovarianceModel& model, double t) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        const double l1 = f.l1_norm();
        if constexpr (std::is_same_v<T, White>) {
          const double l2 = f.lq_norm(2.0);
          return m.sigma2 * l2 * l2;
        } else if constexpr (std::is_same_v<T, Fractional>) {
          const double l2 = f.lq_norm(2.0);
          const double c = 2.0 * m.hurst * m.sigma2;
          return c * std::pow(t, m.hurst) * (l2 * l2 / std::sqrt(t) + l1 * l1 / t);
        } else if constexpr (std::is_same_v<T, LpSingular>) {
          const double r = 1.0 / (1.0 - 1.0 / (2.0 * m.p));
          const double lr = f.lq_norm(r);
          return m.gamma1_lp_norm * lr * lr + m.gamma2_sup * l1 * l1;
        } else {
          return m.sup * l1 * l1;
        }
      },
      model.variant());
}

}  // namespace rsk::noise
