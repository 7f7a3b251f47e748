#include "rsk/airy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "rsk/error.hpp"

namespace rsk::airy {

namespace {

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kAip0 = -0.258819403792806798405183560189203963L;
constexpr double kPi = std::numbers::pi;

AiryEval maclaurin(double xd) {
  const long double x = xd, x3 = x * x * x;
  // f = sum x^{3k}/prod (3j+2)(3j+3), g = sum x^{3k+1}/prod (3j+3)(3j+4), plus derivatives.
  long double f = 1.0L, g = x, fp = 0.0L, gp = 1.0L;
  long double tf = 1.0L, tg = x, tfp = x * x / 2.0L, tgp = 1.0L;
  fp = tfp;
  for (int k = 0; k < 200; ++k) {
    const long double kk = k;
    tf *= x3 / ((3 * kk + 2) * (3 * kk + 3));
    tg *= x3 / ((3 * kk + 3) * (3 * kk + 4));
    tgp *= x3 / ((3 * kk + 1) * (3 * kk + 3));
    if (k > 0) tfp *= x3 / ((3 * kk) * (3 * kk + 2));
    f += tf;
    g += tg;
    gp += tgp;
    if (k > 0) fp += tfp;
    const long double scale = 1.0L + std::fabs(f) + std::fabs(g);
    if (std::fabs(tf) + std::fabs(tg) + std::fabs(tfp) + std::fabs(tgp) < 1e-21L * scale && k > 2) break;
  }
  const long double ai = kAi0 * f + kAip0 * g;
  const long double aip = kAi0 * fp + kAip0 * gp;
  return {xd, static_cast<double>(ai), static_cast<double>(aip)};
}

/// u_k and v_k of the Airy asymptotic series, k = 0..n-1.
struct AsymptoticCoefficients {
  std::vector<double> u, v;
  AsymptoticCoefficients() {
    const int n = 60;
    u.resize(n);
    v.resize(n);
    u[0] = 1.0;
    for (int k = 0; k + 1 < n; ++k)
      u[k + 1] = u[k] * (3.0 * k + 0.5) * (3.0 * k + 1.5) * (3.0 * k + 2.5) / (54.0 * (k + 1.0) * (k + 0.5));
    for (int k = 0; k < n; ++k) v[k] = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u[k];
  }
};

const AsymptoticCoefficients& coeffs() {
  static const AsymptoticCoefficients c;
  return c;
}

/// Sum of sign(k) c_k / zeta^k over k in [start, ...) with step 2 or 1, stopped
/// at the smallest term.
double series(const std::vector<double>& c, double zeta, int start, int step, bool alternate) {
  double s = 0.0, prev = INFINITY;
  int sign = 1;
  for (std::size_t k = static_cast<std::size_t>(start); k < c.size(); k += static_cast<std::size_t>(step)) {
    const double term = c[k] / std::pow(zeta, static_cast<double>(k));
    if (std::abs(term) > prev) break;
    s += sign * term;
    prev = std::abs(term);
    if (prev < 1e-17 * std::abs(s)) break;
    if (alternate) sign = -sign;
  }
  return s;
}

AiryEval asymptotic_positive(double x) {
  const auto& c = coeffs();
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  double su = 0.0, sv = 0.0, prev = INFINITY, zk = 1.0;
  for (std::size_t k = 0; k < c.u.size(); ++k) {
    const double tu = c.u[k] / zk, tv = c.v[k] / zk;
    const double mag = std::abs(tu) + std::abs(tv);
    if (mag > prev) break;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    su += sign * tu;
    sv += sign * tv;
    prev = mag;
    if (mag < 1e-17) break;
    zk *= zeta;
  }
  const double e = std::exp(-zeta);
  const double q = std::sqrt(std::sqrt(x));
  return {x, e / (2.0 * std::sqrt(kPi) * q) * su, -q * e / (2.0 * std::sqrt(kPi)) * sv};
}

AiryEval asymptotic_negative(double x) {
  const auto& c = coeffs();
  const double z = -x;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const double p = series(c.u, zeta, 0, 2, true);
  const double q = series(c.u, zeta, 1, 2, true);
  const double r = series(c.v, zeta, 0, 2, true);
  const double s = series(c.v, zeta, 1, 2, true);
  const double th = zeta + kPi / 4.0;
  const double sn = std::sin(th), cs = std::cos(th);
  const double z4 = std::sqrt(std::sqrt(z));
  const double ai = (sn * p - cs * q) / (std::sqrt(kPi) * z4);
  const double aip = -z4 * (cs * r + sn * s) / std::sqrt(kPi);
  return {x, ai, aip};
}

/// Ai(x) = sqrt(x/3) K_{1/3}(zeta) / pi and Ai'(x) = -x K_{2/3}(zeta) / (pi sqrt 3) with
/// K_nu(zeta) = integral over s > 0 of exp(-zeta cosh s) cosh(nu s), by the
/// trapezoid rule (geometric convergence for this analytic integrand).
AiryEval bessel_positive(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double step = 0.125;
  double k13 = 0.0, k23 = 0.0;
  for (int i = 0;; ++i) {
    const double s = i * step;
    const double e = std::exp(-zeta * (std::cosh(s) - 1.0));
    const double w = i == 0 ? 0.5 : 1.0;
    k13 += w * e * std::cosh(s / 3.0);
    k23 += w * e * std::cosh(2.0 * s / 3.0);
    if (e < 1e-18) break;
  }
  const double scale = step * std::exp(-zeta);
  k13 *= scale;
  k23 *= scale;
  return {x, std::sqrt(x / 3.0) * k13 / kPi, -x * k23 / (kPi * std::sqrt(3.0))};
}

/// No range guard: used for quadrature nodes below -200, where the
/// asymptotic expansion only improves.
AiryEval eval_unbounded(double x) { return x < -8.0 ? asymptotic_negative(x) : airy_ai(x); }

// ---------------------------------------------------------------------------
// Composite Gauss-Legendre grids.

struct Grid {
  std::vector<double> x, w;
};

template <unsigned N>
void add_panel(Grid& g, double a, double b) {
  using rule = boost::math::quadrature::gauss<double, N>;
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  const auto& abs = rule::abscissa();
  const auto& wts = rule::weights();
  for (std::size_t k = 0; k < abs.size(); ++k) {
    if (abs[k] == 0.0) {
      g.x.push_back(c);
      g.w.push_back(r * wts[k]);
    } else {
      g.x.push_back(c - r * abs[k]);
      g.w.push_back(r * wts[k]);
      g.x.push_back(c + r * abs[k]);
      g.w.push_back(r * wts[k]);
    }
  }
}

/// Panels on [a, b] no wider than scale / (1 + sqrt(-x)) on the oscillatory side.
template <unsigned N>
Grid make_grid(double a, double b, double scale) {
  Grid g;
  double pos = a;
  while (pos < b) {
    const double width = std::min(0.5, scale / (1.0 + std::sqrt(std::max(0.0, -pos))));
    const double next = std::min(b, pos + width);
    add_panel<N>(g, pos, next);
    pos = next;
  }
  return g;
}

/// L with e^{-rate L} sqrt(L) / rate below e^{-drop}.
double lower_cut(double rate, double drop) {
  double l = drop / rate;
  for (int i = 0; i < 20; ++i) l = (drop + 0.5 * std::log(std::max(l, 1.0)) - std::log(rate)) / rate;
  return l;
}

/// First x past the peak of rate x - (4/3) x^{3/2} where it is drop below the peak.
double upper_cut(double rate, double drop) {
  const double peak = rate * rate * rate / 12.0;
  double x = std::max(1.0, rate * rate / 4.0);
  while (rate * x - 4.0 / 3.0 * x * std::sqrt(x) > peak - drop) x += 0.25;
  return x + 1.0;
}

constexpr double kDrop = 34.0;
constexpr double kScale = 2.0;

}  // namespace

AiryEval airy_ai(double x) {
  if (!std::isfinite(x) || std::abs(x) > 200.0) throw RangeError("airy_ai: |x| must be <= 200");
  if (x > 2.0 && x <= 8.0) return bessel_positive(x);
  if (std::abs(x) <= 8.0) return maclaurin(x);
  return x > 0.0 ? asymptotic_positive(x) : asymptotic_negative(x);
}

double airy_kernel(const AiryEval& p, const AiryEval& q) {
  const double d = p.x - q.x;
  if (std::abs(d) >= 1e-4) return (p.ai * q.ai_prime - q.ai * p.ai_prime) / d;
  const double m = 0.5 * (p.x + q.x);
  const auto e = airy_ai(m);
  const double a = e.ai, b = e.ai_prime;
  return (b * b - m * a * a) + d * d * (a * b / 12.0 + m * b * b / 6.0 - m * m * a * a / 6.0);
}

double airy_kernel(double x, double y) { return airy_kernel(airy_ai(x), airy_ai(y)); }

double airy_laplace(double t, double u, double v) {
  if (!(t > 0.0)) throw InputError("airy_laplace: t must be > 0");
  return std::exp(t * t * t / 12.0 - (u + v) * t / 2.0 - (u - v) * (u - v) / (4.0 * t)) / (2.0 * std::sqrt(kPi * t));
}

double airy_laplace_quadrature(double t, double u, double v) {
  if (!(t > 0.0)) throw InputError("airy_laplace_quadrature: t must be > 0");
  const double lo = -lower_cut(t, kDrop) - std::max(std::abs(u), std::abs(v));
  const double hi = upper_cut(t, kDrop) + std::max(0.0, -std::min(u, v));
  const auto g = make_grid<20>(lo, hi, kScale);
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double x = g.x[i];
    s += g.w[i] * std::exp(t * x) * eval_unbounded(x + u).ai * eval_unbounded(x + v).ai;
  }
  return s;
}

double e1_closed_form(double t) {
  if (!(t > 0.0)) throw InputError("t must be > 0");
  return std::exp(2.0 * t * t * t / 3.0) / (4.0 * std::sqrt(2.0 * kPi) * t * std::sqrt(t));
}

double e2_closed_form(double t) { return e1_closed_form(t) * std::erfc(t * std::sqrt(t) / std::numbers::sqrt2); }

double variance_closed_form(double t) {
  return e1_closed_form(t) * std::erf(t * std::sqrt(t) / std::numbers::sqrt2);
}

double variance_integrand(double t, double x, double y) {
  const double diff = std::exp(t * x) - std::exp(t * y);
  const double k = airy_kernel(x, y);
  return 0.5 * diff * diff * k * k;
}

namespace {

template <unsigned N>
double variance_on_grid(double t) {
  // E1: integral of e^{2tx} K(x, x).
  const auto g1 = make_grid<N>(-lower_cut(2.0 * t, kDrop), upper_cut(2.0 * t, kDrop), kScale);
  double e1 = 0.0;
  for (std::size_t i = 0; i < g1.x.size(); ++i) {
    const auto a = eval_unbounded(g1.x[i]);
    e1 += g1.w[i] * std::exp(2.0 * t * g1.x[i]) * (a.ai_prime * a.ai_prime - g1.x[i] * a.ai * a.ai);
  }
  // E2: double integral of e^{t(x+y)} K(x, y)^2 on a tensor grid.
  const auto g2 = make_grid<N>(-lower_cut(t, kDrop), upper_cut(2.0 * t, kDrop), kScale);
  const std::size_t n = g2.x.size();
  std::vector<double> ai(n), aip(n), ew(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = eval_unbounded(g2.x[i]);
    ai[i] = a.ai;
    aip[i] = a.ai_prime;
    ew[i] = g2.w[i] * std::exp(t * g2.x[i]);
  }
  double e2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = g2.x[i], a = ai[i], b = aip[i];
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = xi - g2.x[j];
      const double k = std::abs(d) >= 1e-4 ? (a * aip[j] - ai[j] * b) / d : airy_kernel(xi, g2.x[j]);
      row += ew[j] * k * k;
    }
    const double kd = b * b - xi * a * a;
    e2 += ew[i] * (2.0 * row + ew[i] * kd * kd);
  }
  return e1 - e2;
}

}  // namespace

QuadratureResult variance_quadrature(double t, double rel_tol) {
  if (!(t >= 0.1 && t <= 3.0)) throw InputError("variance_quadrature: t must lie in [0.1, 3]");
  const double fine = variance_on_grid<20>(t);
  const double coarse = variance_on_grid<15>(t);
  const double err = std::abs(fine - coarse) + 1e-13;
  if (!(err <= rel_tol * std::abs(fine)))
    throw NumericError("variance_quadrature: estimated relative error " + std::to_string(err / std::abs(fine)) +
                       " exceeds tolerance");
  return {fine, err};
}

double projection_integral(double x) {
  constexpr double z = 2000.0;
  const auto px = airy_ai(x);
  const double hi = std::max(x, 0.0) + 14.0;
  const auto g = make_grid<20>(-z, hi, kScale);
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double y = g.x[i];
    const double k = airy_kernel(px, eval_unbounded(y));
    s += g.w[i] * k * k;
  }
  // Tail below -z from the mean squares of Ai, Ai' at -s (substitution s = z / w^2).
  const double a = px.ai, b = px.ai_prime;
  Grid tg;
  for (int p = 0; p < 8; ++p) add_panel<20>(tg, p / 8.0, (p + 1) / 8.0);
  double i1 = 0.0, i2 = 0.0, i3 = 0.0;
  for (std::size_t i = 0; i < tg.x.size(); ++i) {
    const double w = tg.x[i], den = (z + x * w * w) * (z + x * w * w);
    i1 += tg.w[i] * 2.0 * z * std::sqrt(z) / den;
    i2 += tg.w[i] * 2.0 * std::sqrt(z) * w * w / den;
    i3 += tg.w[i] * 2.0 * w * w * w * w / (std::sqrt(z) * den);
  }
  const double tail = a * a * i1 / (2.0 * kPi) + b * b * i2 / (2.0 * kPi) - 2.0 * a * b * i3 / (8.0 * kPi);
  return s + tail;
}

}  // namespace rsk::airy
