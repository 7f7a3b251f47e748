#pragma once

namespace rsk::airy {

struct AiryEval {
  double x;
  double ai;
  double ai_prime;
};

/// Ai and Ai' for |x| <= 200: Maclaurin series in extended precision on
/// [-8, 8], asymptotic expansions outside. RangeError beyond |x| = 200.
AiryEval airy_ai(double x);

/// Airy kernel K(x, y); within |x - y| < 1e-4 a second-order expansion about
/// the midpoint replaces the difference quotient.
double airy_kernel(double x, double y);
double airy_kernel(const AiryEval& x, const AiryEval& y);

/// Closed form of the integral of e^{tx} Ai(x+u) Ai(x+v) dx.
double airy_laplace(double t, double u, double v);
/// The same integral by composite Gauss-Legendre quadrature.
double airy_laplace_quadrature(double t, double u, double v);

/// E1(t) = integral of e^{2tx} K(x,x) dx and E2(t) = E1(t) erfc(t^{3/2}/sqrt 2).
double e1_closed_form(double t);
double e2_closed_form(double t);
/// Var of sum_k exp(t a_k) over the Airy-2 process: E1 - E2.
double variance_closed_form(double t);

/// 1/2 (e^{tx} - e^{ty})^2 K(x, y)^2.
double variance_integrand(double t, double x, double y);

struct QuadratureResult {
  double value;
  double error_estimate;
};

/// Var = integral e^{2tx} K(x,x) dx - double integral e^{t(x+y)} K(x,y)^2, both
/// by tensor Gauss-Legendre panels truncated from the e^{tx} and Ai decay.
/// t in [0.1, 3]; NumericError when the estimated relative error exceeds rel_tol.
QuadratureResult variance_quadrature(double t, double rel_tol = 1e-7);

/// Integral of K(x, y)^2 over y: quadrature down to y = -2000 plus the
/// averaged asymptotic tail.
double projection_integral(double x);

}  // namespace rsk::airy
