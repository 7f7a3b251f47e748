#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rsk::domain {

inline constexpr double kDirichlet = -std::numeric_limits<double>::infinity();

/// Boundary parameters follow the Feynman-Kac weights exp(alpha_bar L^0 + beta_bar L^b):
/// a finite value is a Robin condition f'(0) + alpha f(0) = 0 (resp. -f'(b) + beta f(b) = 0),
/// -infinity is Dirichlet.
struct FullLine {};
struct HalfLine {
  double alpha_bar = kDirichlet;
};
struct Interval {
  double b = 1.0;
  double alpha_bar = kDirichlet;
  double beta_bar = kDirichlet;
};

enum class Case { FullLine = 1, HalfLine = 2, Interval = 3 };

class DomainSpec {
public:
  using Variant = std::variant<FullLine, HalfLine, Interval>;

  DomainSpec(Variant v);  // NOLINT: implicit from a case struct
  static DomainSpec full_line() { return {FullLine{}}; }
  static DomainSpec half_line(double alpha_bar = kDirichlet) { return {HalfLine{alpha_bar}}; }
  static DomainSpec interval(double b, double alpha_bar = kDirichlet, double beta_bar = kDirichlet) {
    return {Interval{b, alpha_bar, beta_bar}};
  }

  const Variant& variant() const { return v_; }
  Case kind() const;
  bool bounded() const { return kind() == Case::Interval; }
  /// Interval length; throws for unbounded cases.
  double length() const;
  double lower() const { return kind() == Case::FullLine ? -std::numeric_limits<double>::infinity() : 0.0; }
  double upper() const;
  bool contains(double x) const;
  bool has_dirichlet() const;
  std::string describe() const;

private:
  Variant v_;
};

struct GrowthCertificate {
  double kappa;
  double a;
  double nu = 0.0;
};

/// Potential V with a lower bound and an optional growth certificate
/// V(x) >= |kappa x|^a - nu. Construction spot-checks both on a 1000-point grid.
class PotentialSpec {
public:
  PotentialSpec(std::function<double(double)> eval, double lower_bound, std::optional<GrowthCertificate> growth,
                const DomainSpec& domain, std::string name = "custom");

  static PotentialSpec zero(const DomainSpec& domain);
  /// V(x) = |kappa x|^a with certificate (kappa, a, nu).
  static PotentialSpec abs_pow(const DomainSpec& domain, double kappa, double a, double nu = 0.0);
  /// V(x) = x/2; bounded below only on the half-line and intervals.
  static PotentialSpec linear_half(const DomainSpec& domain);
  /// V(x) = x^2 with certificate (1, 2, 0).
  static PotentialSpec harmonic(const DomainSpec& domain);

  double operator()(double x) const { return eval_(x); }
  double lower_bound() const { return lower_bound_; }
  const std::optional<GrowthCertificate>& growth() const { return growth_; }
  const std::string& name() const { return name_; }
  bool is_zero() const { return zero_; }

private:
  std::function<double(double)> eval_;
  double lower_bound_;
  std::optional<GrowthCertificate> growth_;
  std::string name_;
  bool zero_ = false;
};

double gaussian_kernel(double t, double x);

/// Image-sum truncation |k| <= ceil(sqrt(2 t ln(1/eps)) / (2b)) + 1, eps = 1e-15.
int image_terms(double t, double b);

double transition_kernel(const DomainSpec& spec, double t, double x, double y);

/// Endpoint images z with Pi_Z(t;x,y) = sum_z G_t(x - z) (one entry on the full line).
std::vector<double> endpoint_images(const DomainSpec& spec, double t, double y);

struct KernelBoundReport {
  double c;  // inf over t and grid of sqrt(t) Pi(t;x,x)
  double C;  // sup over t and grid of sqrt(t) Pi(t;x,y)
};

/// Empirical constants of c <= sqrt(t) Pi(t;x,x), sqrt(t) Pi(t;x,y) <= C on a
/// dense grid for t in (0,1]. Unbounded domains are scanned to 10 sqrt(t) past
/// the boundary (and symmetric around 0 on the full line).
KernelBoundReport kernel_bound_check(const DomainSpec& spec, std::span<const double> t_list, int grid = 201);

}  // namespace rsk::domain
