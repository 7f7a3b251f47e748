#include "rsk/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rsk/error.hpp"

namespace rsk::domain {

DomainSpec::DomainSpec(Variant v) : v_(v) {
  if (const auto* iv = std::get_if<Interval>(&v_)) {
    if (!(iv->b > 0.0) || !std::isfinite(iv->b)) throw InputError("interval length b must be > 0");
    if (std::isnan(iv->alpha_bar) || std::isnan(iv->beta_bar) || iv->alpha_bar == INFINITY || iv->beta_bar == INFINITY)
      throw InputError("boundary parameters must be real or -inf");
  }
  if (const auto* hl = std::get_if<HalfLine>(&v_)) {
    if (std::isnan(hl->alpha_bar) || hl->alpha_bar == INFINITY) throw InputError("alpha_bar must be real or -inf");
  }
}

Case DomainSpec::kind() const { return static_cast<Case>(v_.index() + 1); }

double DomainSpec::length() const {
  if (const auto* iv = std::get_if<Interval>(&v_)) return iv->b;
  throw InputError("domain is unbounded");
}

double DomainSpec::upper() const {
  if (const auto* iv = std::get_if<Interval>(&v_)) return iv->b;
  return std::numeric_limits<double>::infinity();
}

bool DomainSpec::contains(double x) const { return std::isfinite(x) && x >= lower() && x <= upper(); }

bool DomainSpec::has_dirichlet() const {
  if (const auto* hl = std::get_if<HalfLine>(&v_)) return hl->alpha_bar == kDirichlet;
  if (const auto* iv = std::get_if<Interval>(&v_)) return iv->alpha_bar == kDirichlet || iv->beta_bar == kDirichlet;
  return false;
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  auto bc = [](double v) { return v == kDirichlet ? std::string("dirichlet") : "robin(" + std::to_string(v) + ")"; };
  switch (kind()) {
    case Case::FullLine: os << "full_line"; break;
    case Case::HalfLine: os << "half_line[" << bc(std::get<HalfLine>(v_).alpha_bar) << "]"; break;
    case Case::Interval: {
      const auto& iv = std::get<Interval>(v_);
      os << "interval(b=" << iv.b << ")[" << bc(iv.alpha_bar) << "," << bc(iv.beta_bar) << "]";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> spot_grid(const DomainSpec& d) {
  std::vector<double> xs(1000);
  double lo = -50.0, hi = 50.0;
  if (d.kind() == Case::HalfLine) lo = 0.0;
  if (d.kind() == Case::Interval) {
    lo = 0.0;
    hi = d.length();
  }
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = lo + (hi - lo) * static_cast<double>(i) / 999.0;
  return xs;
}

}  // namespace

PotentialSpec::PotentialSpec(std::function<double(double)> eval, double lower_bound,
                             std::optional<GrowthCertificate> growth, const DomainSpec& domain, std::string name)
    : eval_(std::move(eval)), lower_bound_(lower_bound), growth_(growth), name_(std::move(name)) {
  if (!eval_) throw InputError("potential: missing evaluator");
  if (growth_ && !(growth_->kappa > 0.0 && growth_->a > 0.0 && growth_->nu >= 0.0))
    throw InputError("growth certificate needs kappa > 0, a > 0, nu >= 0");
  for (double x : spot_grid(domain)) {
    const double v = eval_(x);
    if (std::isnan(v)) throw InputError("potential " + name_ + " is NaN at x=" + std::to_string(x));
    const double tol = 1e-12 * (1.0 + std::abs(v));
    if (v < lower_bound_ - tol)
      throw InputError("potential " + name_ + " violates its lower bound at x=" + std::to_string(x));
    if (growth_) {
      const double floor = std::pow(std::abs(growth_->kappa * x), growth_->a) - growth_->nu;
      if (v < floor - tol) throw InputError("potential " + name_ + " violates its growth certificate at x=" + std::to_string(x));
    }
  }
}

PotentialSpec PotentialSpec::zero(const DomainSpec& domain) {
  PotentialSpec p([](double) { return 0.0; }, 0.0, std::nullopt, domain, "zero");
  p.zero_ = true;
  return p;
}

PotentialSpec PotentialSpec::abs_pow(const DomainSpec& domain, double kappa, double a, double nu) {
  return {[kappa, a](double x) { return std::pow(std::abs(kappa * x), a); }, 0.0, GrowthCertificate{kappa, a, nu},
          domain, "abs_pow"};
}

PotentialSpec PotentialSpec::linear_half(const DomainSpec& domain) {
  if (domain.kind() == Case::FullLine) throw InputError("linear_half is not bounded below on the full line");
  return {[](double x) { return 0.5 * x; }, 0.0, GrowthCertificate{0.5, 1.0, 0.0}, domain, "linear_half"};
}

PotentialSpec PotentialSpec::harmonic(const DomainSpec& domain) {
  return {[](double x) { return x * x; }, 0.0, GrowthCertificate{1.0, 2.0, 0.0}, domain, "harmonic"};
}

// ---------------------------------------------------------------------------

double gaussian_kernel(double t, double x) {
  if (!(t > 0.0)) throw InputError("gaussian_kernel: t must be > 0");
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

int image_terms(double t, double b) {
  constexpr double eps = 1e-15;
  return static_cast<int>(std::ceil(std::sqrt(2.0 * t * std::log(1.0 / eps)) / (2.0 * b))) + 1;
}

std::vector<double> endpoint_images(const DomainSpec& spec, double t, double y) {
  switch (spec.kind()) {
    case Case::FullLine: return {y};
    case Case::HalfLine: return {y, -y};
    case Case::Interval: {
      const double b = spec.length();
      const int k_max = image_terms(t, b);
      std::vector<double> z;
      z.reserve(4 * static_cast<std::size_t>(k_max) + 2);
      for (int k = -k_max; k <= k_max; ++k) {
        z.push_back(2.0 * b * k + y);
        z.push_back(2.0 * b * k - y);
      }
      return z;
    }
  }
  return {};
}

double transition_kernel(const DomainSpec& spec, double t, double x, double y) {
  if (!(t > 0.0)) throw InputError("transition_kernel: t must be > 0");
  if (!spec.contains(x) || !spec.contains(y)) throw InputError("transition_kernel: point outside the domain");
  double s = 0.0;
  for (double z : endpoint_images(spec, t, y)) s += gaussian_kernel(t, x - z);
  return s;
}

KernelBoundReport kernel_bound_check(const DomainSpec& spec, std::span<const double> t_list, int grid) {
  if (t_list.empty()) throw InputError("kernel_bound_check: empty t list");
  double c = std::numeric_limits<double>::infinity(), C = 0.0;
  for (double t : t_list) {
    if (!(t > 0.0 && t <= 1.0)) throw InputError("kernel_bound_check: t must lie in (0, 1]");
    double lo = 0.0, hi = 0.0;
    switch (spec.kind()) {
      case Case::FullLine: lo = -10.0 * std::sqrt(t); hi = -lo; break;
      case Case::HalfLine: hi = 10.0 * std::sqrt(t); break;
      case Case::Interval: hi = spec.length(); break;
    }
    const double st = std::sqrt(t);
    for (int i = 0; i < grid; ++i) {
      const double x = lo + (hi - lo) * i / (grid - 1);
      c = std::min(c, st * transition_kernel(spec, t, x, x));
      for (int j = 0; j < grid; ++j) {
        const double y = lo + (hi - lo) * j / (grid - 1);
        C = std::max(C, st * transition_kernel(spec, t, x, y));
      }
    }
  }
  return {c, C};
}

}  // namespace rsk::domain
