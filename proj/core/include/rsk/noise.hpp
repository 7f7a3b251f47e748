#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rsk/random.hpp"

namespace rsk::noise {

/// Piecewise-constant function on the grid origin + k*bin_width, k = 0..size-1.
struct StepFunction {
  double origin = 0.0;
  double bin_width = 1.0;
  std::vector<double> values;

  static StepFunction indicator(double a, double b);

  std::size_t size() const { return values.size(); }
  double begin() const { return origin; }
  double end() const { return origin + bin_width * static_cast<double>(values.size()); }
  double l1_norm() const;
  double lq_norm(double q) const;
  double integral() const;
  /// Extent of the nonzero bins, or nullopt for the zero function.
  std::optional<std::pair<double, double>> support() const;
};

using Kernel = std::function<double(double)>;

struct White {
  double sigma2 = 1.0;
};

struct Fractional {
  double hurst = 0.75;
  double sigma2 = 1.0;
};

/// gamma = gamma1 + gamma2 with gamma1 in L^p (possibly singular at 0) and
/// gamma2 bounded. gamma1 enters only through its even second antiderivative
/// psi1 (psi1(0) = 0, psi1'' = gamma1), which makes cell-pair integrals exact.
struct LpSingular {
  double p = 1.0;
  Kernel gamma1_psi;
  Kernel gamma2;           // may be empty (gamma2 = 0)
  double gamma1_lp_norm;   // ||gamma1||_p, used by the seminorm bound
  double gamma2_sup = 0.0; // sup |gamma2|
};

struct Bounded {
  Kernel gamma;
  double sup = 0.0;  // sup |gamma|
};

/// Stationary covariance gamma of the noise. The induced form
/// <f,g> = ∬ f(x) gamma(x-y) g(y) dx dy is evaluated exactly on step functions
/// (white, fractional, gamma1 part of L^p-singular) or with the midpoint rule
/// on cell pairs (bounded kernels, gamma2).
class CovarianceModel {
public:
  using Variant = std::variant<White, Fractional, LpSingular, Bounded>;

  CovarianceModel(Variant v, std::optional<double> support_radius, std::string name);

  static CovarianceModel white(double sigma2 = 1.0);
  static CovarianceModel fractional(double hurst, double sigma2 = 1.0);
  /// gamma1(x) = sigma2 |x|^-e on |x| <= 1; needs e*p < 1.
  static CovarianceModel lp_power(double e, double p, double sigma2 = 1.0);
  /// gamma1(x) = sigma2 (-log|x|)^e on |x| <= 1.
  static CovarianceModel lp_log(double e, double p, double sigma2 = 1.0);
  static CovarianceModel bounded_gaussian(double sigma2 = 1.0);
  static CovarianceModel bounded_const(double sigma2 = 1.0);
  /// sigma2 (1 - |x|/K)_+, compactly supported on [-K, K].
  static CovarianceModel bounded_triangle(double radius, double sigma2 = 1.0);

  const Variant& variant() const { return v_; }
  const std::string& name() const { return name_; }
  const std::optional<double>& support_radius() const { return support_radius_; }
  void set_support_radius(std::optional<double> k) { support_radius_ = k; }

  /// Compactly supported in the sense of the rigidity theorems (white noise is).
  bool compactly_supported() const;
  bool is_white() const { return std::holds_alternative<White>(v_); }

  /// ∬ gamma(x-y) over [0,h] x [lag*h, (lag+1)*h].
  double cell_pair_weight(double h, long lag) const;

private:
  Variant v_;
  std::optional<double> support_radius_;
  std::string name_;
};

/// Lag weights of a model on a fixed grid width h. Shared read-only between
/// threads once built; lags past the table are computed on the fly.
class GridKernel {
public:
  GridKernel(const CovarianceModel& model, double h, std::size_t max_lag = 0);

  double h() const { return h_; }
  double weight(long lag) const;
  const CovarianceModel& model() const { return model_; }

  /// <f, g> for dense bin arrays starting at integer grid offsets f_off, g_off.
  double inner(std::span<const double> f, long f_off, std::span<const double> g, long g_off) const;

private:
  CovarianceModel model_;
  double h_;
  std::vector<double> table_;
  bool white_;
  std::optional<long> zero_beyond_;
};

double inner_product(const StepFunction& f, const StepFunction& g, const CovarianceModel& model);
double seminorm_sq(const StepFunction& f, const CovarianceModel& model);

/// Dense symmetric matrix, row-major.
struct SymMatrix {
  std::size_t n = 0;
  std::vector<double> data;
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double trace() const;
};

/// M_ij = <cell_i, cell_j>. Throws ModelError when the factorization finds a
/// negative pivot below -1e-10 * trace.
SymMatrix gram_matrix(std::span<const StepFunction> cells, const CovarianceModel& model);

/// Diagonal-pivoted Cholesky factor L with M ~ L L^T, rows in the original
/// order, columns past the numerical rank zero. Stops once every remaining
/// pivot is within tol = rel_tol * trace; a remaining pivot below -tol throws ModelError.
SymMatrix clamped_cholesky(const SymMatrix& m, double rel_tol = 1e-10);

/// Samples cell averages xi(c_i)/||c_i||_1 with covariance <c_i,c_j>/(|c_i||c_j|).
/// Factorizes once; `sample` is O(n^2) (O(n) for white noise).
class CellNoiseSampler {
public:
  CellNoiseSampler(std::span<const StepFunction> cells, const CovarianceModel& model);
  std::vector<double> sample(Rng& rng) const;
  void sample_into(Rng& rng, std::span<double> out) const;
  std::size_t size() const { return n_; }

private:
  std::size_t n_;
  std::vector<double> diag_sd_;  // white fast path
  SymMatrix factor_;
  std::size_t rank_ = 0;
  bool diagonal_ = false;
};

std::vector<double> sample_cell_noise(std::span<const StepFunction> cells, const CovarianceModel& model, Rng& rng);

double d_exponent(const CovarianceModel& model);

/// Right-hand side of the seminorm-to-L^q bound with its explicit constant:
/// white  sigma2 ||f||_2^2; fractional 2H sigma2 t^H (t^-1/2 ||f||_2^2 + t^-1 ||f||_1^2);
/// L^p-singular ||gamma1||_p ||f||_r^2 + sup|gamma2| ||f||_1^2 with r = 1/(1-1/2p);
/// bounded sup|gamma| ||f||_1^2. `t` only matters for fractional noise.
double seminorm_lp_bound(const StepFunction& f, const CovarianceModel& model, double t = 1.0);

}  // namespace rsk::noise
