// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rsk/airy.hpp"
#include "rsk/cli/experiment.hpp"
#include "rsk/feynman_kac.hpp"
#include "rsk/localtime.hpp"
#include "rsk/noise.hpp"
#include "rsk/paths.hpp"
#include "rsk/random.hpp"
#include "rsk/spectrum.hpp"
#include "rsk/stats.hpp"

using namespace rsk;
using domain::DomainSpec;
using domain::PotentialSpec;
using noise::CovarianceModel;
namespace fk = rsk::feynman_kac;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> dyadic_times() {
  std::vector<double> ts;
  for (int k = 8; k >= 2; --k) ts.push_back(std::ldexp(1.0, -k));
  return ts;
}

Outcome airy_limit() {
  Outcome o;
  const double limit = 1.0 / (4.0 * std::numbers::pi);
  const double v = airy::variance_closed_form(1e-3);
  o.require(std::abs(v - limit) < 1e-4, fmt("closed form at 1e-3 = %.8f vs %.8f", v, limit));
  double worst = 0.0;
  for (double t : {0.25, 0.5, 1.0, 2.0})
    worst = std::max(worst, rel(airy::variance_quadrature(t).value, airy::variance_closed_form(t)));
  o.require(worst < 1e-6, fmt("max quadrature rel error %.2e", worst));
  return o;
}

Outcome okounkov() {
  Outcome o;
  double worst = 0.0;
  int n = 0;
  for (double t : {0.5, 1.0, 2.0})
    for (auto [u, v] : {std::pair{0.0, 0.0}, std::pair{1.0, -0.5}, std::pair{-2.0, -1.0}, std::pair{0.5, 0.5}}) {
      worst = std::max(worst, rel(airy::airy_laplace_quadrature(t, u, v), airy::airy_laplace(t, u, v)));
      ++n;
    }
  o.require(n == 12 && worst < 1e-8, fmt("%d grid points, max rel error %.2e", n, worst));
  return o;
}

Outcome projection() {
  Outcome o;
  double worst = 0.0;
  for (double x : {-2.0, 0.0, 2.0}) worst = std::max(worst, std::abs(airy::projection_integral(x) - airy::airy_kernel(x, x)));
  o.require(worst < 1e-6, fmt("max abs error %.2e", worst));
  return o;
}

Outcome spectral_oracle() {
  Outcome o;
  const auto line = DomainSpec::full_line();
  const auto op = spectrum::discretize_deterministic(line, PotentialSpec::harmonic(line), 4000, 10.0);
  const auto ev = spectrum::eigenvalues(op, 5);
  double worst = 0.0;
  for (int k = 1; k <= 5; ++k) worst = std::max(worst, rel(ev[k - 1], std::sqrt(2.0) * (k - 0.5)));
  o.require(worst < 1e-3, fmt("harmonic k<=5 max rel error %.2e", worst));

  const auto iv = DomainSpec::interval(1.0);
  const auto dop = spectrum::discretize_deterministic(iv, PotentialSpec::zero(iv), 4000);
  const auto dv = spectrum::eigenvalues(dop, 10);
  worst = 0.0;
  for (int k = 1; k <= 10; ++k) worst = std::max(worst, rel(dv[k - 1], std::numbers::pi * std::numbers::pi * k * k / 2.0));
  o.require(worst < 1e-3, fmt("Dirichlet k<=10 max rel error %.2e", worst));
  return o;
}

Outcome local_time_scaling() {
  Outcome o;
  localtime::StudyParams p;
  p.n_paths = 10000;
  p.seed = 20260101;
  const auto q2 = localtime::scaling_study(2.0, dyadic_times(), p);
  o.require(std::abs(q2.fit->slope - 1.5) <= 0.1, fmt("q=2 slope %.4f", q2.fit->slope));
  const auto q1 = localtime::scaling_study(1.0, dyadic_times(), p);
  o.require(std::abs(q1.fit->slope - 2.0) < 1e-9, fmt("q=1 slope %.12f", q1.fit->slope));
  const auto ks = stats::ks_two_sample(q2.samples.front(), q2.samples.back());
  o.require(ks.p_value > 1e-3, fmt("KS p-value %.3f", ks.p_value));
  return o;
}

Outcome d_exponents() {
  Outcome o;
  localtime::StudyParams p;
  p.n_paths = 10000;
  p.seed = 20260102;
  const auto line = DomainSpec::full_line();
  const std::pair<CovarianceModel, double> cases[] = {{CovarianceModel::white(), 1.5},
                                                       {CovarianceModel::fractional(0.75), 1.75},
                                                       {CovarianceModel::bounded_const(), 2.0}};
  for (const auto& [model, target] : cases) {
    const auto s = localtime::gamma_lt_scaling(model, line, dyadic_times(), p);
    o.require(std::abs(s.fit->slope - target) <= 0.1, fmt("%s slope %.4f (%.2f)", model.name().c_str(), s.fit->slope, target));
  }
  return o;
}

fk::FkConfig fk_config(const DomainSpec& spec, const PotentialSpec& pot, const CovarianceModel& model, std::size_t n,
                       std::uint64_t seed) {
  fk::FkConfig c{spec, pot, model, {}};
  c.params.n_paths = n;
  c.params.seed = seed;
  return c;
}

Outcome cross_oracle() {
  Outcome o;
  const auto iv = DomainSpec::interval(1.0);
  const auto pot = PotentialSpec::zero(iv);
  const auto model = CovarianceModel::bounded_gaussian();
  const double t = 0.5;
  const auto mean = fk::trace_mean(t, fk_config(iv, pot, model, 8192, 71));
  const auto var = fk::trace_variance(t, fk_config(iv, pot, model, 256, 72));
  spectrum::DirectConfig dc{iv, pot, model};
  dc.n = 256;
  dc.n_realizations = 500;
  dc.seed = 73;
  const auto direct = spectrum::direct_variance(t, dc);
  const double sm = std::hypot(mean.stderr_mean, direct.stderr_mean);
  const double sv = std::hypot(var.stderr_variance, direct.stderr_variance);
  o.require(std::abs(mean.mean - direct.mean) < 3 * sm,
            fmt("mean FK %.6f vs FD %.6f (%.2f SE)", mean.mean, direct.mean, std::abs(mean.mean - direct.mean) / sm));
  o.require(std::abs(var.variance - direct.variance) < 3 * sv,
            fmt("variance FK %.6f (%zu pairs) vs FD %.6f (%.2f SE)", var.variance, var.n_paths, direct.variance,
                std::abs(var.variance - direct.variance) / sv));
  return o;
}

Outcome variance_decay() {
  Outcome o;
  const auto iv = DomainSpec::interval(1.0, 0.0, 0.0);
  const auto pot = PotentialSpec::zero(iv);
  const std::vector<double> ts{0.05, 0.1, 0.2, 0.4};
  const auto white = fk::variance_scan(ts, fk_config(iv, pot, CovarianceModel::white(), 64, 81));
  o.require(white.fit && white.fit->slope >= 0.4, fmt("white slope %.3f", white.fit ? white.fit->slope : NAN));
  const auto cst = fk::variance_scan(ts, fk_config(iv, pot, CovarianceModel::bounded_const(), 64, 82));
  o.require(cst.fit && cst.fit->slope >= 0.9, fmt("bounded const slope %.3f", cst.fit ? cst.fit->slope : NAN));
  return o;
}

Outcome separation() {
  Outcome o;
  const double radius = 0.3, t = 0.1;
  const auto model = CovarianceModel::bounded_triangle(radius);
  const auto line = DomainSpec::full_line();
  const auto cfg = fk_config(line, PotentialSpec::harmonic(line), model, 2, 91);
  Rng rng = Rng::stream(91, 0);
  std::size_t separated = 0, nonzero_when_separated = 0, touching_nonzero = 0;
  for (int i = 0; i < 4000; ++i) {
    const double x = -1.5 + 3.0 * rng.uniform(), y = -1.5 + 3.0 * rng.uniform();
    const auto s = fk::abcd_sample(x, y, t, cfg, rng);
    if (s.separated) {
      ++separated;
      if (s.D != 0.0) ++nonzero_when_separated;
    } else if (s.D != 0.0) {
      ++touching_nonzero;
    }
  }
  o.require(separated > 100 && nonzero_when_separated == 0,
            fmt("estimator: %zu separated pairs, %zu with D != 0", separated, nonzero_when_separated));

  // Independent recomputation from raw bridges and the continuum inner product.
  const double h = paths::default_bin_width(t);
  const int n = paths::default_steps(t);
  std::size_t checked = 0, violations = 0;
  for (int i = 0; i < 2000; ++i) {
    const double x = -1.5 + 3.0 * rng.uniform(), y = -1.5 + 3.0 * rng.uniform();
    const auto lx = paths::occupation_local_time(paths::sample_bridge(line, x, x, t, n, rng), h).occupation;
    const auto ly = paths::occupation_local_time(paths::sample_bridge(line, y, y, t, n, rng), h).occupation;
    const auto sx = lx.support(), sy = ly.support();
    const double gap = std::max(sy->first - sx->second, sx->first - sy->second);
    if (gap > radius) {
      ++checked;
      if (noise::inner_product(lx, ly, model) != 0.0) ++violations;
    }
  }
  o.require(checked > 100 && violations == 0,
            fmt("recomputed: %zu separated density pairs, %zu nonzero", checked, violations));
  o.require(touching_nonzero > 0, fmt("%zu overlapping pairs with D != 0", touching_nonzero));
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome invariants() {
  Outcome o;
  Rng rng = Rng::stream(101, 0);
  const DomainSpec domains[] = {DomainSpec::full_line(), DomainSpec::half_line(), DomainSpec::half_line(0.0),
                                DomainSpec::interval(1.0), DomainSpec::interval(0.7, 0.0, 2.0)};
  double worst = 0.0;
  std::size_t n_paths = 0;
  for (const auto& spec : domains)
    for (double t : {0.01, 0.1, 0.5}) {
      const double h = paths::default_bin_width(t);
      for (int i = 0; i < 200; ++i) {
        const double x = paths::fold(spec, 0.35 + rng.normal());
        const auto occ = paths::occupation_local_time(paths::sample_bridge(spec, x, x, t, paths::default_steps(t), rng), h);
        worst = std::max(worst, rel(occ.occupation.l1_norm(), t));
        ++n_paths;
      }
    }
  o.require(worst < 1e-12, fmt("L1 = t over %zu paths, max rel error %.1e", n_paths, worst));

  const CovarianceModel models[] = {CovarianceModel::white(),        CovarianceModel::fractional(0.75),
                                    CovarianceModel::lp_power(0.5, 1.0), CovarianceModel::lp_log(0.5, 2.0),
                                    CovarianceModel::bounded_gaussian(), CovarianceModel::bounded_const(),
                                    CovarianceModel::bounded_triangle(0.4)};
  double worst_min = 0.0;
  for (const auto& m : models) {
    std::vector<noise::StepFunction> cells;
    double a = -2.0;
    for (int i = 0; i < 120; ++i) {
      const double w = 0.01 * static_cast<double>(1 + rng.next_u64() % 5);
      cells.push_back(noise::StepFunction::indicator(a, a + w));
      a += w;
    }
    const auto g = noise::gram_matrix(cells, m);
    Eigen::MatrixXd mat(g.n, g.n);
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j = 0; j < g.n; ++j) mat(i, j) = g(i, j);
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mat, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    worst_min = std::min(worst_min, lo / g.trace());
  }
  o.require(worst_min > -1e-12, fmt("Gram PSD for 7 models, min eigenvalue/trace %.1e", worst_min));

  std::size_t samples = 0, bad = 0;
  const auto iv = DomainSpec::interval(1.0, domain::kDirichlet, 0.0);
  for (const auto& m : models) {
    const auto cfg = fk_config(iv, PotentialSpec::zero(iv), m, 2, 102);
    for (int i = 0; i < 300; ++i) {
      const auto s = fk::abcd_sample(rng.uniform(), rng.uniform(), 0.05 + 0.5 * rng.uniform(), cfg, rng);
      ++samples;
      if (std::abs(s.D) > 2.0 * s.C * (1.0 + 1e-12) + 1e-300) ++bad;
    }
  }
  o.require(bad == 0, fmt("|D| <= 2C on %zu samples", samples));

  const auto dir = std::filesystem::temp_directory_path() / "rsk_acceptance_determinism";
  std::filesystem::remove_all(dir);
  auto raw = cli::Json::parse(R"({"domain": {"case": "interval", "b": 1}, "noise": {"preset": "fractional", "hurst": 0.7},
                                  "t_list": [0.1, 0.3], "n_paths": 16, "seed": 5})");
  std::vector<std::string> runs;
  for (unsigned threads : {1u, 1u, 3u}) {
    raw["threads"] = threads;
    raw["out"] = (dir / std::to_string(runs.size())).string();
    const auto cfg = cli::parse_config("trace", raw);
    cli::write_artifacts(cfg, cli::run(cfg));
    runs.push_back(slurp(dir / std::to_string(runs.size()) / "trace.csv"));
  }
  std::filesystem::remove_all(dir);
  o.require(!runs[0].empty() && runs[0] == runs[1] && runs[0] == runs[2], "repeated and threaded runs byte-identical");
  return o;
}

Outcome rank_one() {
  Outcome o;
  const auto iv = DomainSpec::interval(1.0);
  const auto pot = PotentialSpec::zero(iv);
  const auto model = CovarianceModel::bounded_const();
  const double t = 0.5;

  Rng rng = Rng::stream(111, 0);
  const auto base = spectrum::eigenvalues(spectrum::discretize_deterministic(iv, pot, 256), 20);
  const auto noisy = spectrum::eigenvalues(spectrum::discretize(iv, pot, model, 256, std::nullopt, rng), 20);
  double spread = 0.0;
  for (std::size_t k = 0; k < base.size(); ++k) spread = std::max(spread, std::abs((noisy[k] - base[k]) - (noisy[0] - base[0])));
  o.require(spread < 1e-8, fmt("single realization shifts all 20 eigenvalues by %.4f (spread %.1e)", noisy[0] - base[0], spread));

  double e0 = 0.0;
  for (int k = 1; k < 200; ++k) e0 += std::exp(-t * std::numbers::pi * std::numbers::pi * k * k / 2.0);
  const double closed = e0 * e0 * std::exp(t * t) * std::expm1(t * t);

  const auto fkv = fk::trace_variance(t, fk_config(iv, pot, model, 256, 112));
  const double zf = std::abs(fkv.variance - closed) / fkv.stderr_variance;
  o.require(zf < 3.0, fmt("FK %.6f vs closed form %.6f (%.2f SE)", fkv.variance, closed, zf));

  spectrum::DirectConfig dc{iv, pot, model};
  dc.n_realizations = 4000;
  dc.seed = 113;
  const auto d = spectrum::direct_variance(t, dc);
  const double zd = std::abs(d.variance - closed) / d.stderr_variance;
  o.require(zd < 3.0, fmt("FD %.6f (%.2f SE)", d.variance, zd));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Airy variance limit and quadrature", airy_limit},
      {"Airy Laplace identity", okounkov},
      {"Airy projection identity", projection},
      {"spectral oracle", spectral_oracle},
      {"local-time scaling", local_time_scaling},
      {"gamma seminorm exponents", d_exponents},
      {"Feynman-Kac vs direct spectrum", cross_oracle},
      {"variance decay", variance_decay},
      {"compact-support separation", separation},
      {"exact invariants", invariants},
      {"rank-one closed loop", rank_one},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("criterion %2zu %-36s %s (%.1fs) %s\n", i + 1, criteria[i].first.c_str(), out.pass ? "PASS" : "FAIL",
                secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
