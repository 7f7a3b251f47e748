#include "rsk/cli/experiment.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "rsk/airy.hpp"
#include "rsk/error.hpp"
#include "rsk/feynman_kac.hpp"
#include "rsk/localtime.hpp"
#include "rsk/paths.hpp"
#include "rsk/rigidity.hpp"
#include "rsk/spectrum.hpp"
#include "rsk/stats.hpp"

#ifndef RSK_VERSION
#define RSK_VERSION "0.0.0"
#endif
#ifndef RSK_GIT_REV
#define RSK_GIT_REV "unknown"
#endif

namespace rsk::cli {

namespace {

/// Typed access to one JSON object; remembers consumed keys so leftovers can be reported.
class Fields {
public:
  Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, double fallback, double lo, double hi, bool open_lo = false) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
    const double x = v.get<double>();
    check_range(key, x, lo, hi, open_lo);
    return x;
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t lo, std::size_t hi) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path(key) + ": expected a nonnegative integer");
    const auto x = v.get<unsigned long long>();
    if (x < lo || x > hi)
      throw ConfigError(path(key) + ": " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    return static_cast<std::size_t>(x);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
    return v.get<bool>();
  }

  /// A finite number or the string "dirichlet".
  double boundary(const std::string& key) {
    if (!has(key)) return domain::kDirichlet;
    const auto& v = j_.at(key);
    if (v.is_string() && v.get<std::string>() == "dirichlet") return domain::kDirichlet;
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number or \"dirichlet\"");
    const double x = v.get<double>();
    check_range(key, x, -1e6, 1e6, false);
    return x;
  }

  std::vector<double> positive_list(const std::string& key) {
    std::vector<double> out;
    if (!has(key)) return out;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(path(key) + ": expected a nonempty array of numbers");
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(path(key) + ": expected a nonempty array of numbers");
      out.push_back(e.get<double>());
    }
    for (double x : out) check_range(key, x, 0.0, 1e6, true);
    return out;
  }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void reject_unknown() const {
    for (const auto& [k, _] : j_.items())
      if (!seen_.count(k)) throw ConfigError(path(k) + ": unknown key");
  }

private:
  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void check_range(const std::string& key, double x, double lo, double hi, bool open_lo) const {
    const bool ok = std::isfinite(x) && (open_lo ? x > lo : x >= lo) && x <= hi;
    if (!ok) {
      std::ostringstream os;
      os << path(key) << ": " << x << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
      throw ConfigError(os.str());
    }
  }

  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Json boundary_json(double v) { return v == domain::kDirichlet ? Json("dirichlet") : Json(v); }

domain::DomainSpec parse_domain(const Json& j, Json& echo) {
  Fields f(j, "domain");
  const std::string kind = f.text("case", "full_line");
  Json e;
  e["case"] = kind;
  domain::DomainSpec spec = domain::DomainSpec::full_line();
  if (kind == "full_line") {
  } else if (kind == "half_line") {
    const double a = f.boundary("alpha_bar");
    spec = domain::DomainSpec::half_line(a);
    e["alpha_bar"] = boundary_json(a);
  } else if (kind == "interval") {
    const double b = f.number("b", 1.0, 0.0, 1e6, true);
    const double a = f.boundary("alpha_bar"), c = f.boundary("beta_bar");
    spec = domain::DomainSpec::interval(b, a, c);
    e["b"] = b;
    e["alpha_bar"] = boundary_json(a);
    e["beta_bar"] = boundary_json(c);
  } else {
    throw ConfigError("domain.case: expected full_line, half_line or interval, got " + kind);
  }
  f.reject_unknown();
  echo = e;
  return spec;
}

domain::PotentialSpec parse_potential(const Json& j, const domain::DomainSpec& spec, Json& echo) {
  Fields f(j, "potential");
  const std::string preset = f.text("preset", "zero");
  Json e;
  e["preset"] = preset;
  auto result = [&]() -> domain::PotentialSpec {
    if (preset == "zero") return domain::PotentialSpec::zero(spec);
    if (preset == "harmonic") return domain::PotentialSpec::harmonic(spec);
    if (preset == "linear_half") return domain::PotentialSpec::linear_half(spec);
    if (preset == "abs_pow") {
      const double kappa = f.number("kappa", 1.0, 0.0, 1e6, true);
      const double a = f.number("a", 2.0, 0.0, 100.0, true);
      const double nu = f.number("nu", 0.0, 0.0, 1e6);
      e["kappa"] = kappa;
      e["a"] = a;
      e["nu"] = nu;
      return domain::PotentialSpec::abs_pow(spec, kappa, a, nu);
    }
    throw ConfigError("potential.preset: expected zero, harmonic, linear_half or abs_pow, got " + preset);
  }();
  f.reject_unknown();
  echo = e;
  return result;
}

noise::CovarianceModel parse_noise(const Json& j, Json& echo) {
  Fields f(j, "noise");
  const std::string preset = f.text("preset", "white");
  Json e;
  e["preset"] = preset;
  const double sigma2 = f.number("sigma2", 1.0, 0.0, 1e6, true);
  e["sigma2"] = sigma2;
  auto model = [&]() -> noise::CovarianceModel {
    if (preset == "white") return noise::CovarianceModel::white(sigma2);
    if (preset == "fractional") {
      const double h = f.number("hurst", 0.75, 0.5, 1.0, true);
      if (!(h < 1.0)) throw ConfigError("noise.hurst: must lie strictly inside (1/2, 1)");
      e["hurst"] = h;
      return noise::CovarianceModel::fractional(h, sigma2);
    }
    if (preset == "lp_power" || preset == "lp_log") {
      const double ex = f.number("e", 0.5, 0.0, 100.0, true);
      const double p = f.number("p", 1.0, 1.0, 1e6);
      e["e"] = ex;
      e["p"] = p;
      return preset == "lp_power" ? noise::CovarianceModel::lp_power(ex, p, sigma2)
                                  : noise::CovarianceModel::lp_log(ex, p, sigma2);
    }
    if (preset == "bounded_gaussian") return noise::CovarianceModel::bounded_gaussian(sigma2);
    if (preset == "bounded_const") return noise::CovarianceModel::bounded_const(sigma2);
    if (preset == "bounded_triangle") {
      const double r = f.number("radius", 1.0, 0.0, 1e6, true);
      e["radius"] = r;
      return noise::CovarianceModel::bounded_triangle(r, sigma2);
    }
    throw ConfigError("noise.preset: unknown preset " + preset);
  }();
  f.reject_unknown();
  echo = e;
  return model;
}

std::vector<double> default_times(const std::string& sub) {
  if (sub == "airy") return {0.25, 0.5, 1.0, 2.0};
  if (sub == "lt-scaling") {
    std::vector<double> ts;
    for (int k = 8; k >= 2; --k) ts.push_back(std::ldexp(1.0, -k));
    return ts;
  }
  if (sub == "variance-scan" || sub == "report") return {0.05, 0.1, 0.2, 0.4};
  if (sub == "trace") return {0.5};
  if (sub == "noise-check") return {0.0625, 0.25, 1.0};
  return {};
}

std::size_t default_paths(const std::string& sub, bool gamma) {
  if (sub == "lt-scaling") return gamma ? 2000 : 10000;
  if (sub == "trace") return 256;
  return 64;
}

bool needs_noise(const std::string& sub, bool gamma) {
  return sub == "noise-check" || sub == "trace" || sub == "variance-scan" || sub == "report" ||
         (sub == "lt-scaling" && gamma);
}

}  // namespace

ExperimentConfig parse_config(const std::string& subcommand, Json raw, const Overrides& ov) {
  bool known = false;
  for (const auto& s : subcommands()) known = known || s == subcommand;
  if (!known) throw ConfigError("unknown subcommand " + subcommand);
  if (raw.is_null()) raw = Json::object();
  if (!raw.is_object()) throw ConfigError("config: expected a JSON object");
  if (ov.t_list) raw["t_list"] = *ov.t_list;
  if (ov.seed) raw["seed"] = *ov.seed;
  if (ov.threads) raw["threads"] = *ov.threads;
  if (ov.out) raw["out"] = *ov.out;
  if (ov.q) raw["q"] = *ov.q;

  ExperimentConfig c;
  c.subcommand = subcommand;
  Fields f(raw, "");
  if (f.has("subcommand") && f.text("subcommand", "") != subcommand)
    throw ConfigError("config is for subcommand " + raw.at("subcommand").dump() + ", not " + subcommand);
  Json& e = c.echo;
  e["subcommand"] = subcommand;

  Json dom_echo, pot_echo, noise_echo;
  c.domain = parse_domain(f.has("domain") ? f.raw("domain") : Json::object(), dom_echo);
  if (subcommand != "airy") e["domain"] = dom_echo;
  c.gamma = f.flag("gamma", false);
  const bool uses_potential = subcommand == "trace" || subcommand == "variance-scan" || subcommand == "spectrum" ||
                              subcommand == "report";
  if (uses_potential || f.has("potential")) {
    c.potential = parse_potential(f.has("potential") ? f.raw("potential") : Json::object(), c.domain, pot_echo);
    e["potential"] = pot_echo;
  }
  if (needs_noise(subcommand, c.gamma) || f.has("noise")) {
    c.noise = parse_noise(f.has("noise") ? f.raw("noise") : Json::object(), noise_echo);
    e["noise"] = noise_echo;
  }

  c.t_list = f.positive_list("t_list");
  if (c.t_list.empty()) c.t_list = default_times(subcommand);
  e["t_list"] = c.t_list;
  c.q = f.number("q", 2.0, 1.0, 2.0);
  if (subcommand == "lt-scaling") {
    e["gamma"] = c.gamma;
    if (!c.gamma) e["q"] = c.q;
  }
  c.n_paths = f.count("n_paths", default_paths(subcommand, c.gamma), 2, 100000000);
  if (f.has("n_steps")) c.n_steps = static_cast<int>(f.count("n_steps", 0, 1, 1000000));
  if (f.has("bin_width")) c.bin_width = f.number("bin_width", 0.0, 0.0, 1e3, true);
  c.n_realizations = f.count("n_realizations", 500, 100, 10000000);
  c.n_grid = f.count("n_grid", 256, 16, 200000);
  c.n_eigen = f.count("n_eigen", 10, 1, c.n_grid);
  if (f.has("radius")) c.radius = f.number("radius", 0.0, 0.0, 1e6, true);
  c.slope_tolerance = f.number("slope_tolerance", 0.1, 0.0, 10.0);
  if (f.has("seed")) {
    const auto& v = raw.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError("seed: expected a nonnegative integer");
    c.seed = v.get<std::uint64_t>();
  }
  c.threads = static_cast<unsigned>(f.count("threads", 1, 1, 1024));
  c.out = f.text("out", ".");
  if (c.out.empty()) throw ConfigError("out: empty path");
  f.reject_unknown();

  if (subcommand != "airy" && subcommand != "spectrum") e["n_paths"] = c.n_paths;
  if (c.n_steps) e["n_steps"] = *c.n_steps;
  if (c.bin_width) e["bin_width"] = *c.bin_width;
  if (subcommand == "spectrum") {
    e["n_grid"] = c.n_grid;
    e["n_eigen"] = c.n_eigen;
    if (c.noise) e["n_realizations"] = c.n_realizations;
  }
  if (c.radius) e["radius"] = *c.radius;
  if (subcommand == "report") e["slope_tolerance"] = c.slope_tolerance;

  const bool stochastic = subcommand != "airy" && (subcommand != "spectrum" || c.noise);
  if (stochastic && !c.seed) throw ConfigError("seed is required for " + subcommand);
  if (c.seed) e["seed"] = *c.seed;
  e["threads"] = c.threads;
  e["out"] = c.out.string();
  return c;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError("malformed config " + path.string() + ": " + ex.what());
  }
}

namespace {

Json fit_json(const ScanResult& scan) {
  Json j;
  j["label"] = scan.label;
  j["degenerate"] = scan.degenerate;
  if (scan.fit) {
    j["slope"] = scan.fit->slope;
    j["slope_ci_95"] = scan.fit->slope_ci_95;
    j["intercept"] = scan.fit->intercept;
    j["r_squared"] = scan.fit->r_squared;
    j["dropped"] = scan.fit->dropped;
  }
  return j;
}

Table scan_table(const std::string& name, const ScanResult& scan, const std::string& value = "estimate") {
  Table t{name, {"t", value, "stderr", "n"}, {}};
  for (const auto& p : scan.points) t.rows.push_back({p.t, p.estimate, p.std_err, static_cast<double>(p.n)});
  return t;
}

std::string slope_line(const ScanResult& scan) {
  char buf[160];
  if (!scan.fit) return scan.label + ": no fit\n";
  std::snprintf(buf, sizeof buf, "%s: slope %.4f +/- %.4f (r^2 %.4f)\n", scan.label.c_str(), scan.fit->slope,
                scan.fit->slope_ci_95, scan.fit->r_squared);
  return buf;
}

feynman_kac::FkConfig fk_config(const ExperimentConfig& c) {
  feynman_kac::FkConfig fk{c.domain, *c.potential, *c.noise, {}};
  fk.params.n_paths = c.n_paths;
  fk.params.n_steps = c.n_steps;
  fk.params.bin_width = c.bin_width;
  fk.params.seed = *c.seed;
  fk.params.threads = c.threads;
  return fk;
}

Artifacts run_noise_check(const ExperimentConfig& c) {
  Artifacts a;
  Table t{"noise_check", {"t", "bin_width", "seminorm_sq", "lp_bound", "bound_holds", "gram_psd", "shift_diff"}, {}};
  bool all_bounds = true, all_psd = true;
  for (std::size_t i = 0; i < c.t_list.size(); ++i) {
    const double ti = c.t_list[i];
    Rng rng = Rng::stream(*c.seed, i);
    const double h = c.bin_width.value_or(paths::default_bin_width(ti));
    const auto starts = localtime::start_grid(c.domain, ti);
    const auto path = paths::sample_process(c.domain, starts[starts.size() / 2], ti,
                                            c.n_steps.value_or(paths::default_steps(ti)), rng);
    noise::StepFunction occ;
    paths::occupation_into(path, h, occ);
    const double norm = noise::seminorm_sq(occ, *c.noise);
    const double bound = noise::seminorm_lp_bound(occ, *c.noise, ti);
    const bool holds = norm <= bound * (1.0 + 1e-12);

    std::vector<noise::StepFunction> cells;
    for (int k = 0; k < 64; ++k) cells.push_back(noise::StepFunction::indicator(k * h, (k + 1) * h));
    bool psd = true;
    try {
      (void)noise::gram_matrix(cells, *c.noise);
    } catch (const ModelError&) {
      psd = false;
    }
    noise::StepFunction shifted = occ;
    shifted.origin += 17.0 * h;
    const double shift = std::abs(noise::seminorm_sq(shifted, *c.noise) - norm);

    all_bounds = all_bounds && holds;
    all_psd = all_psd && psd;
    t.rows.push_back({ti, h, norm, bound, holds ? 1.0 : 0.0, psd ? 1.0 : 0.0, shift});
  }
  a.tables.push_back(std::move(t));
  a.summary["d_exponent"] = noise::d_exponent(*c.noise);
  a.summary["all_bounds_hold"] = all_bounds;
  a.summary["all_gram_psd"] = all_psd;
  a.text = std::string("seminorm bounds ") + (all_bounds ? "hold" : "FAIL") + ", Gram matrices " +
           (all_psd ? "PSD" : "NOT PSD") + "\n";
  return a;
}

Artifacts run_lt_scaling(const ExperimentConfig& c) {
  Artifacts a;
  localtime::StudyParams p;
  p.n_paths = c.n_paths;
  p.n_steps = c.n_steps;
  p.bin_width = c.bin_width;
  p.seed = *c.seed;
  p.threads = c.threads;
  ScanResult scan;
  double expected = 0.0;
  if (c.gamma) {
    scan = localtime::gamma_lt_scaling(*c.noise, c.domain, c.t_list, p);
    expected = noise::d_exponent(*c.noise);
  } else {
    scan = localtime::scaling_study(c.q, c.t_list, p);
    expected = 1.0 + 1.0 / c.q;
  }
  a.tables.push_back(scan_table("lt_scaling", scan));
  a.summary = fit_json(scan);
  a.summary["expected_slope"] = expected;
  if (!c.gamma && scan.samples.size() >= 2) {
    const auto ks = stats::ks_two_sample(scan.samples.front(), scan.samples.back());
    a.summary["ks_statistic"] = ks.statistic;
    a.summary["ks_p_value"] = ks.p_value;
  }
  a.text = slope_line(scan);
  return a;
}

Artifacts run_trace(const ExperimentConfig& c) {
  Artifacts a;
  const auto fk = fk_config(c);
  Table t{"trace", {"t", "mean", "stderr_mean", "variance", "stderr_variance", "n_paths", "n_pairs"}, {}};
  for (double ti : c.t_list) {
    const auto m = feynman_kac::trace_mean(ti, fk);
    const auto v = feynman_kac::trace_variance(ti, fk);
    t.rows.push_back({ti, m.mean, m.stderr_mean, v.variance, v.stderr_variance, static_cast<double>(m.n_paths),
                      static_cast<double>(v.n_paths)});
  }
  std::string text;
  for (const auto& r : t.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "t=%g  E Tr = %.6g +/- %.2g  Var Tr = %.6g +/- %.2g\n", r[0], r[1], r[2], r[3], r[4]);
    text += line;
  }
  a.tables.push_back(std::move(t));
  a.summary["rows"] = c.t_list.size();
  a.text = text;
  return a;
}

std::optional<double> predicted(const ExperimentConfig& c) {
  try {
    return rigidity::predicted_exponent(c.domain, *c.noise, c.potential->growth());
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

Artifacts run_variance_scan(const ExperimentConfig& c) {
  Artifacts a;
  const auto scan = feynman_kac::variance_scan(c.t_list, fk_config(c));
  a.tables.push_back(scan_table("variance_scan", scan, "var_estimate"));
  a.summary = fit_json(scan);
  const auto pred = predicted(c);
  a.summary["predicted_exponent"] = pred ? Json(*pred) : Json(nullptr);
  a.text = slope_line(scan);
  return a;
}

Artifacts run_spectrum(const ExperimentConfig& c) {
  Artifacts a;
  Rng rng = c.seed ? Rng::stream(*c.seed, 0) : Rng(0);
  const auto op = spectrum::discretize(c.domain, *c.potential, c.noise, c.n_grid, c.radius, rng);
  const auto ev = spectrum::eigenvalues(op, c.n_eigen);
  Table e{"spectrum", {"k", "eigenvalue"}, {}};
  for (std::size_t k = 0; k < ev.size(); ++k) e.rows.push_back({static_cast<double>(k + 1), ev[k]});
  a.tables.push_back(std::move(e));
  a.summary["grid_spacing"] = op.h;
  a.summary["lower"] = op.lower;
  a.summary["upper"] = op.upper;
  if (!c.t_list.empty()) {
    Table t{"spectrum_trace", {"t", "mean", "stderr_mean", "variance", "stderr_variance", "n"}, {}};
    for (double ti : c.t_list) {
      if (c.noise) {
        spectrum::DirectConfig d{c.domain, *c.potential, c.noise, c.n_grid, c.radius, c.n_realizations, *c.seed,
                                 c.threads};
        const auto m = spectrum::direct_variance(ti, d);
        t.rows.push_back({ti, m.mean, m.stderr_mean, m.variance, m.stderr_variance, static_cast<double>(m.n_paths)});
      } else {
        t.rows.push_back({ti, spectrum::direct_trace(op, ti), 0.0, 0.0, 0.0, 1.0});
      }
    }
    a.tables.push_back(std::move(t));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "lowest eigenvalue %.10g on %zu nodes\n", ev.front(), op.size());
  a.text = buf;
  return a;
}

Artifacts run_airy(const ExperimentConfig& c) {
  Artifacts a;
  Table t{"airy", {"t", "closed_form", "quadrature", "rel_diff"}, {}};
  double worst = 0.0;
  for (double ti : c.t_list) {
    const double cf = airy::variance_closed_form(ti);
    const double q = airy::variance_quadrature(ti).value;
    const double rel = std::abs(q - cf) / std::abs(cf);
    worst = std::max(worst, rel);
    t.rows.push_back({ti, cf, q, rel});
  }
  a.tables.push_back(std::move(t));
  a.summary["max_rel_diff"] = worst;
  char buf[96];
  std::snprintf(buf, sizeof buf, "max relative difference %.3g\n", worst);
  a.text = buf;
  return a;
}

Artifacts run_report(const ExperimentConfig& c) {
  Artifacts a;
  const auto scan = feynman_kac::variance_scan(c.t_list, fk_config(c));
  const auto rep =
      rigidity::rigidity_report({c.domain, *c.noise, c.potential->growth(), c.slope_tolerance}, {scan});
  a.tables.push_back(scan_table("report", scan, "var_estimate"));
  a.summary = Json::parse(rep.json);
  a.text = rep.text;
  return a;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_atomic(const std::filesystem::path& target, const std::string& content) {
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw ConfigError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

Artifacts run(const ExperimentConfig& c) {
  const auto& s = c.subcommand;
  if (s == "noise-check") return run_noise_check(c);
  if (s == "lt-scaling") return run_lt_scaling(c);
  if (s == "trace") return run_trace(c);
  if (s == "variance-scan") return run_variance_scan(c);
  if (s == "spectrum") return run_spectrum(c);
  if (s == "airy") return run_airy(c);
  if (s == "report") return run_report(c);
  throw ConfigError("unknown subcommand " + s);
}

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += '\n';
  char buf[40];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      if (i) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> write_artifacts(const ExperimentConfig& c, const Artifacts& a) {
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (ec) throw ConfigError("cannot create output directory " + c.out.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  Json files = Json::array();
  for (const auto& t : a.tables) {
    const auto p = c.out / (t.name + ".csv");
    write_atomic(p, format_csv(t));
    written.push_back(p);
    files.push_back(t.name + ".csv");
  }
  Json side;
  side["tool"] = "rsk";
  side["version"] = RSK_VERSION;
  side["revision"] = RSK_GIT_REV;
  side["config_digest"] = hex64(fnv1a(c.echo.dump()));
  side["config"] = c.echo;
  side["files"] = files;
  side["results"] = a.summary;
  const auto p = c.out / (c.subcommand + ".json");
  write_atomic(p, side.dump(2) + "\n");
  written.push_back(p);
  return written;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const char* b = item.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(b, &end);
    while (end && *end == ' ') ++end;
    if (end == b || *end != '\0' || errno == ERANGE) throw InputError("not a number list: " + text);
    out.push_back(v);
  }
  if (out.empty()) throw InputError("empty number list");
  return out;
}

std::string error_json(const std::string& kind, const std::string& message) {
  Json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  return j.dump();
}

}  // namespace rsk::cli
