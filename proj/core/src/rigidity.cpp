#include "rsk/rigidity.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "rsk/error.hpp"
#include "rsk/stats.hpp"

namespace rsk::rigidity {

ExponentFit fit_exponent(const ScanResult& scan) {
  std::vector<double> xs, ys, ws;
  std::size_t dropped = 0;
  bool uniform = false;
  for (const auto& p : scan.points) {
    if (!(p.t > 0.0)) throw StatisticsError("fit_exponent: nonpositive t");
    if (!(p.estimate > 0.0) || !std::isfinite(p.estimate)) {
      ++dropped;
      continue;
    }
    xs.push_back(std::log(p.t));
    ys.push_back(std::log(p.estimate));
    if (!(p.std_err > 0.0) || !std::isfinite(p.std_err)) uniform = true;
    ws.push_back(p.std_err > 0.0 ? (p.estimate / p.std_err) * (p.estimate / p.std_err) : 1.0);
  }
  const std::size_t total = scan.points.size();
  if (total < 4) throw StatisticsError("fit_exponent: need at least 4 points");
  if (5 * dropped > total)
    throw StatisticsError("fit_exponent: " + std::to_string(dropped) + " of " + std::to_string(total) +
                          " estimates are nonpositive");
  const std::size_t n = xs.size();
  if (n < 3) throw StatisticsError("fit_exponent: too few positive estimates");
  if (uniform) std::fill(ws.begin(), ws.end(), 1.0);

  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += ws[i];
    sx += ws[i] * xs[i];
    sy += ws[i] * ys[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
    sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    syy += ws[i] * (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw StatisticsError("fit_exponent: all t values coincide");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    ssr += ws[i] * r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  const double dof = static_cast<double>(n) - 2.0;
  const double se = std::sqrt(ssr / dof / sxx);
  fit.slope_ci_95 = stats::student_t_quantile(0.975, dof) * se;
  fit.n_points = n;
  fit.dropped = dropped;
  return fit;
}

namespace {

const domain::GrowthCertificate& require_growth(const domain::DomainSpec& spec,
                                                const std::optional<domain::GrowthCertificate>& growth) {
  if (!growth)
    throw ConfigError("a growth certificate is required on " + spec.describe());
  return *growth;
}

}  // namespace

double growth_threshold(const noise::CovarianceModel& model) {
  const double d = noise::d_exponent(model);
  return model.compactly_supported() ? 2.0 / (2.0 * d - 1.0) : 2.0 / (d - 1.0);
}

double predicted_exponent(const domain::DomainSpec& spec, const noise::CovarianceModel& model,
                          const std::optional<domain::GrowthCertificate>& growth) {
  const double d = noise::d_exponent(model);
  if (spec.kind() == domain::Case::Interval) return d - 1.0;
  const double a = require_growth(spec, growth).a;
  return model.compactly_supported() ? d - 0.5 - 1.0 / a : d - 1.0 - 2.0 / a;
}

RigidityVerdict growth_verdict(const domain::DomainSpec& spec, const noise::CovarianceModel& model,
                               const std::optional<domain::GrowthCertificate>& growth) {
  RigidityVerdict v{spec.kind(), true, 0.0, {}};
  if (spec.kind() == domain::Case::Interval) {
    v.reason = "bounded interval: the spectrum is number rigid for every admissible potential and noise";
    return v;
  }
  v.threshold_exponent = growth_threshold(model);
  std::ostringstream os;
  if (!growth) {
    v.condition_holds = false;
    os << "sufficient condition not met: no growth certificate (threshold exponent " << v.threshold_exponent
       << "); not a non-rigidity proof";
    v.reason = os.str();
    return v;
  }
  v.condition_holds = growth->a > v.threshold_exponent;
  if (v.condition_holds) {
    os << "sufficient condition met: growth exponent " << growth->a << " > threshold " << v.threshold_exponent;
  } else {
    os << "sufficient condition not met: growth exponent " << growth->a << " <= threshold " << v.threshold_exponent
       << "; not a non-rigidity proof";
    if (model.is_white())
      os << " (the stochastic Airy operator -D/2 + x/2 + white noise on the half-line is known to be number rigid)";
  }
  v.reason = os.str();
  return v;
}

RigidityReport rigidity_report(const ReportInput& input, const std::vector<ScanResult>& scans) {
  if (scans.empty()) throw InputError("rigidity_report needs at least one scan");
  RigidityReport rep;
  rep.verdict = growth_verdict(input.spec, input.model, input.growth);
  std::optional<double> predicted;
  try {
    predicted = predicted_exponent(input.spec, input.model, input.growth);
  } catch (const ConfigError&) {
  }

  nlohmann::ordered_json j;
  j["domain"] = input.spec.describe();
  j["noise"] = input.model.name();
  j["d_exponent"] = noise::d_exponent(input.model);
  j["verdict"] = {{"condition_holds", rep.verdict.condition_holds},
                  {"threshold_exponent", rep.verdict.threshold_exponent},
                  {"reason", rep.verdict.reason}};
  j["predicted_exponent"] = predicted ? nlohmann::ordered_json(*predicted) : nlohmann::ordered_json(nullptr);

  std::ostringstream os;
  os << "domain: " << input.spec.describe() << "\nnoise: " << input.model.name()
     << "\nd exponent: " << noise::d_exponent(input.model) << "\nverdict: " << rep.verdict.reason << '\n';
  if (predicted) os << "predicted variance exponent: " << *predicted << '\n';

  rep.all_pass = true;
  j["scans"] = nlohmann::ordered_json::array();
  for (const auto& s : scans) {
    nlohmann::ordered_json js;
    js["label"] = s.label;
    os << "scan " << s.label << ": ";
    if (s.degenerate) {
      js["status"] = "degenerate";
      os << "degenerate deterministic case (all estimates are zero)\n";
    } else if (!s.fit) {
      js["status"] = "no_fit";
      rep.all_pass = false;
      os << "no exponent fit available\n";
    } else {
      const bool pass = !predicted || s.fit->slope >= *predicted - input.slope_tolerance;
      rep.all_pass = rep.all_pass && pass;
      js["status"] = pass ? "pass" : "fail";
      js["slope"] = s.fit->slope;
      js["slope_ci_95"] = s.fit->slope_ci_95;
      js["r_squared"] = s.fit->r_squared;
      os << "fitted slope " << s.fit->slope << " +/- " << s.fit->slope_ci_95;
      if (predicted) os << " vs predicted " << *predicted << " (tolerance " << input.slope_tolerance << ")";
      os << (pass ? " pass" : " fail") << '\n';
    }
    j["scans"].push_back(js);
  }
  const char* note =
      "If Var(sum_k exp(-t Lambda_k)) -> 0 along t -> 0, the functions exp(-t x) tend to 1 on compacts, "
      "so the eigenvalue point process is number rigid.";
  os << "note: " << note << '\n';
  j["note"] = note;
  j["all_pass"] = rep.all_pass;
  rep.text = os.str();
  rep.json = j.dump(2);
  return rep;
}

}  // namespace rsk::rigidity
