#include "rsk/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rsk/error.hpp"
#include "rsk/stats.hpp"

namespace rsk::localtime {

namespace {

constexpr std::size_t kBlock = 256;

void check_t_list(const std::vector<double>& t_list) {
  if (t_list.size() < 4) throw InputError("scaling studies need at least 4 t values");
  for (double t : t_list)
    if (!(t > 0.0 && t < 1.0)) throw InputError("scaling study times must lie in (0, 1)");
}

void check_paths(std::size_t n) {
  if (n < 2) throw StatisticsError("scaling studies need at least 2 paths per point");
}

/// Draws `n` samples of `draw(rng)` in fixed blocks with one stream per block.
template <class Draw>
std::vector<double> blocked_samples(std::size_t n, std::uint64_t seed, std::uint64_t stream_base, unsigned threads,
                                    Draw draw) {
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> out(n);
  parallel_for(n_blocks, threads, [&](std::size_t blk) {
    Rng rng = Rng::stream(seed, stream_base + blk);
    const std::size_t lo = blk * kBlock, hi = std::min(n, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) out[i] = draw(rng);
  });
  return out;
}

stats::RunningStats summarize(const std::vector<double>& xs) {
  stats::RunningStats rs;
  for (double x : xs) rs.add(x);
  return rs;
}

void finish(ScanResult& scan) {
  scan.degenerate = std::all_of(scan.points.begin(), scan.points.end(), [](const ScanPoint& p) { return p.estimate == 0.0; });
  if (!scan.degenerate) scan.fit = rigidity::fit_exponent(scan);
}

}  // namespace

double lq_norm_sq(const noise::StepFunction& density, double q) {
  if (!(q >= 1.0 && q <= 2.0)) throw InputError("q must lie in [1, 2]");
  double s = 0.0;
  for (double v : density.values) s += std::pow(std::abs(v), q);
  return std::pow(density.bin_width * s, 2.0 / q);
}

double lq_norm_sq(const paths::LocalTimeField& field, double q) { return lq_norm_sq(field.occupation, q); }

double rq_constant(double b, double q) { return 4.0 * std::pow(std::max(1.0, std::pow(b, q - 1.0)), 2.0 / q); }

double rq_sample(const domain::DomainSpec& spec, double q, Rng& rng, std::optional<int> n_steps,
                 std::optional<double> bin_width) {
  if (!(q > 1.0 && q <= 2.0)) throw InputError("R_q is defined for q in (1, 2]");
  const int n = n_steps.value_or(paths::default_steps(1.0));
  const double h = bin_width.value_or(paths::default_bin_width(1.0));
  const auto path = paths::sample_process(domain::DomainSpec::full_line(), 0.0, 1.0, n, rng);
  noise::StepFunction occ;
  paths::occupation_into(path, h, occ);
  if (spec.kind() != domain::Case::Interval) return std::pow(2.0, 2.0 * (q - 1.0) / q) * lq_norm_sq(occ, q);
  const double lsup = *std::max_element(occ.values.begin(), occ.values.end());
  const auto [mn, mx] = std::minmax_element(path.unfolded.begin(), path.unfolded.end());
  const double range = *mx - *mn;
  const double c = rq_constant(spec.length(), q);
  const double e = 2.0 * (1.0 - 1.0 / q);
  return c * std::pow(lsup, e) + c * std::pow(2.0 * lsup * lsup + 2.0 * range * range, e);
}

ScalingSample scaling_sample(double q, double t, Rng& rng, std::optional<int> n_steps,
                             std::optional<double> bin_width) {
  const int n = n_steps.value_or(paths::default_steps(t));
  const double h = bin_width.value_or(paths::default_bin_width(t));
  const auto path = paths::sample_process(domain::DomainSpec::full_line(), 0.0, t, n, rng);
  noise::StepFunction occ;
  paths::occupation_into(path, h, occ);
  const double v = lq_norm_sq(occ, q);
  return {q, t, v, v / std::pow(t, 1.0 + 1.0 / q)};
}

ScanResult scaling_study(double q, const std::vector<double>& t_list, const StudyParams& params) {
  check_t_list(t_list);
  check_paths(params.n_paths);
  if (!(q >= 1.0 && q <= 2.0)) throw InputError("q must lie in [1, 2]");
  ScanResult scan;
  char label[48];
  std::snprintf(label, sizeof label, "lt_scaling_q%g", q);
  scan.label = label;
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    auto xs = blocked_samples(params.n_paths, params.seed, ti << 32, params.threads, [&](Rng& rng) {
      return scaling_sample(q, t, rng, params.n_steps, params.bin_width).value;
    });
    const auto rs = summarize(xs);
    scan.points.push_back({t, rs.mean(), rs.stderr_mean(), rs.count()});
    const double norm = std::pow(t, 1.0 + 1.0 / q);
    for (double& x : xs) x /= norm;
    scan.samples.push_back(std::move(xs));
  }
  finish(scan);
  return scan;
}

std::vector<double> start_grid(const domain::DomainSpec& spec, double t) {
  std::vector<double> xs(9);
  for (int j = 0; j < 9; ++j) {
    switch (spec.kind()) {
      case domain::Case::FullLine: xs[j] = (j - 4) * std::sqrt(t) / 2.0; break;
      case domain::Case::HalfLine: xs[j] = j * std::sqrt(t) / 2.0; break;
      case domain::Case::Interval: xs[j] = j * spec.length() / 8.0; break;
    }
  }
  return xs;
}

ScanResult gamma_lt_scaling(const noise::CovarianceModel& model, const domain::DomainSpec& spec,
                            const std::vector<double>& t_list, const StudyParams& params) {
  check_t_list(t_list);
  check_paths(params.n_paths);
  ScanResult scan;
  scan.label = "gamma_lt_" + model.name();
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    const int n = params.n_steps.value_or(paths::default_steps(t));
    const double h = params.bin_width.value_or(paths::default_bin_width(t));
    const noise::GridKernel kernel(model, h, 64);
    const auto starts = start_grid(spec, t);
    ScanPoint best{t, -1.0, 0.0, 0};
    std::vector<double> best_samples;
    for (std::size_t si = 0; si < starts.size(); ++si) {
      const double x0 = starts[si];
      auto xs = blocked_samples(params.n_paths, params.seed, (ti << 32) | (si << 24), params.threads, [&](Rng& rng) {
        thread_local paths::BridgePath path;
        thread_local noise::StepFunction occ;
        paths::sample_process_into(spec, x0, t, n, rng, path);
        paths::occupation_into(path, h, occ);
        const long off = std::lround(occ.origin / h);
        return kernel.inner(occ.values, off, occ.values, off);
      });
      const auto rs = summarize(xs);
      if (si == 0 || rs.mean() > best.estimate) {
        best = {t, rs.mean(), rs.stderr_mean(), rs.count()};
        best_samples = std::move(xs);
      }
    }
    scan.points.push_back(best);
    scan.samples.push_back(std::move(best_samples));
  }
  finish(scan);
  return scan;
}

}  // namespace rsk::localtime
