#include <benchmark/benchmark.h>

#include "rsk/airy.hpp"
#include "rsk/feynman_kac.hpp"
#include "rsk/noise.hpp"
#include "rsk/paths.hpp"
#include "rsk/random.hpp"
#include "rsk/spectrum.hpp"

using namespace rsk;
using domain::DomainSpec;
using domain::PotentialSpec;

static void BM_bridge_interval(benchmark::State& state) {
  const auto iv = DomainSpec::interval(1.0);
  Rng rng = Rng::stream(1, 0);
  paths::BridgePath path;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    paths::sample_bridge_into(iv, 0.3, 0.3, 0.5, n, rng, path);
    benchmark::DoNotOptimize(path.values.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_bridge_interval)->Arg(128)->Arg(1024);

static void BM_occupation(benchmark::State& state) {
  Rng rng = Rng::stream(2, 0);
  const auto path = paths::sample_bridge(DomainSpec::full_line(), 0.0, 0.0, 0.5, 1024, rng);
  noise::StepFunction occ;
  for (auto _ : state) {
    paths::occupation_into(path, paths::default_bin_width(0.5), occ);
    benchmark::DoNotOptimize(occ.values.data());
  }
}
BENCHMARK(BM_occupation);

static void BM_grid_kernel_inner(benchmark::State& state) {
  const auto model = noise::CovarianceModel::fractional(0.75);
  const double h = 0.01;
  const noise::GridKernel kernel(model, h, 256);
  std::vector<double> f(static_cast<std::size_t>(state.range(0)), 1.0), g(f.size(), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(kernel.inner(f, 0, g, 7));
}
BENCHMARK(BM_grid_kernel_inner)->Arg(32)->Arg(128);

static void BM_abcd_sample(benchmark::State& state) {
  const auto iv = DomainSpec::interval(1.0);
  feynman_kac::FkConfig cfg{iv, PotentialSpec::zero(iv), noise::CovarianceModel::bounded_gaussian(), {}};
  Rng rng = Rng::stream(3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(feynman_kac::abcd_sample(0.4, 0.6, 0.5, cfg, rng));
}
BENCHMARK(BM_abcd_sample);

static void BM_sturm_eigenvalues(benchmark::State& state) {
  const auto line = DomainSpec::full_line();
  const auto op = spectrum::discretize_deterministic(line, PotentialSpec::harmonic(line),
                                                     static_cast<std::size_t>(state.range(0)), 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum::eigenvalues(op, 10));
}
BENCHMARK(BM_sturm_eigenvalues)->Arg(1000)->Arg(4000);

static void BM_cell_noise(benchmark::State& state) {
  const auto iv = DomainSpec::interval(1.0);
  const auto op = spectrum::discretize_deterministic(iv, PotentialSpec::zero(iv), 256);
  const auto cells = spectrum::node_cells(op);
  const noise::CellNoiseSampler sampler(cells, noise::CovarianceModel::bounded_gaussian());
  std::vector<double> out(sampler.size());
  Rng rng = Rng::stream(4, 0);
  for (auto _ : state) {
    sampler.sample_into(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_cell_noise);

static void BM_airy_ai(benchmark::State& state) {
  double x = -30.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(airy::airy_ai(x));
    x = x > 30.0 ? -30.0 : x + 0.173;
  }
}
BENCHMARK(BM_airy_ai);

static void BM_airy_variance_quadrature(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(airy::variance_quadrature(1.0));
}
BENCHMARK(BM_airy_variance_quadrature)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
