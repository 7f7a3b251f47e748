#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rsk/error.hpp"
#include "rsk/noise.hpp"
#include "rsk/random.hpp"
#include "rsk/stats.hpp"

using namespace rsk;
using noise::CovarianceModel;
using noise::StepFunction;

namespace {

StepFunction random_step(Rng& rng, double h, double origin_bins, std::size_t n) {
  StepFunction f;
  f.bin_width = h;
  f.origin = origin_bins * h;
  for (std::size_t i = 0; i < n; ++i) f.values.push_back(rng.normal());
  return f;
}

std::vector<CovarianceModel> all_models() {
  return {CovarianceModel::white(2.0),         CovarianceModel::fractional(0.75),
          CovarianceModel::fractional(0.6, 3), CovarianceModel::lp_power(0.5, 1.5),
          CovarianceModel::lp_log(1.0, 2.0),   CovarianceModel::bounded_gaussian(),
          CovarianceModel::bounded_const(),    CovarianceModel::bounded_triangle(0.7)};
}

}  // namespace

TEST_CASE("inner product on unit boxes") {
  const auto box = StepFunction::indicator(0.0, 1.0);
  CHECK(noise::inner_product(box, box, CovarianceModel::white()) == doctest::Approx(1.0).epsilon(1e-14));
  for (double h : {0.55, 0.75, 0.95})
    CHECK(noise::inner_product(box, box, CovarianceModel::fractional(h)) == doctest::Approx(1.0).epsilon(1e-13));
  const auto far = StepFunction::indicator(5.0, 6.0);
  CHECK(noise::inner_product(box, far, CovarianceModel::bounded_triangle(1.0)) == 0.0);
}

TEST_CASE("seminorm examples") {
  const auto box = StepFunction::indicator(0.0, 1.0);
  CHECK(noise::seminorm_sq(box, CovarianceModel::bounded_const()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(noise::seminorm_sq(box, CovarianceModel::white(4.0)) == doctest::Approx(4.0).epsilon(1e-14));
  StepFunction zero{0.0, 0.25, std::vector<double>(8, 0.0)};
  for (const auto& m : all_models()) CHECK(noise::seminorm_sq(zero, m) == 0.0);
}

TEST_CASE("inner product refines coarser grids exactly") {
  const auto box = StepFunction::indicator(0.0, 1.0);
  StepFunction fine{0.0, 0.25, {1.0, 1.0, 1.0, 1.0}};
  const auto m = CovarianceModel::fractional(0.7);
  CHECK(noise::inner_product(box, fine, m) == doctest::Approx(1.0).epsilon(1e-13));
  StepFunction shifted{0.1, 0.3, {1.0}};
  CHECK_THROWS_AS(noise::inner_product(box, shifted, m), InputError);
}

TEST_CASE("gram matrix examples") {
  std::vector<StepFunction> two{StepFunction::indicator(0.0, 1.0), StepFunction::indicator(3.0, 4.0)};
  const auto g = noise::gram_matrix(two, CovarianceModel::white());
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(1, 1) == doctest::Approx(1.0));
  CHECK(g(0, 1) == 0.0);

  std::vector<StepFunction> one{StepFunction::indicator(0.0, 1.0)};
  CHECK(noise::gram_matrix(one, CovarianceModel::bounded_const())(0, 0) == doctest::Approx(1.0));

  std::vector<StepFunction> adj{StepFunction::indicator(0.0, 1.0), StepFunction::indicator(1.0, 2.0)};
  const double off = noise::gram_matrix(adj, CovarianceModel::fractional(0.75))(0, 1);
  CHECK(off == doctest::Approx((std::pow(2.0, 1.5) - 2.0) / 2.0).epsilon(1e-13));

  // Independent oracle: integrate H(2H-1)|u|^{2H-2} against the overlap triangle 1 - |1 - u| on (0, 2),
  // after u = s^2 to remove the endpoint singularity.
  const double hh = 0.75;
  const int n = 200000;
  const double top = std::sqrt(2.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) * top / n;
    const double u = s * s;
    acc += (1.0 - std::abs(1.0 - u)) * hh * (2 * hh - 1) * std::pow(s, 4 * hh - 3) * 2.0;
  }
  CHECK(acc * top / n == doctest::Approx(off).epsilon(1e-5));
}

TEST_CASE("gram matrix rejects an indefinite kernel") {
  const CovarianceModel boxcar(noise::Bounded{[](double x) { return std::abs(x) < 1.5 ? 1.0 : 0.0; }, 1.0},
                               std::nullopt, "boxcar");
  std::vector<StepFunction> cells;
  for (int k = 0; k < 3; ++k) cells.push_back(StepFunction::indicator(k, k + 1.0));
  CHECK_THROWS_AS(noise::gram_matrix(cells, boxcar), ModelError);
}

TEST_CASE("gram matrices are PSD for every preset, including numerically low-rank ones") {
  for (const auto& m : all_models()) {
    std::vector<StepFunction> cells;
    for (int k = 0; k < 200; ++k) cells.push_back(StepFunction::indicator(k / 200.0, (k + 1) / 200.0));
    CHECK_NOTHROW(noise::gram_matrix(cells, m));
  }
}

TEST_CASE("clamped cholesky reproduces the matrix") {
  std::vector<StepFunction> cells;
  for (int k = 0; k < 40; ++k) cells.push_back(StepFunction::indicator(k * 0.1, (k + 1) * 0.1));
  for (const auto& m : {CovarianceModel::fractional(0.8), CovarianceModel::bounded_const()}) {
    const auto g = noise::gram_matrix(cells, m);
    const auto l = noise::clamped_cholesky(g);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j = 0; j < g.n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < g.n; ++k) s += l(i, k) * l(j, k);
        worst = std::max(worst, std::abs(s - g(i, j)));
      }
    CHECK(worst < 1e-10 * g.trace());
  }
}

TEST_CASE("symmetry, bilinearity, Cauchy-Schwarz and translation invariance") {
  Rng rng(11);
  for (const auto& m : all_models()) {
    for (int rep = 0; rep < 10; ++rep) {
      const double h = 0.05 + 0.1 * rng.uniform();
      const auto f = random_step(rng, h, -5, 12);
      const auto g = random_step(rng, h, 3, 9);
      const auto k = random_step(rng, h, -1, 7);
      const double fg = noise::inner_product(f, g, m), gf = noise::inner_product(g, f, m);
      CHECK(fg == doctest::Approx(gf).epsilon(1e-12));

      StepFunction sum = f;  // f + 2.5 k on f's grid (k lies inside)
      for (std::size_t i = 0; i < k.size(); ++i) sum.values[i + 4] += 2.5 * k.values[i];
      const double lhs = noise::inner_product(sum, g, m);
      const double rhs = fg + 2.5 * noise::inner_product(k, g, m);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(std::abs(fg) + 1.0));

      const double ff = noise::seminorm_sq(f, m), gg = noise::seminorm_sq(g, m);
      CHECK(fg * fg <= ff * gg * (1.0 + 1e-12) + 1e-15);

      StepFunction fs = f, gs = g;
      fs.origin += 7 * h;
      gs.origin += 7 * h;
      CHECK(noise::inner_product(fs, gs, m) == doctest::Approx(fg).epsilon(1e-12).scale(std::abs(fg) + 1e-3));
    }
  }
}

TEST_CASE("seminorm obeys the L^p bounds") {
  Rng rng(5);
  for (const auto& m : all_models()) {
    for (int rep = 0; rep < 20; ++rep) {
      auto f = random_step(rng, 0.01 + 0.05 * rng.uniform(), 0, 30);
      for (auto& v : f.values) v = std::abs(v);  // local times are nonnegative
      const double t = 0.1 + rng.uniform();
      CHECK(noise::seminorm_sq(f, m) <= noise::seminorm_lp_bound(f, m, t) * (1.0 + 1e-12));
    }
  }
  auto f = random_step(rng, 0.1, 0, 10);
  CHECK(noise::seminorm_sq(f, CovarianceModel::white(3.0)) ==
        doctest::Approx(noise::seminorm_lp_bound(f, CovarianceModel::white(3.0))).epsilon(1e-12));
}

TEST_CASE("cell noise sampling") {
  const double h = 0.25;
  std::vector<StepFunction> cells;
  for (int k = 0; k < 4; ++k) cells.push_back(StepFunction::indicator(k * h, (k + 1) * h));

  SUBCASE("white: independent with variance 1/h") {
    const noise::CellNoiseSampler s(cells, CovarianceModel::white());
    Rng rng(1);
    stats::RunningStats v0, v3, cross;
    for (int i = 0; i < 40000; ++i) {
      const auto x = s.sample(rng);
      v0.add(x[0]);
      v3.add(x[3]);
      cross.add(x[0] * x[1]);
    }
    CHECK(std::abs(v0.variance() - 1.0 / h) < 3.0 * v0.stderr_variance());
    CHECK(std::abs(v3.variance() - 1.0 / h) < 3.0 * v3.stderr_variance());
    CHECK(std::abs(cross.mean()) < 3.0 * cross.stderr_mean());
  }
  SUBCASE("bounded const: all components equal") {
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
      const auto x = noise::sample_cell_noise(cells, CovarianceModel::bounded_const(), rng);
      for (double v : x) CHECK(v == doctest::Approx(x[0]).epsilon(1e-12));
    }
  }
  SUBCASE("fractional: sample covariance matches the Gram matrix") {
    const auto m = CovarianceModel::fractional(0.75);
    const auto g = noise::gram_matrix(cells, m);
    const noise::CellNoiseSampler s(cells, m);
    Rng rng(3);
    std::vector<stats::RunningStats> prod(16);
    std::vector<double> x(4);
    for (int i = 0; i < 100000; ++i) {
      s.sample_into(rng, x);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) prod[a * 4 + b].add(x[a] * x[b]);
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double target = g(a, b) / (h * h);
        CHECK(std::abs(prod[a * 4 + b].mean() - target) < 3.5 * prod[a * 4 + b].stderr_mean());
      }
  }
  SUBCASE("deterministic given the generator state") {
    Rng a(9), b(9);
    CHECK(noise::sample_cell_noise(cells, CovarianceModel::fractional(0.7), a) ==
          noise::sample_cell_noise(cells, CovarianceModel::fractional(0.7), b));
  }
}

TEST_CASE("d exponents") {
  CHECK(noise::d_exponent(CovarianceModel::white()) == 1.5);
  CHECK(noise::d_exponent(CovarianceModel::fractional(0.75)) == doctest::Approx(1.75));
  CHECK(noise::d_exponent(CovarianceModel::lp_power(0.5, 1.0)) == doctest::Approx(1.5));
  CHECK(noise::d_exponent(CovarianceModel::bounded_const()) == 2.0);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(CovarianceModel::fractional(0.5), InputError);
  CHECK_THROWS_AS(CovarianceModel::fractional(1.0), InputError);
  CHECK_THROWS_AS(CovarianceModel::white(0.0), InputError);
  CHECK_THROWS_AS(CovarianceModel::lp_power(0.5, 0.5), InputError);
}
