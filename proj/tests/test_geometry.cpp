#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "digeo/fiber_metric.hpp"
#include "digeo/toric.hpp"

using namespace digeo;

namespace {

// Independent finite-difference oracle for the density: g = phi''(x) e^{-x}
// with phi'' from second differences of the profile values only.
double density_fd_oracle(const ToricPotential& tp, double x, double h) {
  double d2 =
      (tp.value(x + h) - 2 * tp.value(x) + tp.value(x - h)) / (h * h);
  return d2 * std::exp(-x);
}

}  // namespace

TEST_CASE("FS density matches the closed form k/(1+|z|^2)^2") {
  for (int k : {1, 2, 3}) {
    auto fs = fs_metric(k);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(-6.0, 6.0);
    for (int i = 0; i < 25; ++i) {
      double x = ux(rng);
      double s = std::exp(x);  // |z|^2
      double expected = k / ((1 + s) * (1 + s));
      REQUIRE(fs.density_x(x) == Catch::Approx(expected).epsilon(1e-12));
      // cross-check against second differences of the profile
      REQUIRE(density_fd_oracle(fs, x, 1e-4) ==
              Catch::Approx(expected).epsilon(1e-6));
    }
    // z = 0 and the chart-1 origin have equal densities by SU(2) symmetry.
    double g_at_0 = fs.second(-18.0) * std::exp(18.0);
    double g_at_inf = fs.second(18.0) * std::exp(18.0);  // chart 1 at x_w=-18
    REQUIRE(g_at_0 == Catch::Approx(k).epsilon(1e-7));
    REQUIRE(g_at_inf == Catch::Approx(k).epsilon(1e-7));
  }
}

TEST_CASE("perturbed density differs from FS by O(eps)") {
  int k = 1;
  auto fs = fs_metric(k);
  for (double eps : {1e-3, 1e-2}) {
    auto pert = fs_bump_metric(k, eps, 0.5, 2.0);
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      double x = -8.0 + 16.0 * i / 100;
      worst = std::max(worst,
                       std::abs(pert.density_x(x) - fs.density_x(x)));
    }
    REQUIRE(worst < 2.0 * eps);   // |bump''| <= eps/w^2 * sup|He2| margin
    REQUIRE(worst > 0.01 * eps);  // and genuinely O(eps), not smaller order
  }
}

TEST_CASE("scalar curvature: FS constant positive, perturbed not") {
  for (int k : {1, 2}) {
    auto fs = fs_metric(k);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 64; ++i) {
      double x = -6.0 + 12.0 * i / 64;
      double s = scalar_curvature_x(fs, x);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    REQUIRE(hi - lo < 1e-8);
    REQUIRE(lo == Catch::Approx(2.0 / k).epsilon(1e-10));
  }
  auto pert = fs_bump_metric(1, 0.15, 0.0, 2.0);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i <= 64; ++i) {
    double x = -6.0 + 12.0 * i / 64;
    double s = scalar_curvature_x(pert, x);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  REQUIRE(hi - lo > 1e-3);
}

TEST_CASE("int S omega is a topological invariant (4 pi)") {
  auto fs = fs_metric(2);
  auto pert = fs_bump_metric(2, 0.2, -0.7, 2.0);
  double a = integral_scalar_curvature(fs);
  double b = integral_scalar_curvature(pert);
  REQUIRE(a == Catch::Approx(4 * M_PI).epsilon(1e-9));
  REQUIRE(std::abs(a - b) / std::abs(a) < 1e-6);
}

TEST_CASE("volume scales with k and is metric independent") {
  auto v1 = volume(fs_metric(1));
  for (int k : {2, 5}) {
    REQUIRE(volume(fs_metric(k)) / v1 == Catch::Approx(k).epsilon(1e-10));
  }
  REQUIRE(volume(fs_bump_metric(1, 0.2, 0.3, 2.0)) ==
          Catch::Approx(v1).epsilon(1e-8));
  REQUIRE(v1 > 0);
  REQUIRE(v1 == Catch::Approx(2 * M_PI).epsilon(1e-10));
}

TEST_CASE("legendre transform: quadratic is self dual") {
  // Strictly convex profile matching a quadratic in the interior; slopes
  // clamp into (0, k) near the edges by construction of the window.
  int k = 4;
  double X = 1.9;  // phi'(x) = x + k/2 stays in (0.1, 3.9)
  Profile quad{[=](double x) { return 0.5 * x * x + 0.5 * k * x; },
               [=](double x) { return x + 0.5 * k; },
               [](double) { return 1.0; },
               [](double) { return 0.0; },
               [](double) { return 0.0; }};
  ToricPotential tp(k, X, quad, Validate::yes, 801, 0.2);
  auto dual = legendre_transform(tp);
  for (double y : {0.4, 1.0, 2.0, 3.1}) {
    // u(y) = sup_x(xy - x^2/2 - k x /2) = (y - k/2)^2 / 2
    double expect = 0.5 * (y - 0.5 * k) * (y - 0.5 * k);
    REQUIRE(dual.value(y) == Catch::Approx(expect).margin(1e-10));
  }
}

TEST_CASE("legendre round trip and shift covariance") {
  auto tp = fs_bump_metric(1, 0.25, 0.4, 2.0);
  auto dual = legendre_transform(tp);
  double worst = 0.0;
  for (int i = 0; i <= 40; ++i) {
    double x = -19.0 + 38.0 * i / 40;
    worst = std::max(worst,
                     std::abs(legendre_biconjugate(dual, x) - tp.value(x)));
  }
  REQUIRE(worst < 1e-8);

  auto shifted = fs_shift_metric(1, 0.7);
  auto dual_fs = legendre_transform(fs_metric(1));
  auto dual_sh = legendre_transform(shifted);
  for (double y : {0.2, 0.5, 0.8}) {
    REQUIRE(dual_sh.value(y) ==
            Catch::Approx(dual_fs.value(y) - 0.7).margin(1e-10));
  }
}

TEST_CASE("legendre transform domain errors") {
  auto dual = legendre_transform(fs_metric(1));
  REQUIRE_THROWS_AS(dual.value(-0.1), std::domain_error);
  REQUIRE_THROWS_AS(dual.value(1.0), std::domain_error);
  REQUIRE_THROWS_AS(dual.value(1.5), std::domain_error);
}

TEST_CASE("check_positivity margins") {
  auto fs = fs_metric(2);
  auto rep = check_positivity(fs);
  REQUIRE(rep.positive);
  REQUIRE(rep.margin == Catch::Approx(2.0 / 4.0).epsilon(1e-6));

  // k=1 profile with negative second derivative: phi = -log(1+e^x).
  Profile bad{[](double x) { return -(x > 0 ? x + std::log1p(std::exp(-x))
                                            : std::log1p(std::exp(x))); },
              [](double x) { return -1.0 / (1.0 + std::exp(-x)); },
              [](double x) {
                double s = 1.0 / (1.0 + std::exp(-x));
                return -s * (1 - s);
              },
              nullptr,
              nullptr};
  ToricPotential unchecked(1, 20.0, bad, Validate::no);
  auto rep_bad = check_positivity(unchecked);
  REQUIRE_FALSE(rep_bad.positive);

  // any potential passing construction is positive
  auto bump = fs_bump_metric(1, 0.3, 0.0, 2.0);
  REQUIRE(check_positivity(bump).positive);
}

TEST_CASE("toric potential invariants are enforced") {
  REQUIRE_THROWS_AS(fs_shift_metric(0, 0.0), std::invalid_argument);
  // eps/w^2 too large: phi'' goes negative near the bump center
  REQUIRE_THROWS_AS(fs_bump_metric(1, 2.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("FiberMetric transition consistency and densities") {
  auto tp = fs_bump_metric(1, 0.2, 0.3, 2.0);
  auto fm = fiber_metric_from_toric(tp);
  REQUIRE(fm.transition_residual(64) < 1e-10);

  // chart densities agree with the toric formula
  for (double r : {0.3, 0.9}) {
    cxd z = std::polar(r, 0.7);
    double x = 2 * std::log(r);
    REQUIRE(fm.density(0, z) ==
            Catch::Approx(tp.density_x(x)).epsilon(1e-10));
  }

  // a genuinely two-chart metric: FS written with explicit closures and
  // finite-difference Laplacians
  auto w0 = [](cxd z) { return std::log1p(std::norm(z)); };
  auto w1 = [](cxd w) { return std::log1p(std::norm(w)); };
  FiberMetric fs_fm(1, ChartFun{w0, nullptr}, ChartFun{w1, nullptr});
  REQUIRE(fs_fm.transition_residual(64) < 1e-12);
  REQUIRE(fs_fm.density(0, cxd{0.4, 0.1}) ==
          Catch::Approx(1.0 / std::pow(1 + 0.17, 2)).margin(1e-9));
  REQUIRE(volume(fs_fm, 1e-9) == Catch::Approx(2 * M_PI).epsilon(1e-8));
}

TEST_CASE("dense volume and scalar curvature integral invariance") {
  auto tp = fs_bump_metric(1, 0.2, 0.3, 2.0);
  auto fm = fiber_metric_from_toric(tp);
  REQUIRE(volume(fm, 1e-9) == Catch::Approx(2 * M_PI).epsilon(1e-7));
}

TEST_CASE("csv round trip via spline profile") {
  auto tp = fs_metric(1);
  std::vector<double> xs, ys;
  for (int i = 0; i <= 400; ++i) {
    double x = -20.0 + 40.0 * i / 400;
    xs.push_back(x);
    ys.push_back(tp.value(x));
  }
  auto splined = toric_from_samples(1, xs, ys);
  for (double x : {-5.0, -1.0, 0.0, 2.5, 7.0}) {
    REQUIRE(splined.value(x) == Catch::Approx(tp.value(x)).margin(1e-7));
    REQUIRE(splined.second(x) == Catch::Approx(tp.second(x)).margin(1e-4));
  }
}
