#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "digeo/numerics.hpp"
#include "digeo/quadrature.hpp"

using namespace digeo;

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  // n-point rule is exact through degree 2n-1.
  auto f = [](double x) { return 5 * std::pow(x, 9) - 3 * x * x + 1; };
  double got = panel_gauss(f, -1.0, 2.0, 16);
  // antiderivative: x^10/2 - x^3 + x
  auto F = [](double x) { return std::pow(x, 10) / 2 - x * x * x + x; };
  REQUIRE(got == Catch::Approx(F(2.0) - F(-1.0)).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature hits tolerance on smooth and peaked") {
  QuadratureOptions opt;
  opt.rel_tol = 1e-12;
  double got = integrate_or_throw([](double x) { return std::exp(-x * x); },
                                  -8.0, 8.0, opt);
  REQUIRE(got == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-12));

  // Narrow peak away from panel boundaries.
  double s = 1e-3;
  double peaked = integrate_or_throw(
      [&](double x) {
        double u = (x - 0.3172) / s;
        return std::exp(-0.5 * u * u);
      },
      -20.0, 20.0, opt);
  REQUIRE(peaked == Catch::Approx(s * std::sqrt(2 * M_PI)).epsilon(1e-10));
}

TEST_CASE("integrate_log_exp handles huge exponents") {
  // int exp(-a(x-c)^2 + b) dx = e^b sqrt(pi/a), with b far outside double
  // range for the raw integrand.
  double a = 40.0, b = -5000.0, c = 1.5;
  auto h = [&](double x) { return -a * (x - c) * (x - c) + b; };
  auto li = integrate_log_exp(h, -30.0, 30.0);
  REQUIRE(li.converged);
  double expected = b + 0.5 * std::log(M_PI / a);
  REQUIRE(li.log_value == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log_add_exp basic identities") {
  REQUIRE(log_add_exp(std::log(2.0), std::log(3.0)) ==
          Catch::Approx(std::log(5.0)));
  double ninf = -std::numeric_limits<double>::infinity();
  REQUIRE(log_add_exp(ninf, 1.25) == 1.25);
}

TEST_CASE("complex-valued adaptive integration") {
  QuadratureOptions opt;
  opt.rel_tol = 1e-12;
  auto r = integrate_adaptive<std::complex<double>>(
      [](double x) {
        return std::complex<double>(std::cos(x), std::sin(x));
      },
      0.0, 1.0, opt);
  REQUIRE(r.converged);
  REQUIRE(r.value.real() == Catch::Approx(std::sin(1.0)).epsilon(1e-12));
  REQUIRE(r.value.imag() == Catch::Approx(1 - std::cos(1.0)).epsilon(1e-12));
}

TEST_CASE("solve_increasing inverts monotone maps") {
  auto f = [](double x) { return x + std::tanh(x); };
  auto df = [](double x) {
    double t = std::tanh(x);
    return 1.0 + (1 - t * t);
  };
  double x = solve_increasing(f, df, 2.5, -10.0, 10.0);
  REQUIRE(f(x) == Catch::Approx(2.5).margin(1e-12));
}

TEST_CASE("cubic spline reproduces smooth functions and derivatives") {
  std::vector<double> xs, ys;
  auto f = [](double x) { return std::sin(x) + 0.1 * x * x; };
  auto d1 = [](double x) { return std::cos(x) + 0.2 * x; };
  for (int i = 0; i <= 200; ++i) {
    double x = -3.0 + 6.0 * i / 200;
    xs.push_back(x);
    ys.push_back(f(x));
  }
  CubicSpline sp(xs, ys, d1(-3.0), d1(3.0));
  for (double x : {-2.7, -1.1, 0.0, 0.4, 2.9}) {
    REQUIRE(sp.value(x) == Catch::Approx(f(x)).margin(1e-8));
    REQUIRE(sp.deriv(x) == Catch::Approx(d1(x)).margin(1e-6));
    REQUIRE(sp.second(x) ==
            Catch::Approx(-std::sin(x) + 0.2).margin(1e-4));
  }
}

TEST_CASE("finite differences with Richardson extrapolation") {
  auto f = [](double x) { return std::exp(0.7 * x) * std::sin(x); };
  double x0 = 0.8;
  double d1 = fd_deriv1(f, x0, 1e-2);
  double d1_exact =
      std::exp(0.7 * x0) * (0.7 * std::sin(x0) + std::cos(x0));
  REQUIRE(d1 == Catch::Approx(d1_exact).epsilon(1e-9));

  auto g = [](std::complex<double> z) {
    return std::norm(z) + 3.0 * z.real();  // dz dzbar = 1
  };
  REQUIRE(fd_dz_dzbar(g, {0.3, -0.2}) == Catch::Approx(1.0).margin(1e-9));

  auto hfun = [](std::complex<double> z) { return std::conj(z) * z.real(); };
  // d/dzbar (zbar * (z+zbar)/2) = (z + 2 zbar)/2 at z
  std::complex<double> z0{0.4, 0.1};
  auto want = (z0 + 2.0 * std::conj(z0)) / 2.0;
  auto got = fd_dzbar(hfun, z0);
  REQUIRE(std::abs(got - want) < 1e-9);
}
