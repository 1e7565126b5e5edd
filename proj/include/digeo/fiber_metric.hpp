#pragma once

// General (not necessarily S^1-invariant) positive metrics on O(k) over P^1,
// given by weights in the two standard charts.  w = 1/z on the overlap, and
// the weights obey  w1(w) = w0(1/w) + k log|w|^2.
//
// Integrals over P^1 split exactly at the unit circle: chart 0 covers
// |z| <= 1 and chart 1 covers |w| < 1.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "digeo/numerics.hpp"
#include "digeo/quadrature.hpp"
#include "digeo/toric.hpp"

namespace digeo {

using cxd = std::complex<double>;

struct ChartFun {
  std::function<double(cxd)> f;            // weight value
  std::function<double(cxd)> laplacian;    // optional analytic dz dzbar
};

class FiberMetric {
 public:
  FiberMetric(int k, ChartFun chart0, ChartFun chart1, double fd_step = 0.05)
      : k_(k), c0_(std::move(chart0)), c1_(std::move(chart1)),
        fd_step_(fd_step) {
    if (k_ < 1) throw std::invalid_argument("FiberMetric: k >= 1");
    if (!c0_.f || !c1_.f) throw std::invalid_argument("FiberMetric: weights");
  }

  int degree() const { return k_; }

  double weight(int chart, cxd z) const {
    return chart == 0 ? c0_.f(z) : c1_.f(z);
  }

  // Density of omega = i g dz ^ dzbar in the given chart.
  double density(int chart, cxd z) const {
    const ChartFun& c = chart == 0 ? c0_ : c1_;
    double g = c.laplacian ? c.laplacian(z) : fd_dz_dzbar(c.f, z, fd_step_);
    if (!(g > 0.0))
      throw std::domain_error("FiberMetric: nonpositive density");
    return g;
  }

  // Transition residual  w1(w) - w0(1/w) - k log|w|^2  on the overlap.
  double transition_residual(int samples = 64) const {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      double theta = 2.0 * M_PI * i / samples;
      double r = 0.9 + 0.2 * (i % 7) / 6.0;  // radii in [0.9, 1.1]
      cxd w = std::polar(r, theta);
      double res =
          c1_.f(w) - c0_.f(1.0 / w) - k_ * 2.0 * std::log(std::abs(w));
      worst = std::max(worst, std::abs(res));
    }
    return worst;
  }

 private:
  int k_;
  ChartFun c0_, c1_;
  double fd_step_;
};

// Wrap an S^1-invariant potential as a two-chart metric (for cross-checks
// between the 1D and 2D integration paths).
inline FiberMetric fiber_metric_from_toric(const ToricPotential& tp) {
  int k = tp.degree();
  auto val0 = [tp](cxd z) {
    double a = std::abs(z);
    double x = a > 0 ? 2.0 * std::log(a) : -1e300;
    return tp.value(std::max(x, -4.0 * tp.x_max()));
  };
  auto val1 = [tp, k](cxd w) {
    double a = std::abs(w);
    double xw = a > 0 ? 2.0 * std::log(a) : -1e300;
    xw = std::max(xw, -4.0 * tp.x_max());
    return tp.value(-xw) + k * xw;
  };
  auto lap0 = [tp](cxd z) {
    double a = std::abs(z);
    if (a <= 0) return 0.0;  // slope-0 tail: flat cap
    double x = 2.0 * std::log(a);
    return tp.density_x(x);
  };
  auto lap1 = [tp](cxd w) {
    double a = std::abs(w);
    if (a <= 0) return 0.0;  // slope-k tail maps to a flat cap as well
    double xw = 2.0 * std::log(a);
    return tp.second(-xw) * std::exp(-xw);
  };
  return FiberMetric(k, ChartFun{val0, lap0}, ChartFun{val1, lap1});
}

// 2D quadrature over one unit disk: int_{|z|<=1} f(z) * i dz^dzbar
// = 2 * int f r dr dtheta.  Trapezoid in theta (spectral for smooth
// periodic integrands), composite Gauss panels radially.  The angular rule
// is validated by one doubling at coarse radial resolution, then only the
// radial grid is refined.
template <class T = double, class F>
T integrate_disk(F&& f, double rel_tol = 1e-10, int theta0 = 64,
                 int radial_panels0 = 8, int max_doublings = 5) {
  auto pass = [&](int n_theta, int panels) -> T {
    const auto& [xs, ws] = gauss_legendre(16);
    T total{};
    for (int pi = 0; pi < panels; ++pi) {
      double ra = static_cast<double>(pi) / panels;
      double rb = static_cast<double>(pi + 1) / panels;
      double mid = 0.5 * (ra + rb), half = 0.5 * (rb - ra);
      for (size_t i = 0; i < xs.size(); ++i) {
        double r = mid + half * xs[i];
        T ring{};
        for (int j = 0; j < n_theta; ++j) {
          double theta = 2.0 * M_PI * j / n_theta;
          ring += f(std::polar(r, theta));
        }
        total += ws[i] * half * ring * (2.0 * M_PI / n_theta) * r;
      }
    }
    return 2.0 * total;
  };
  int n_theta = theta0;
  {
    T a = pass(n_theta, radial_panels0);
    for (int it = 0; it < 3; ++it) {
      T b = pass(2 * n_theta, radial_panels0);
      double scale = std::max(detail::scalar_abs<T>(b), 1e-300);
      if (detail::scalar_abs<T>(b - a) <= 0.5 * rel_tol * scale) break;
      n_theta *= 2;
      a = b;
    }
  }
  int panels = radial_panels0;
  T prev = pass(n_theta, panels);
  for (int it = 0; it < max_doublings; ++it) {
    panels *= 2;
    T cur = pass(n_theta, panels);
    double scale = std::max(detail::scalar_abs<T>(cur), 1e-300);
    if (detail::scalar_abs<T>(cur - prev) <= rel_tol * scale) return cur;
    prev = cur;
  }
  throw QuadratureError("integrate_disk: no convergence under doubling");
}

// int_{P^1} f omega-free: caller supplies per-chart integrands already
// including any density/weight factors; this just sums the two disks.
template <class T = double, class F0, class F1>
T integrate_p1(F0&& f_chart0, F1&& f_chart1, double rel_tol = 1e-10) {
  T a = integrate_disk<T>(f_chart0, rel_tol);
  T b = integrate_disk<T>(f_chart1, rel_tol);
  return a + b;
}

inline double volume(const FiberMetric& m, double rel_tol = 1e-9) {
  return integrate_p1<double>(
      [&](cxd z) { return m.density(0, z); },
      [&](cxd w) { return m.density(1, w); }, rel_tol);
}

// Scalar curvature in a chart: S = -(dz dzbar log g)/g, finite differences
// on the chart density.
inline double scalar_curvature(const FiberMetric& m, int chart, cxd z,
                               double h = 0.05) {
  double g = m.density(chart, z);
  auto log_g = [&](cxd zz) { return std::log(m.density(chart, zz)); };
  return -fd_dz_dzbar(log_g, z, h) / g;
}

inline double kahler_density(const FiberMetric& m, int chart, cxd z) {
  return m.density(chart, z);
}

inline double kahler_density(const ToricPotential& tp, cxd z) {
  double a = std::abs(z);
  if (a <= 0) throw std::domain_error("kahler_density: chart origin; use x");
  return tp.density_x(2.0 * std::log(a));
}

}  // namespace digeo
