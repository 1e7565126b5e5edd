#pragma once

// Small numeric utilities shared across modules: bracketed monotone root
// solving, Richardson-extrapolated finite differences, and a natural/clamped
// cubic spline.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace digeo {

// Solve f(x) = target for strictly increasing f on [lo, hi] by Newton with
// bisection fallback.  df may be null, in which case a secant step is used.
inline double solve_increasing(const std::function<double(double)>& f,
                               const std::function<double(double)>& df,
                               double target, double lo, double hi,
                               double x_tol = 1e-13, int max_iter = 200) {
  double flo = f(lo) - target, fhi = f(hi) - target;
  if (flo > 0.0 || fhi < 0.0)
    throw std::domain_error("solve_increasing: target outside bracket");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    double fx = f(x) - target;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    double step;
    if (df) {
      double d = df(x);
      step = (d > 0.0) ? -fx / d : 0.0;
    } else {
      step = 0.0;
    }
    double xn = x + step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= x_tol * (1.0 + std::abs(x))) return xn;
    x = xn;
  }
  return x;
}

// Centered first derivative with one Richardson level: O(h^4).
template <class F>
auto fd_deriv1(F&& f, double x, double h = 1e-3) {
  auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

// Centered second derivative with one Richardson level: O(h^4).
template <class F>
auto fd_deriv2(F&& f, double x, double h = 1e-3) {
  auto d = [&](double hh) {
    return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh);
  };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

// Two Richardson levels on the 5-point Laplacian stencil: O(h^6).
// Returns d^2 f / dz dzbar = (1/4) * (f_aa + f_bb) for z = a + ib.
template <class F>
auto fd_dz_dzbar(F&& f, std::complex<double> z, double h = 0.05) {
  auto f0 = f(z);
  auto lap = [&](double hh) {
    const std::complex<double> ex(hh, 0.0), ey(0.0, hh);
    return (f(z + ex) + f(z - ex) + f(z + ey) + f(z - ey) - 4.0 * f0) /
           (hh * hh);
  };
  auto l0 = lap(h), l1 = lap(h / 2), l2 = lap(h / 4);
  auto r1a = (4.0 * l1 - l0) / 3.0;
  auto r1b = (4.0 * l2 - l1) / 3.0;
  return 0.25 * (16.0 * r1b - r1a) / 15.0;
}

// Centered dbar derivative of a chart function: df/dzbar, O(h^4).
template <class F>
std::complex<double> fd_dzbar(F&& f, std::complex<double> z, double h = 1e-3) {
  auto d = [&](double hh) {
    const std::complex<double> ex(hh, 0.0), ey(0.0, hh);
    auto fa = (f(z + ex) - f(z - ex)) / (2.0 * hh);
    auto fb = (f(z + ey) - f(z - ey)) / (2.0 * hh);
    return 0.5 * (fa + std::complex<double>(0, 1) * fb);
  };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

// Cubic spline through (xs, ys) with prescribed end slopes.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> xs, std::vector<double> ys,
              double slope_left, double slope_right)
      : xs_(std::move(xs)), ys_(std::move(ys)) {
    const size_t n = xs_.size();
    if (n < 3 || ys_.size() != n)
      throw std::invalid_argument("CubicSpline: need >= 3 samples");
    for (size_t i = 1; i < n; ++i)
      if (!(xs_[i] > xs_[i - 1]))
        throw std::invalid_argument("CubicSpline: x not increasing");
    // Solve the tridiagonal system for second derivatives (clamped ends).
    std::vector<double> a(n), b(n), c(n), r(n);
    m_.assign(n, 0.0);
    double h0 = xs_[1] - xs_[0];
    b[0] = 2.0 * h0;
    c[0] = h0;
    r[0] = 6.0 * ((ys_[1] - ys_[0]) / h0 - slope_left);
    for (size_t i = 1; i + 1 < n; ++i) {
      double hl = xs_[i] - xs_[i - 1], hr = xs_[i + 1] - xs_[i];
      a[i] = hl;
      b[i] = 2.0 * (hl + hr);
      c[i] = hr;
      r[i] = 6.0 * ((ys_[i + 1] - ys_[i]) / hr - (ys_[i] - ys_[i - 1]) / hl);
    }
    double hn = xs_[n - 1] - xs_[n - 2];
    a[n - 1] = hn;
    b[n - 1] = 2.0 * hn;
    r[n - 1] = 6.0 * (slope_right - (ys_[n - 1] - ys_[n - 2]) / hn);
    for (size_t i = 1; i < n; ++i) {
      double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    m_[n - 1] = r[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
  }

  double x_min() const { return xs_.front(); }
  double x_max() const { return xs_.back(); }

  double value(double x) const { return eval(x, 0); }
  double deriv(double x) const { return eval(x, 1); }
  double second(double x) const { return eval(x, 2); }
  double third(double x) const { return eval(x, 3); }

 private:
  double eval(double x, int order) const {
    size_t i = interval(x);
    double h = xs_[i + 1] - xs_[i];
    double A = (xs_[i + 1] - x) / h, B = (x - xs_[i]) / h;
    switch (order) {
      case 0:
        return A * ys_[i] + B * ys_[i + 1] +
               ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) *
                   (h * h) / 6.0;
      case 1:
        return (ys_[i + 1] - ys_[i]) / h -
               (3.0 * A * A - 1.0) / 6.0 * h * m_[i] +
               (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
      case 2:
        return A * m_[i] + B * m_[i + 1];
      default:
        return (m_[i + 1] - m_[i]) / h;
    }
  }

  size_t interval(double x) const {
    if (x <= xs_.front()) return 0;
    if (x >= xs_.back()) return xs_.size() - 2;
    size_t lo = 0, hi = xs_.size() - 1;
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      (xs_[mid] <= x ? lo : hi) = mid;
    }
    return lo;
  }

  std::vector<double> xs_, ys_, m_;
};

}  // namespace digeo
