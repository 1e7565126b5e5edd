#pragma once

// Adaptive Gauss-Legendre quadrature on panels, with a log-scaled variant
// for sharply peaked exponential integrands.  Integrands of the form
// exp((j+1)x - p*phi(x)) concentrate in Laplace peaks of width
// ~1/sqrt(p*phi''); the adaptive bisection resolves those as long as the
// seed panels are coarser than the peak, so we always seed with several
// panels before refining.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace digeo {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_floor = 0.0;  // per-panel error accepted regardless of scale
  int max_depth = 30;
  int seed_panels = 8;
  int order = 16;  // Gauss-Legendre points per panel
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1],
// computed once by Newton iteration on the Legendre recurrence.
inline const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre(int n) {
  static std::vector<std::pair<std::vector<double>, std::vector<double>>>
      cache(65);
  if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: order");
  auto& entry = cache[static_cast<size_t>(n)];
  if (!entry.first.empty()) return entry;
  std::vector<double> xs(n), ws(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    xs[i] = -x;
    xs[n - 1 - i] = x;
    ws[i] = ws[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  entry = {std::move(xs), std::move(ws)};
  return entry;
}

template <class F>
auto panel_gauss(F&& f, double a, double b, int order)
    -> decltype(f(0.0)) {
  const auto& [xs, ws] = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  decltype(f(0.0)) sum{};
  for (size_t i = 0; i < xs.size(); ++i) sum += ws[i] * f(mid + half * xs[i]);
  return half * sum;
}

namespace detail {

template <class T>
double scalar_abs(const T& v) {
  if constexpr (std::is_same_v<T, std::complex<double>>)
    return std::abs(v);
  else
    return std::abs(static_cast<double>(v));
}

template <class F, class T>
void adapt(F& f, double a, double b, T coarse, const QuadratureOptions& opt,
           int depth, T& total, bool& converged) {
  const double mid = 0.5 * (a + b);
  T left = panel_gauss(f, a, mid, opt.order);
  T right = panel_gauss(f, mid, b, opt.order);
  T fine = left + right;
  double err = scalar_abs<T>(fine - coarse);
  if (err <= std::max(opt.abs_floor, opt.rel_tol * scalar_abs<T>(fine)) ||
      depth >= opt.max_depth) {
    if (depth >= opt.max_depth &&
        err > std::max(opt.abs_floor, opt.rel_tol * scalar_abs<T>(fine)) * 16)
      converged = false;
    total += fine;
    return;
  }
  adapt(f, a, mid, left, opt, depth + 1, total, converged);
  adapt(f, mid, b, right, opt, depth + 1, total, converged);
}

}  // namespace detail

template <class T = double>
struct IntegralResult {
  T value{};
  bool converged = true;
};

// Adaptive integration of f over [a,b].  T is double or complex<double>.
template <class T = double, class F>
IntegralResult<T> integrate_adaptive(F&& f, double a, double b,
                                     const QuadratureOptions& opt = {}) {
  if (!(a < b)) return {T{}, true};
  IntegralResult<T> out;
  const int seeds = std::max(1, opt.seed_panels);
  for (int s = 0; s < seeds; ++s) {
    double pa = a + (b - a) * s / seeds;
    double pb = a + (b - a) * (s + 1) / seeds;
    T coarse = panel_gauss(f, pa, pb, opt.order);
    detail::adapt(f, pa, pb, coarse, opt, 0, out.value, out.converged);
  }
  return out;
}

template <class T = double, class F>
T integrate_or_throw(F&& f, double a, double b,
                     const QuadratureOptions& opt = {}) {
  auto r = integrate_adaptive<T>(std::forward<F>(f), a, b, opt);
  if (!r.converged)
    throw QuadratureError("quadrature did not reach tolerance at max depth");
  return r.value;
}

struct LogIntegral {
  double log_value;  // log of the integral
  double shift;      // exponent shift used (approximate max of h)
  bool converged;
};

// log of  int_a^b exp(h(x)) dx  for h with possibly large magnitude.
// The exponent is shifted by a scanned maximum before integrating.
template <class H>
LogIntegral integrate_log_exp(H&& h, double a, double b,
                              const QuadratureOptions& opt = {},
                              int scan_points = 257) {
  if (!(a < b)) throw std::invalid_argument("integrate_log_exp: empty range");
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan_points; ++i) {
    double x = a + (b - a) * i / (scan_points - 1);
    m = std::max(m, h(x));
  }
  QuadratureOptions o = opt;
  if (o.abs_floor == 0.0) o.abs_floor = o.rel_tol * 1e-3;
  auto f = [&](double x) { return std::exp(h(x) - m); };
  auto r = integrate_adaptive<double>(f, a, b, o);
  if (!(r.value > 0.0))
    throw QuadratureError("integrate_log_exp: nonpositive integral");
  return {m + std::log(r.value), m, r.converged};
}

inline double log_add_exp(double la, double lb) {
  if (la == -std::numeric_limits<double>::infinity()) return lb;
  if (lb == -std::numeric_limits<double>::infinity()) return la;
  double m = std::max(la, lb);
  return m + std::log(std::exp(la - m) + std::exp(lb - m));
}

}  // namespace digeo
