#pragma once

// S^1-invariant fiber metrics on O(k) over P^1, represented by a strictly
// convex potential phi of the log-radius variable x = log|z|^2, with
// asymptotic slopes 0 (x -> -inf) and k (x -> +inf).  Outside [-X, X] the
// potential is continued linearly with those slopes, so exponential tail
// integrals close in elementary form.
//
// Chart dictionary (chart 0, coordinate z):
//   omega = i g dz ^ dzbar,   g(z) = phi''(x) e^{-x},  x = log|z|^2.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "digeo/numerics.hpp"
#include "digeo/quadrature.hpp"

namespace digeo {

// Real-valued profile of x with derivative evaluators.  d3/d4 optional.
struct Profile {
  std::function<double(double)> f, d1, d2, d3, d4;
};

inline Profile constant_profile(double c) {
  auto zero = [](double) { return 0.0; };
  return {[c](double) { return c; }, zero, zero, zero, zero};
}

inline Profile add_profiles(const Profile& a, const Profile& b) {
  auto lift = [](const std::function<double(double)>& fa,
                 const std::function<double(double)>& fb)
      -> std::function<double(double)> {
    if (!fa || !fb) return nullptr;
    return [fa, fb](double x) { return fa(x) + fb(x); };
  };
  return {lift(a.f, b.f), lift(a.d1, b.d1), lift(a.d2, b.d2),
          lift(a.d3, b.d3), lift(a.d4, b.d4)};
}

inline Profile scale_profile(const Profile& a, double c) {
  auto lift = [c](const std::function<double(double)>& fa)
      -> std::function<double(double)> {
    if (!fa) return nullptr;
    return [fa, c](double x) { return c * fa(x); };
  };
  return {lift(a.f), lift(a.d1), lift(a.d2), lift(a.d3), lift(a.d4)};
}

enum class Validate { yes, no };

class ToricPotential {
 public:
  ToricPotential() = default;

  ToricPotential(int k, double x_max, Profile profile,
                 Validate validate = Validate::yes, int scan_points = 801,
                 double tail_tol = 1e-6)
      : k_(k), x_max_(x_max), profile_(std::move(profile)) {
    if (k_ < 1) throw std::invalid_argument("ToricPotential: k >= 1 required");
    if (!(x_max_ > 0)) throw std::invalid_argument("ToricPotential: x_max");
    if (!profile_.f || !profile_.d1 || !profile_.d2)
      throw std::invalid_argument("ToricPotential: need f, d1, d2");
    phi_edge_lo_ = profile_.f(-x_max_);
    phi_edge_hi_ = profile_.f(x_max_);
    if (validate == Validate::yes) check_invariants(scan_points, tail_tol);
  }

  int degree() const { return k_; }
  double x_max() const { return x_max_; }

  double value(double x) const {
    if (x < -x_max_) return phi_edge_lo_;                      // slope 0
    if (x > x_max_) return phi_edge_hi_ + k_ * (x - x_max_);   // slope k
    return profile_.f(x);
  }
  double deriv(double x) const {
    if (x < -x_max_) return 0.0;
    if (x > x_max_) return k_;
    return profile_.d1(x);
  }
  double second(double x) const {
    if (std::abs(x) > x_max_) return 0.0;
    return profile_.d2(x);
  }
  bool has_third() const { return static_cast<bool>(profile_.d3); }
  double third(double x) const {
    if (std::abs(x) > x_max_) return 0.0;
    if (profile_.d3) return profile_.d3(x);
    return fd_deriv1([this](double u) { return second(u); }, x, 2e-3);
  }
  bool has_fourth() const { return static_cast<bool>(profile_.d4); }
  double fourth(double x) const {
    if (std::abs(x) > x_max_) return 0.0;
    if (profile_.d4) return profile_.d4(x);
    return fd_deriv2([this](double u) { return second(u); }, x, 4e-3);
  }

  // Density g of omega = i g dz ^ dzbar at chart-0 log radius x.
  double density_x(double x) const { return second(x) * std::exp(-x); }

  const Profile& profile() const { return profile_; }

 private:
  void check_invariants(int scan_points, double tail_tol) const {
    double prev = -1.0;
    for (int i = 0; i < scan_points; ++i) {
      double x = -x_max_ + 2.0 * x_max_ * i / (scan_points - 1);
      double d2 = profile_.d2(x);
      if (!(d2 > 0.0))
        throw std::domain_error("ToricPotential: phi'' <= 0 at x=" +
                                std::to_string(x));
      double d1 = profile_.d1(x);
      if (!(d1 > 0.0 && d1 < k_))
        throw std::domain_error("ToricPotential: phi' outside (0,k) at x=" +
                                std::to_string(x));
      if (i > 0 && !(d1 > prev))
        throw std::domain_error("ToricPotential: phi' not increasing");
      prev = d1;
    }
    // C^1 match with the linear tails, within tolerance.
    if (std::abs(profile_.d1(-x_max_)) > tail_tol ||
        std::abs(profile_.d1(x_max_) - k_) > tail_tol)
      throw std::domain_error("ToricPotential: tails not C^1 within tol");
  }

  int k_ = 0;
  double x_max_ = 0.0;
  double phi_edge_lo_ = 0.0, phi_edge_hi_ = 0.0;
  Profile profile_;
};

// ---------------------------------------------------------------------------
// Presets

// Fubini-Study: phi(x) = k log(1 + e^x).  Derivatives in terms of the
// logistic sigma(x) = e^x/(1+e^x).
inline Profile fs_profile(int k) {
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  auto log1pexp = [](double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  };
  double kk = k;
  return {
      [=](double x) { return kk * log1pexp(x); },
      [=](double x) { return kk * sig(x); },
      [=](double x) {
        double s = sig(x);
        return kk * s * (1 - s);
      },
      [=](double x) {
        double s = sig(x);
        return kk * s * (1 - s) * (1 - 2 * s);
      },
      [=](double x) {
        double s = sig(x);
        return kk * s * (1 - s) * (1 - 6 * s + 6 * s * s);
      }};
}

// Gaussian bump eps * exp(-(x-x0)^2 / (2 w^2)); derivatives via the
// probabilists' Hermite polynomials.
inline Profile gaussian_bump_profile(double eps, double x0, double w) {
  if (!(w > 0)) throw std::invalid_argument("gaussian_bump: width");
  auto he = [](int n, double u) {
    switch (n) {
      case 1: return u;
      case 2: return u * u - 1.0;
      case 3: return u * (u * u - 3.0);
      default: return u * u * (u * u - 6.0) + 3.0;
    }
  };
  auto base = [=](double x) {
    double u = (x - x0) / w;
    return eps * std::exp(-0.5 * u * u);
  };
  auto d = [=](int n) {
    return [=](double x) {
      double u = (x - x0) / w;
      double sgn = (n % 2 == 0) ? 1.0 : -1.0;
      return sgn * he(n, u) * base(x) / std::pow(w, n);
    };
  };
  return {base, d(1), d(2), d(3), d(4)};
}

inline ToricPotential fs_metric(int k, double x_max = 20.0) {
  return ToricPotential(k, x_max, fs_profile(k));
}

inline ToricPotential fs_bump_metric(int k, double eps, double x0, double w,
                                     double x_max = 20.0) {
  return ToricPotential(
      k, x_max, add_profiles(fs_profile(k), gaussian_bump_profile(eps, x0, w)));
}

inline ToricPotential fs_shift_metric(int k, double c, double x_max = 20.0) {
  return ToricPotential(k, x_max,
                        add_profiles(fs_profile(k), constant_profile(c)));
}

// phi(x + a): the pullback of FS under the scaling flow of z d/dz.
inline ToricPotential pullback_scaling_metric(int k, double a,
                                              double x_max = 20.0) {
  Profile fs = fs_profile(k);
  Profile shifted{
      [fs, a](double x) { return fs.f(x + a); },
      [fs, a](double x) { return fs.d1(x + a); },
      [fs, a](double x) { return fs.d2(x + a); },
      [fs, a](double x) { return fs.d3(x + a); },
      [fs, a](double x) { return fs.d4(x + a); }};
  // Tail tolerance must absorb the shifted edge slope ~ k e^{-(X-|a|)}.
  return ToricPotential(k, x_max, std::move(shifted), Validate::yes, 801,
                        std::max(1e-6, 2.0 * k * std::exp(-(x_max - std::abs(a)))));
}

inline ToricPotential shifted_metric(const ToricPotential& tp, double a,
                                     double tail_tol = 1e-4) {
  Profile p = tp.profile();
  Profile shifted{
      [p, a](double x) { return p.f(x + a); },
      [p, a](double x) { return p.d1(x + a); },
      [p, a](double x) { return p.d2(x + a); },
      p.d3 ? std::function<double(double)>(
                 [p, a](double x) { return p.d3(x + a); })
           : nullptr,
      p.d4 ? std::function<double(double)>(
                 [p, a](double x) { return p.d4(x + a); })
           : nullptr};
  return ToricPotential(tp.degree(), tp.x_max(), std::move(shifted),
                        Validate::yes, 801, tail_tol);
}

// Two-column CSV (x, phi(x)), splined with clamped asymptotic slopes.
inline ToricPotential toric_from_samples(int k, std::vector<double> xs,
                                         std::vector<double> ys) {
  if (xs.size() < 5) throw std::invalid_argument("toric_from_samples: size");
  double x_max = std::max(std::abs(xs.front()), std::abs(xs.back()));
  auto spline = std::make_shared<CubicSpline>(std::move(xs), std::move(ys),
                                              0.0, static_cast<double>(k));
  Profile prof{
      [spline](double x) { return spline->value(x); },
      [spline](double x) { return spline->deriv(x); },
      [spline](double x) { return spline->second(x); },
      [spline](double x) { return spline->third(x); },
      nullptr};
  return ToricPotential(k, x_max, std::move(prof), Validate::yes, 801, 1e-4);
}

inline ToricPotential toric_from_csv(int k, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("toric_from_csv: cannot open " + path);
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, y;
    if (ss >> x >> y) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  return toric_from_samples(k, std::move(xs), std::move(ys));
}

// ---------------------------------------------------------------------------
// Legendre transform

// Dual potential u(y) = sup_x (x y - phi(x)) on the reachable slope range.
class LegendreDual {
 public:
  explicit LegendreDual(ToricPotential tp, double x_solve_margin = 0.0)
      : tp_(std::move(tp)) {
    x_lo_ = -tp_.x_max() + x_solve_margin;
    x_hi_ = tp_.x_max() - x_solve_margin;
    y_min_ = tp_.deriv(x_lo_);
    y_max_ = tp_.deriv(x_hi_);
  }

  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  int degree() const { return tp_.degree(); }

  // x*(y): inverse of phi' on the interior.
  double x_of_y(double y) const {
    if (!(y > 0.0 && y < tp_.degree()))
      throw std::domain_error("LegendreDual: y outside (0,k)");
    if (!(y >= y_min_ && y <= y_max_))
      throw std::domain_error("LegendreDual: y outside resolvable range");
    return solve_increasing([this](double x) { return tp_.deriv(x); },
                            [this](double x) { return tp_.second(x); }, y,
                            x_lo_, x_hi_);
  }

  double value(double y) const {
    double x = x_of_y(y);
    return x * y - tp_.value(x);
  }
  double deriv(double y) const { return x_of_y(y); }
  double second(double y) const { return 1.0 / tp_.second(x_of_y(y)); }
  // x''(y) = -phi''' / phi''^3 at x*(y).
  double third(double y) const {
    double x = x_of_y(y);
    double d2 = tp_.second(x);
    return -tp_.third(x) / (d2 * d2 * d2);
  }

  const ToricPotential& primal() const { return tp_; }

 private:
  ToricPotential tp_;
  double x_lo_, x_hi_, y_min_, y_max_;
};

inline LegendreDual legendre_transform(const ToricPotential& tp) {
  return LegendreDual(tp);
}

// Biconjugate evaluated at x: should reproduce phi(x) on the interior.
inline double legendre_biconjugate(const LegendreDual& dual, double x) {
  double y = solve_increasing([&](double y_) { return dual.deriv(y_); },
                              [&](double y_) { return dual.second(y_); }, x,
                              dual.y_min(), dual.y_max());
  return x * y - dual.value(y);
}

// ---------------------------------------------------------------------------
// Kahler quantities, toric fast path

// Scalar curvature S = -(d^2/dx^2 log phi'') / phi''.  Normalized so that
// Fubini-Study has constant S = 2/k > 0.
inline double scalar_curvature_x(const ToricPotential& tp, double x) {
  double d2 = tp.second(x);
  if (!(d2 > 0)) throw std::domain_error("scalar_curvature: phi'' <= 0");
  double r = tp.third(x) / d2;
  double log_d2_second = tp.fourth(x) / d2 - r * r;
  return -log_d2_second / d2;
}

struct PositivityReport {
  bool positive;
  double margin;    // min chart-local density over the scan
  double arg_x;     // scan location of the minimum (chart-0 log radius)
};

// Scan the density over both charts restricted to |coordinate| <= 1.
inline PositivityReport check_positivity(const ToricPotential& tp,
                                         int scan_points = 801) {
  PositivityReport rep{true, std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i < scan_points; ++i) {
    double x = -tp.x_max() + tp.x_max() * i / (scan_points - 1);  // [-X, 0]
    // chart 0 at log radius x, and chart 1 at log radius x (|z| = e^{-x/2}).
    double g0 = tp.second(x) * std::exp(-x);
    double g1 = tp.second(-x) * std::exp(-x);  // transformed density
    for (double g : {g0, g1}) {
      if (g < rep.margin) {
        rep.margin = g;
        rep.arg_x = x;
      }
    }
  }
  rep.positive = rep.margin > 0.0;
  return rep;
}

// Total volume of omega: 2 pi * int phi'' dx  (= 2 pi k exactly).
inline double volume(const ToricPotential& tp,
                     const QuadratureOptions& opt = {}) {
  auto r = integrate_adaptive<double>(
      [&](double x) { return tp.second(x); }, -tp.x_max(), tp.x_max(), opt);
  if (!r.converged) throw QuadratureError("volume: quadrature not converged");
  return 2.0 * M_PI * r.value;
}

// int_Z h omega  for an S^1-invariant integrand h(x).
template <class H>
double integrate_omega(const ToricPotential& tp, H&& h,
                       const QuadratureOptions& opt = {}) {
  auto r = integrate_adaptive<double>(
      [&](double x) { return h(x) * tp.second(x); }, -tp.x_max(), tp.x_max(),
      opt);
  if (!r.converged)
    throw QuadratureError("integrate_omega: quadrature not converged");
  return 2.0 * M_PI * r.value;
}

// int S omega (Gauss-Bonnet value 4 pi) and the mean scalar curvature.
inline double integral_scalar_curvature(const ToricPotential& tp,
                                        const QuadratureOptions& opt = {}) {
  // S * density = -(log phi'')'' , integrated directly.
  auto r = integrate_adaptive<double>(
      [&](double x) {
        double d2 = tp.second(x);
        double ratio = tp.third(x) / d2;
        return -(tp.fourth(x) / d2 - ratio * ratio);
      },
      -tp.x_max(), tp.x_max(), opt);
  if (!r.converged)
    throw QuadratureError("integral_scalar_curvature: not converged");
  return 2.0 * M_PI * r.value;
}

inline double mean_scalar_curvature(const ToricPotential& tp,
                                    const QuadratureOptions& opt = {}) {
  return integral_scalar_curvature(tp, opt) / volume(tp, opt);
}

}  // namespace digeo
