#pragma once

// Gram matrices of the two Hilbert norms on section spaces:
//
//   E-type (canonical twist):  G_{ab} = int [u_b, u_a] e^{-p phi}
//   F-type:                    G_{ab} = int  u_b conj(u_a) e^{-p phi} omega
//
// Toric metrics reduce everything to 1D integrals
//   E:  G_jj = 2 pi int exp((j+1)x - p phi(x)) dx      (+ exponential tails)
//   F:  G_jj = 2 pi int exp(j x - p phi(x)) phi''(x) dx
// evaluated in shifted log space.  General metrics go through two-chart 2D
// quadrature; the dense path is intended for pk <= 32.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "digeo/fiber_metric.hpp"
#include "digeo/hermitian_form.hpp"
#include "digeo/quadrature.hpp"
#include "digeo/toric.hpp"

namespace digeo {

struct GramOptions {
  double rel_tol = 1e-10;
  int max_pk_dense = 32;
  double tail_decades = 30.0;  // extension of E-type domains beyond [-X, X]
};

// Per-basis-element integration context for a toric metric at level p.
// Provides log norms and normalized moments against the j-th weight measure
//   dnu_j  propto  exp(h_j(x)) dx.
class ToricMoments {
 public:
  ToricMoments(const ToricPotential& phi, int p, Twist twist,
               const GramOptions& opt = {})
      : phi_(phi), p_(p), twist_(twist), opt_(opt) {
    space_ = SectionSpace::make(phi.degree(), p, twist);
    const int d = space_.dim;
    const int pk = p * phi.degree();
    log_norm_.resize(d);
    shift_.resize(d);
    den_.resize(d);
    lo_.resize(d);
    hi_.resize(d);
    const double X = phi.x_max();
    QuadratureOptions qopt;
    qopt.rel_tol = opt.rel_tol;
    for (int j = 0; j < d; ++j) {
      if (twist == Twist::canonical) {
        // integrand exp((j+1)x - p phi); linear tails decay at rates
        // (j+1) on the left and pk-(j+1) on the right.
        lo_[j] = -X - opt.tail_decades / (j + 1);
        hi_[j] = X + opt.tail_decades / (pk - 1 - j);
      } else {
        lo_[j] = -X;
        hi_[j] = X;
      }
      auto h = [&](double x) { return log_integrand(j, x); };
      auto li = integrate_log_exp(h, lo_[j], hi_[j], qopt);
      if (!li.converged)
        throw QuadratureError("gram: log integral not converged (j=" +
                              std::to_string(j) + ")");
      log_norm_[j] = li.log_value + std::log(2.0 * M_PI);
      shift_[j] = li.shift;
      den_[j] = std::exp(li.log_value - li.shift);
    }
  }

  const SectionSpace& space() const { return space_; }
  int dim() const { return space_.dim; }
  const ToricPotential& metric() const { return phi_; }
  int level() const { return p_; }

  // log of the actual Gram diagonal entry (2 pi included).
  double log_norm(int j) const { return log_norm_[j]; }

  Eigen::VectorXd log_diagonal() const {
    return Eigen::Map<const Eigen::VectorXd>(log_norm_.data(),
                                             static_cast<long>(log_norm_.size()));
  }

  // Normalized moment  <w>_j = int w dnu_j / int dnu_j.
  template <class T = double, class W>
  T moment(int j, W&& w) const {
    QuadratureOptions qopt;
    qopt.rel_tol = opt_.rel_tol;
    qopt.abs_floor = opt_.rel_tol * den_[j] * 1e-2;
    auto f = [&](double x) {
      return w(x) * std::exp(log_integrand(j, x) - shift_[j]);
    };
    auto r = integrate_adaptive<T>(f, lo_[j], hi_[j], qopt);
    if (!r.converged)
      throw QuadratureError("gram moment: quadrature not converged");
    return r.value / den_[j];
  }

 private:
  double log_integrand(int j, double x) const {
    if (twist_ == Twist::canonical)
      return (j + 1) * x - p_ * phi_.value(x);
    double d2 = phi_.second(x);
    if (d2 <= 0.0) return -std::numeric_limits<double>::infinity();
    return j * x - p_ * phi_.value(x) + std::log(d2);
  }

  ToricPotential phi_;
  int p_;
  Twist twist_;
  GramOptions opt_;
  SectionSpace space_;
  std::vector<double> log_norm_, shift_, den_, lo_, hi_;
};

inline HermitianForm gram_e(const ToricPotential& m, int p,
                            const GramOptions& opt = {}) {
  ToricMoments tm(m, p, Twist::canonical, opt);
  return HermitianForm::from_log_diagonal(tm.space(), tm.log_diagonal());
}

inline HermitianForm gram_f(const ToricPotential& m, int p,
                            const GramOptions& opt = {}) {
  ToricMoments tm(m, p, Twist::none, opt);
  return HermitianForm::from_log_diagonal(tm.space(), tm.log_diagonal());
}

// ---------------------------------------------------------------------------
// Dense two-chart path

namespace detail {

// Chart representation of the monomial basis.  Chart 1 coefficients follow
// from z = 1/w:  z^j -> w^{pk-j}  on O(pk),  z^j dz -> -w^{pk-2-j} dw.
inline cxd basis_value(const SectionSpace& s, int chart, int j, cxd z) {
  const int pk = s.p * s.k;
  if (s.twist == Twist::canonical) {
    if (chart == 0) return std::pow(z, j);
    return -std::pow(z, pk - 2 - j);
  }
  if (chart == 0) return std::pow(z, j);
  return std::pow(z, pk - j);
}

// One radial/angular pass of the disk integral of the matrix integrand
// row a, col b:  f_b(z) conj(f_a(z)) * weight(z).
inline Eigen::MatrixXcd disk_gram_pass(
    const SectionSpace& s, int chart,
    const std::function<double(cxd)>& weight, int n_theta, int panels) {
  const int d = s.dim;
  const auto& [xs, ws] = gauss_legendre(16);
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(d, d);
  Eigen::VectorXcd vals(d);
  for (int pi = 0; pi < panels; ++pi) {
    double ra = static_cast<double>(pi) / panels;
    double rb = static_cast<double>(pi + 1) / panels;
    double mid = 0.5 * (ra + rb), half = 0.5 * (rb - ra);
    for (size_t i = 0; i < xs.size(); ++i) {
      double r = mid + half * xs[i];
      Eigen::MatrixXcd ring = Eigen::MatrixXcd::Zero(d, d);
      for (int jt = 0; jt < n_theta; ++jt) {
        double theta = 2.0 * M_PI * jt / n_theta;
        cxd z = std::polar(r, theta);
        double wgt = weight(z);
        if (wgt == 0.0) continue;
        for (int j = 0; j < d; ++j) vals[j] = basis_value(s, chart, j, z);
        ring.noalias() += wgt * (vals * vals.adjoint()).conjugate();
      }
      total += ws[i] * half * (2.0 * M_PI / n_theta) * r * ring;
    }
  }
  return 2.0 * total;
}

}  // namespace detail

// Dense Gram of [u_b, u_a]-pairings against a caller-supplied positive or
// signed chart weight (already including e^{-p phi} and any density factor),
// in units of exp(log_scale).
inline Eigen::MatrixXcd dense_weighted_gram(
    const SectionSpace& s, const std::function<double(int, cxd)>& weight,
    double log_scale, double rel_tol, int theta0 = 64, int radial_panels0 = 8,
    int max_doublings = 5) {
  auto run = [&](int nt, int np) {
    Eigen::MatrixXcd g = detail::disk_gram_pass(
        s, 0, [&](cxd z) { return weight(0, z) * std::exp(-log_scale); }, nt,
        np);
    g += detail::disk_gram_pass(
        s, 1, [&](cxd z) { return weight(1, z) * std::exp(-log_scale); }, nt,
        np);
    return g;
  };
  // The basis contributes Fourier modes up to pk; the metric adds smooth,
  // rapidly decaying content.  Validate the angular rule once at coarse
  // radial resolution, then refine radially only.
  int nt = theta0 + 2 * (s.p * s.k + 2);
  {
    Eigen::MatrixXcd a = run(nt, radial_panels0);
    for (int it = 0; it < 3; ++it) {
      Eigen::MatrixXcd b = run(2 * nt, radial_panels0);
      double scale = std::max(b.norm(), 1e-300);
      if ((b - a).norm() <= 0.5 * rel_tol * scale) break;
      nt *= 2;
      a = b;
    }
  }
  int np = radial_panels0;
  Eigen::MatrixXcd prev = run(nt, np);
  for (int it = 0; it < max_doublings; ++it) {
    np *= 2;
    Eigen::MatrixXcd cur = run(nt, np);
    double scale = std::max(cur.norm(), 1e-300);
    if ((cur - prev).norm() <= rel_tol * scale) return cur;
    prev = cur;
  }
  throw QuadratureError("dense_weighted_gram: no convergence under doubling");
}

inline double dense_log_shift(const FiberMetric& m, int p) {
  double mx = -std::numeric_limits<double>::infinity();
  for (int chart = 0; chart < 2; ++chart)
    for (int ir = 1; ir <= 16; ++ir)
      for (int it = 0; it < 16; ++it) {
        cxd z = std::polar(ir / 16.0, 2.0 * M_PI * it / 16.0);
        mx = std::max(mx, -p * m.weight(chart, z));
      }
  return mx;
}

inline HermitianForm gram_e(const FiberMetric& m, int p,
                            const GramOptions& opt = {}) {
  SectionSpace s = SectionSpace::make(m.degree(), p, Twist::canonical);
  if (p * m.degree() > opt.max_pk_dense)
    throw std::invalid_argument("gram_e dense: pk exceeds configured cap");
  double shift = dense_log_shift(m, p);
  Eigen::MatrixXcd g = dense_weighted_gram(
      s,
      [&](int chart, cxd z) { return std::exp(-p * m.weight(chart, z)); },
      shift, opt.rel_tol);
  return HermitianForm::from_dense(s, g, shift);
}

inline HermitianForm gram_f(const FiberMetric& m, int p,
                            const GramOptions& opt = {}) {
  SectionSpace s = SectionSpace::make(m.degree(), p, Twist::none);
  if (p * m.degree() > opt.max_pk_dense)
    throw std::invalid_argument("gram_f dense: pk exceeds configured cap");
  double shift = dense_log_shift(m, p);
  Eigen::MatrixXcd g = dense_weighted_gram(
      s,
      [&](int chart, cxd z) {
        return std::exp(-p * m.weight(chart, z)) * m.density(chart, z);
      },
      shift, opt.rel_tol);
  return HermitianForm::from_dense(s, g, shift);
}

// ---------------------------------------------------------------------------
// Bergman densities

// log of the density rho with  int rho omega_n = dim:
//   E-type:  rho = sum |f~_j|^2 e^{-p phi} / g     (ratio of 2-forms)
//   F-type:  rho = sum |f~_j|^2 e^{-p phi}         (a function)
// over a G-orthonormal basis f~.  Toric log-diagonal fast path.
inline double bergman_log_density(const HermitianForm& g,
                                  const ToricPotential& m, double x) {
  const SectionSpace& s = g.space();
  const int p = s.p;
  double lse = -std::numeric_limits<double>::infinity();
  if (g.diagonal()) {
    for (int j = 0; j < s.dim; ++j)
      lse = log_add_exp(lse, j * x - g.log_diag()[j]);
  } else {
    // Solve L y = monomials in scaled units; stabilize by peeling the
    // largest monomial exponent.
    double mshift = std::max(0.0, (s.dim - 1) * x * 0.5);
    Eigen::VectorXcd v(s.dim);
    for (int j = 0; j < s.dim; ++j)
      v[j] = std::exp(0.5 * j * x - mshift);
    const auto& llt = g.llt();
    Eigen::VectorXcd y = llt.matrixL().solve(v);
    lse = std::log(y.squaredNorm()) + 2.0 * mshift - g.dense_log_scale();
  }
  double out = lse - p * m.value(x);
  if (s.twist == Twist::canonical) {
    double g_density = m.density_x(x);
    if (!(g_density > 0.0))
      throw std::domain_error("bergman_log_density: zero omega density");
    out -= std::log(g_density);
  }
  return out;
}

inline double bergman_density(const HermitianForm& g, const ToricPotential& m,
                              double x) {
  return std::exp(bergman_log_density(g, m, x));
}

// Raw kernel weight log B(z) = log sum |f~_j(z)|^2 in chart 0 (no e^{-p phi},
// no volume division); this is the object whose log is a metric weight on
// O(pk) (x) K.  Only meaningful for E-type spaces here.
inline double bergman_log_kernel(const HermitianForm& g, double x) {
  if (!g.diagonal())
    throw std::logic_error("bergman_log_kernel: diagonal forms only");
  double lse = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.dim(); ++j)
    lse = log_add_exp(lse, j * x - g.log_diag()[j]);
  return lse;
}

// Dense/chart version of the Bergman density (ratio against omega_n for the
// canonical twist, plain function otherwise).
inline double bergman_density(const HermitianForm& g, const FiberMetric& m,
                              int chart, cxd z) {
  const SectionSpace& s = g.space();
  Eigen::VectorXcd v(s.dim);
  for (int j = 0; j < s.dim; ++j) v[j] = detail::basis_value(s, chart, j, z);
  double total;
  if (g.diagonal()) {
    total = 0.0;
    for (int j = 0; j < s.dim; ++j)
      total += std::exp(2.0 * std::log(std::abs(v[j])) - g.log_diag()[j]);
  } else {
    const auto& llt = g.llt();
    Eigen::VectorXcd y = llt.matrixL().solve(v);
    total = y.squaredNorm() * std::exp(-g.dense_log_scale());
  }
  double out = total * std::exp(-s.p * m.weight(chart, z));
  if (s.twist == Twist::canonical) out /= m.density(chart, z);
  return out;
}

}  // namespace digeo
