#pragma once

// Section spaces of O(pk) (+ optional canonical twist) over P^1 and the
// positive-definite Gram matrices of Hilbert norms on them.  Toric metrics
// produce exactly diagonal Gram matrices, stored as log-diagonals so levels
// up to p ~ 200 stay representable; general metrics use dense storage with a
// common log scale factor.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace digeo {

enum class Twist { canonical, none };

// H^0(O(pk) (x) K)  has the monomial basis z^j dz, j = 0..pk-2 (dim pk-1);
// H^0(O(pk))        has the monomial basis z^j,    j = 0..pk   (dim pk+1).
struct SectionSpace {
  int k = 1;
  int p = 1;
  Twist twist = Twist::canonical;
  int dim = 0;

  static SectionSpace make(int k, int p, Twist twist) {
    if (k < 1 || p < 1) throw std::invalid_argument("SectionSpace: k,p >= 1");
    int pk = p * k;
    if (twist == Twist::canonical && pk < 2)
      throw std::invalid_argument(
          "SectionSpace: canonical twist needs pk >= 2 (space is empty)");
    SectionSpace s;
    s.k = k;
    s.p = p;
    s.twist = twist;
    s.dim = twist == Twist::canonical ? pk - 1 : pk + 1;
    return s;
  }

  bool operator==(const SectionSpace& o) const {
    return k == o.k && p == o.p && twist == o.twist;
  }
};

class HermitianForm {
 public:
  HermitianForm() = default;

  static HermitianForm from_log_diagonal(SectionSpace space,
                                         Eigen::VectorXd log_diag) {
    if (log_diag.size() != space.dim)
      throw std::invalid_argument("HermitianForm: log diagonal size");
    HermitianForm h;
    h.space_ = space;
    h.log_diag_ = std::move(log_diag);
    h.diagonal_ = true;
    return h;
  }

  // Dense storage: actual Gram is exp(log_scale) * mat.  The assembly is
  // symmetrized so Hermiticity is exact.
  static HermitianForm from_dense(SectionSpace space, Eigen::MatrixXcd mat,
                                  double log_scale = 0.0) {
    if (mat.rows() != space.dim || mat.cols() != space.dim)
      throw std::invalid_argument("HermitianForm: matrix size");
    HermitianForm h;
    h.space_ = space;
    h.mat_ = 0.5 * (mat + mat.adjoint());
    h.log_scale_ = log_scale;
    h.diagonal_ = false;
    return h;
  }

  const SectionSpace& space() const { return space_; }
  int dim() const { return space_.dim; }
  bool diagonal() const { return diagonal_; }
  double log_scale() const { return log_scale_; }

  const Eigen::VectorXd& log_diag() const {
    if (!diagonal_) throw std::logic_error("HermitianForm: not diagonal");
    return log_diag_;
  }

  // Dense matrix in units of exp(log_scale()); diagonal forms are promoted
  // with log_scale = max log entry.
  Eigen::MatrixXcd dense_matrix() const {
    if (!diagonal_) return mat_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
    double s = log_diag_.maxCoeff();
    for (int j = 0; j < dim(); ++j) m(j, j) = std::exp(log_diag_[j] - s);
    return m;
  }
  double dense_log_scale() const {
    return diagonal_ ? log_diag_.maxCoeff() : log_scale_;
  }

  double log_det() const {
    if (diagonal_) return log_diag_.sum();
    const auto& L = llt().matrixLLT();
    double s = 0.0;
    for (int j = 0; j < dim(); ++j) s += std::log(L(j, j).real());
    return 2.0 * s + dim() * log_scale_;
  }

  // Smallest eigenvalue in units of exp(dense_log_scale()).
  double min_eigenvalue_scaled() const {
    if (diagonal_) return std::exp(log_diag_.minCoeff() - log_diag_.maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat_,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  bool positive_definite() const {
    if (diagonal_) return true;
    return llt_ok();
  }

  // Cholesky factor of the scaled dense matrix; throws if not PD.
  const Eigen::LLT<Eigen::MatrixXcd>& llt() const {
    if (diagonal_) throw std::logic_error("HermitianForm::llt: diagonal form");
    if (!llt_) {
      llt_.emplace(mat_);
      if (llt_->info() != Eigen::Success)
        throw std::domain_error("HermitianForm: not positive definite");
    }
    return *llt_;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["k"] = space_.k;
    j["p"] = space_.p;
    j["twist"] = space_.twist == Twist::canonical ? "canonical" : "none";
    j["dim"] = space_.dim;
    if (diagonal_) {
      j["storage"] = "log_diagonal";
      j["log_diag"] = std::vector<double>(log_diag_.data(),
                                          log_diag_.data() + log_diag_.size());
    } else {
      j["storage"] = "dense";
      j["log_scale"] = log_scale_;
      std::vector<std::vector<double>> rows;
      for (int a = 0; a < dim(); ++a) {
        std::vector<double> row;
        for (int b = 0; b < dim(); ++b) {
          row.push_back(mat_(a, b).real());
          row.push_back(mat_(a, b).imag());
        }
        rows.push_back(std::move(row));
      }
      j["entries"] = rows;
    }
    return j;
  }

  static HermitianForm from_json(const nlohmann::json& j) {
    SectionSpace space = SectionSpace::make(
        j.at("k").get<int>(), j.at("p").get<int>(),
        j.at("twist").get<std::string>() == "canonical" ? Twist::canonical
                                                        : Twist::none);
    if (j.at("storage") == "log_diagonal") {
      auto v = j.at("log_diag").get<std::vector<double>>();
      Eigen::VectorXd d =
          Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
      return from_log_diagonal(space, d);
    }
    auto rows = j.at("entries").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXcd m(space.dim, space.dim);
    for (int a = 0; a < space.dim; ++a)
      for (int b = 0; b < space.dim; ++b)
        m(a, b) = {rows[a][2 * b], rows[a][2 * b + 1]};
    return from_dense(space, m, j.at("log_scale").get<double>());
  }

 private:
  bool llt_ok() const {
    try {
      llt();
      return true;
    } catch (const std::domain_error&) {
      return false;
    }
  }

  SectionSpace space_;
  bool diagonal_ = true;
  Eigen::VectorXd log_diag_;
  Eigen::MatrixXcd mat_;
  double log_scale_ = 0.0;
  mutable std::optional<Eigen::LLT<Eigen::MatrixXcd>> llt_;
};

// ---------------------------------------------------------------------------
// Simultaneous diagonalization of a positive-definite pair.

struct GenEigenOptions {
  double log_spread_warn = 560.0;
  double log_spread_fail = 700.0;  // dense path only; log-diag path is exact
};

struct GenEigenResult {
  Eigen::VectorXd lambda;    // descending
  Eigen::MatrixXcd basis;    // columns: G0-orthonormal, G1-diagonalizing
  double log_spread = 0.0;   // max 2*lambda - min 2*lambda
  std::vector<std::string> warnings;
};

// Returns a basis (w_j) with <w_j, w_k>_{G0} = delta_{jk} and
// <w_j, w_k>_{G1} = delta_{jk} e^{2 lambda_j}.
inline GenEigenResult gen_eigen(const HermitianForm& g0,
                                const HermitianForm& g1,
                                const GenEigenOptions& opt = {}) {
  if (!(g0.space() == g1.space()))
    throw std::invalid_argument("gen_eigen: mismatched section spaces");
  const int d = g0.dim();
  GenEigenResult out;

  if (g0.diagonal() && g1.diagonal()) {
    Eigen::VectorXd lam = 0.5 * (g1.log_diag() - g0.log_diag());
    std::vector<int> idx(d);
    for (int j = 0; j < d; ++j) idx[j] = j;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (lam[a] != lam[b]) return lam[a] > lam[b];
      return a < b;  // deterministic tie break: lexicographic basis order
    });
    out.lambda.resize(d);
    out.basis = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      out.lambda[j] = lam[idx[j]];
      out.basis(idx[j], j) = std::exp(-0.5 * g0.log_diag()[idx[j]]);
    }
    out.log_spread = 2.0 * (out.lambda[0] - out.lambda[d - 1]);
    return out;
  }

  // Dense (or mixed) path: Cholesky reduction + Hermitian eigensolve.
  Eigen::MatrixXcd m0 = g0.dense_matrix(), m1 = g1.dense_matrix();
  double s0 = g0.dense_log_scale(), s1 = g1.dense_log_scale();
  Eigen::LLT<Eigen::MatrixXcd> llt(m0);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("gen_eigen: G0 not positive definite");
  Eigen::MatrixXcd L = llt.matrixL();
  Eigen::MatrixXcd c = L.triangularView<Eigen::Lower>().solve(m1);
  c = L.triangularView<Eigen::Lower>().solve(c.adjoint().eval()).adjoint();
  c = 0.5 * (c + c.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gen_eigen: eigensolver failed");
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0)
    throw std::domain_error("gen_eigen: G1 not positive definite");

  Eigen::MatrixXcd w =
      L.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors());
  // lambda includes the scale offset between the two stored matrices.
  Eigen::VectorXd lam(d);
  for (int j = 0; j < d; ++j)
    lam[j] = 0.5 * (std::log(ev[j]) + s1 - s0);
  // G0-orthonormal in actual units: rescale by exp(-s0/2).
  w *= std::exp(-0.5 * s0);

  std::vector<int> idx(d);
  for (int j = 0; j < d; ++j) idx[j] = j;
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (lam[a] != lam[b]) return lam[a] > lam[b];
    for (int r = 0; r < d; ++r) {
      auto va = w(r, a), vb = w(r, b);
      if (va.real() != vb.real()) return va.real() < vb.real();
      if (va.imag() != vb.imag()) return va.imag() < vb.imag();
    }
    return false;
  });
  out.lambda.resize(d);
  out.basis.resize(d, d);
  for (int j = 0; j < d; ++j) {
    out.lambda[j] = lam[idx[j]];
    out.basis.col(j) = w.col(idx[j]);
  }
  out.log_spread = 2.0 * (out.lambda[0] - out.lambda[d - 1]);
  if (out.log_spread > opt.log_spread_fail)
    throw std::domain_error(
        "gen_eigen: log spread " + std::to_string(out.log_spread) +
        " exceeds dense-arithmetic cap " + std::to_string(opt.log_spread_fail));
  if (out.log_spread > opt.log_spread_warn)
    out.warnings.push_back("gen_eigen: log spread " +
                           std::to_string(out.log_spread) +
                           " near conditioning cap");
  return out;
}

}  // namespace digeo
