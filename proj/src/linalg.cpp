#include "chandiv/linalg.hpp"

#include <array>
#include <cmath>
#include <mutex>

#include "chandiv/errors.hpp"

namespace chandiv {

namespace {

std::vector<CMatrix> build_basis(int d) {
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(d * d));
  basis.push_back(CMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  const double r2 = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      CMatrix sym = CMatrix::Zero(d, d);
      sym(j, k) = r2;
      sym(k, j) = r2;
      basis.push_back(sym);
      CMatrix asym = CMatrix::Zero(d, d);
      asym(j, k) = -i * r2;
      asym(k, j) = i * r2;
      basis.push_back(asym);
    }
  }
  for (int l = 1; l < d; ++l) {
    CMatrix diag = CMatrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (int m = 0; m < l; ++m) diag(m, m) = norm;
    diag(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(diag);
  }
  return basis;
}

struct BasisCache {
  std::once_flag once[kMaxDim + 1];
  std::vector<CMatrix> elements[kMaxDim + 1];
  CMatrix change[kMaxDim + 1];
};

BasisCache& cache() {
  static BasisCache c;
  return c;
}

void check_dim(int d) {
  if (d < 1 || d > kMaxDim)
    throw DimensionError("dimension " + std::to_string(d) + " outside [1, 16]");
}

void fill(int d) {
  auto& c = cache();
  std::call_once(c.once[d], [&] {
    c.elements[d] = build_basis(d);
    c.change[d].resize(d * d, d * d);
    for (int k = 0; k < d * d; ++k) c.change[d].col(k) = vec(c.elements[d][static_cast<std::size_t>(k)]);
  });
}

}  // namespace

const std::vector<CMatrix>& operator_basis(int d) {
  check_dim(d);
  fill(d);
  return cache().elements[d];
}

const CMatrix& basis_change(int d) {
  check_dim(d);
  fill(d);
  return cache().change[d];
}

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, int d) {
  if (v.size() != d * d) throw DimensionError("unvec: length is not d^2");
  return Eigen::Map<const CMatrix>(v.data(), d, d);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_residual(const CMatrix& m) { return (m - m.adjoint()).norm(); }

RVector hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_hermitian_eigenvalue(const CMatrix& m) { return hermitian_eigenvalues(m).minCoeff(); }

CMatrix psd_sqrt(const CMatrix& m, double tol, bool* clipped) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  RVector ev = es.eigenvalues();
  bool any = false;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < -tol) any = true;
    ev(k) = std::sqrt(std::max(ev(k), 0.0));
  }
  if (clipped) *clipped = any;
  const CMatrix& v = es.eigenvectors();
  return v * ev.cast<cplx>().asDiagonal() * v.adjoint();
}

CMatrix partial_trace_first(const CMatrix& rho, int da, int db) {
  if (rho.rows() != da * db || rho.cols() != da * db)
    throw DimensionError("partial_trace_first: shape mismatch");
  CMatrix out = CMatrix::Zero(db, db);
  for (int a = 0; a < da; ++a) out += rho.block(a * db, a * db, db, db);
  return out;
}

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

}  // namespace chandiv
