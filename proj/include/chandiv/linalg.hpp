#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace chandiv {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr int kMaxDim = 16;

/// Orthonormal Hermitian operator basis of B(H_d) under the Hilbert-Schmidt
/// product. Element 0 is 1/sqrt(d); then for every pair j<k the symmetric and
/// antisymmetric generalized Gell-Mann matrices; then the diagonal ones. For
/// d = 2 this is {1, X, Y, Z}/sqrt(2).
const std::vector<CMatrix>& operator_basis(int d);

/// Unitary d^2 x d^2 matrix whose column k is vec(operator_basis(d)[k]).
const CMatrix& basis_change(int d);

/// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, int d);

CMatrix kron(const CMatrix& a, const CMatrix& b);

CMatrix hermitian_part(const CMatrix& m);

/// ||m - m^dagger||_F
double hermiticity_residual(const CMatrix& m);

/// Eigenvalues (ascending) of the Hermitian part of m.
RVector hermitian_eigenvalues(const CMatrix& m);

double min_hermitian_eigenvalue(const CMatrix& m);

/// Square root of a Hermitian PSD matrix. Negative eigenvalues are clipped to
/// zero; `clipped` (if given) reports whether any eigenvalue below -tol was seen.
CMatrix psd_sqrt(const CMatrix& m, double tol = 1e-12, bool* clipped = nullptr);

/// tr_A of a state on A (x) B with dims (da, db); A is the more significant factor.
CMatrix partial_trace_first(const CMatrix& rho, int da, int db);

bool is_unitary(const CMatrix& u, double tol);

}  // namespace chandiv
