#include "chandiv/lindblad.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "chandiv/errors.hpp"

namespace chandiv {

namespace {

// Coefficients of a traceless operator in the traceless part of the basis.
CVector traceless_coefficients(const CMatrix& op) {
  const int d = static_cast<int>(op.rows());
  const auto& basis = operator_basis(d);
  CVector c(d * d - 1);
  for (int a = 1; a < d * d; ++a) c(a - 1) = (basis[static_cast<std::size_t>(a)].adjoint() * op).trace();
  return c;
}

}  // namespace

LindbladGenerator::LindbladGenerator(CMatrix hamiltonian, CMatrix kossakowski, const Tolerances& tol)
    : dim_(static_cast<int>(hamiltonian.rows())),
      hamiltonian_(std::move(hamiltonian)),
      kossakowski_(std::move(kossakowski)) {
  if (hamiltonian_.rows() != hamiltonian_.cols() || dim_ < 1 || dim_ > kMaxDim)
    throw DimensionError("generator: Hamiltonian must be d x d with d in [1, 16]");
  const int n = dim_ * dim_ - 1;
  if (kossakowski_.rows() != n || kossakowski_.cols() != n)
    throw DimensionError("generator: Kossakowski matrix must be (d^2-1) x (d^2-1)");
  if (hermiticity_residual(hamiltonian_) > 1e-12 * std::max(1.0, hamiltonian_.norm()))
    throw InvalidArgument("generator: Hamiltonian is not Hermitian");
  if (n > 0) {
    if (hermiticity_residual(kossakowski_) > 1e-12 * std::max(1.0, kossakowski_.norm()))
      throw InvalidArgument("generator: Kossakowski matrix is not Hermitian");
    const double m = min_hermitian_eigenvalue(kossakowski_);
    if (m < -tol.eig_zero)
      throw NotCompletelyPositive("generator: Kossakowski matrix is not positive semidefinite", m);
  }
}

LindbladGenerator LindbladGenerator::scaled(double s) const {
  if (s < 0) throw InvalidArgument("generator: negative scale breaks G >= 0");
  return LindbladGenerator(s * hamiltonian_, s * kossakowski_);
}

bool LindbladGenerator::has_dissipation(double tol) const {
  return kossakowski_.size() > 0 && kossakowski_.cwiseAbs().maxCoeff() > tol;
}

LindbladGenerator generator_from_jumps(const CMatrix& hamiltonian, const std::vector<CMatrix>& jumps) {
  const int d = static_cast<int>(hamiltonian.rows());
  const int n = d * d - 1;
  CMatrix h = hamiltonian;
  CMatrix g = CMatrix::Zero(n, n);
  const CMatrix id = CMatrix::Identity(d, d);
  const cplx i(0.0, 1.0);
  for (const auto& j : jumps) {
    if (j.rows() != d || j.cols() != d) throw DimensionError("jump operator has wrong shape");
    const cplx c = j.trace() / static_cast<double>(d);
    const CMatrix a = j - c * id;
    const CVector coeff = traceless_coefficients(a);
    g += coeff * coeff.adjoint();
    h += 0.5 * i * (std::conj(c) * a - c * a.adjoint());
  }
  return LindbladGenerator(hermitian_part(h), hermitian_part(g));
}

CMatrix generator_superop(const LindbladGenerator& g) {
  const int d = g.dim();
  const CMatrix id = CMatrix::Identity(d, d);
  const cplx i(0.0, 1.0);
  const CMatrix& h = g.hamiltonian();
  CMatrix s = -i * (kron(id, h) - kron(h.transpose(), id));
  if (d == 1 || !g.has_dissipation(0.0)) return s;

  // G = sum_k w_k c_k c_k^dag turns the double sum into jump operators.
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(g.kossakowski()));
  const auto& basis = operator_basis(d);
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double w = es.eigenvalues()(k);
    if (w <= 0.0) continue;
    CMatrix j = CMatrix::Zero(d, d);
    for (int a = 1; a < d * d; ++a) j += es.eigenvectors()(a - 1, k) * basis[static_cast<std::size_t>(a)];
    j *= std::sqrt(w);
    const CMatrix jdj = j.adjoint() * j;
    s += kron(j.conjugate(), j) - 0.5 * kron(id, jdj) - 0.5 * kron(jdj.transpose(), id);
  }
  return s;
}

ChannelRep exp_generator(const LindbladGenerator& g, double t) {
  if (!(t >= 0)) throw InvalidArgument("exp_generator: t must be nonnegative");
  const CMatrix l = generator_superop(g);
  return ChannelRep::from_superop((t * l).exp());
}

CMatrix exp_generator_inverse(const LindbladGenerator& g, double t) {
  if (!(t >= 0)) throw InvalidArgument("exp_generator_inverse: t must be nonnegative");
  const CMatrix l = generator_superop(g);
  return (-t * l).exp();
}

LindbladGenerator make_psi_generator(const CVector& psi, double mu) {
  if (!(mu > 0)) throw InvalidArgument("psi generator: mu must be positive");
  if (std::abs(psi.norm() - 1.0) > 1e-12) throw InvalidArgument("psi generator: psi is not normalized");
  const int d = static_cast<int>(psi.size());
  // Jumps sqrt(mu) |psi><k| over an orthonormal basis give mu(|psi><psi| tr D - D).
  std::vector<CMatrix> jumps;
  for (int k = 0; k < d; ++k) {
    CVector ek = CVector::Zero(d);
    ek(k) = 1.0;
    jumps.push_back(std::sqrt(mu) * psi * ek.adjoint());
  }
  return generator_from_jumps(CMatrix::Zero(d, d), jumps);
}

LindbladGenerator make_amplitude_damping_generator(const std::vector<double>& gammas, const CMatrix& basis) {
  const int d = static_cast<int>(basis.rows());
  if (basis.cols() != d) throw DimensionError("amplitude damping: basis must be d x d");
  if (static_cast<int>(gammas.size()) != d - 1) throw DimensionError("amplitude damping: need d-1 rates");
  if (!is_unitary(basis, 1e-10)) throw InvalidArgument("amplitude damping: basis is not orthonormal");
  std::vector<CMatrix> jumps;
  for (int k = 1; k < d; ++k) {
    const double gamma = gammas[static_cast<std::size_t>(k - 1)];
    if (!(gamma > 0)) throw InvalidArgument("amplitude damping: rates must be positive");
    jumps.push_back(std::sqrt(gamma) * basis.col(0) * basis.col(k).adjoint());
  }
  return generator_from_jumps(CMatrix::Zero(d, d), jumps);
}

LindbladGenerator make_depolarizing_generator(int d, double mu) {
  if (!(mu > 0)) throw InvalidArgument("depolarizing generator: mu must be positive");
  const int n = d * d - 1;
  return LindbladGenerator(CMatrix::Zero(d, d), (mu / d) * CMatrix::Identity(n, n));
}

LindbladGenerator make_pauli_generator(double gx, double gy, double gz) {
  if (gx < 0 || gy < 0 || gz < 0) throw InvalidArgument("Pauli generator: rates must be nonnegative");
  // F_a = sigma_a / sqrt(2), so jump sqrt(g) sigma_a is G_aa = 2 g.
  CMatrix g = CMatrix::Zero(3, 3);
  g(0, 0) = 2 * gx;
  g(1, 1) = 2 * gy;
  g(2, 2) = 2 * gz;
  return LindbladGenerator(CMatrix::Zero(2, 2), g);
}

}  // namespace chandiv
