#pragma once

#include <vector>

#include "chandiv/channel.hpp"

namespace chandiv {

/// GKSL generator L[rho] = -i[H, rho] + sum_ab G_ab (F_a rho F_b^dag - 1/2 {F_b^dag F_a, rho})
/// with {F_a} the traceless part of operator_basis(d) (indices 1 .. d^2-1);
/// the Kossakowski matrix G is stored over those d^2-1 elements.
class LindbladGenerator {
 public:
  /// Validates H Hermitian (1e-12) and G Hermitian PSD (eig_zero).
  LindbladGenerator(CMatrix hamiltonian, CMatrix kossakowski, const Tolerances& tol = {});

  int dim() const noexcept { return dim_; }
  const CMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  const CMatrix& kossakowski() const noexcept { return kossakowski_; }

  /// s L
  LindbladGenerator scaled(double s) const;

  /// True when G = 0 (pure Hamiltonian or zero generator).
  bool has_dissipation(double tol = 1e-14) const;

 private:
  int dim_;
  CMatrix hamiltonian_;
  CMatrix kossakowski_;
};

/// Builds a generator from arbitrary jump operators J_k (sum_k D_{J_k}). Trace
/// parts c_k 1 of each J_k are split off and turned into the equivalent
/// Hamiltonian correction i (c_k^* A_k - c_k A_k^dag) / 2.
LindbladGenerator generator_from_jumps(const CMatrix& hamiltonian, const std::vector<CMatrix>& jumps);

/// Matrix of L acting on vec(rho) (column stacking).
CMatrix generator_superop(const LindbladGenerator& g);

/// e^{tL} as a channel. Throws InvalidArgument for t < 0.
ChannelRep exp_generator(const LindbladGenerator& g, double t);

/// e^{-tL}; the inverse of exp_generator(g, t). Not CP in general.
CMatrix exp_generator_inverse(const LindbladGenerator& g, double t);

/// L_psi[D] = mu (|psi><psi| tr D - D).
LindbladGenerator make_psi_generator(const CVector& psi, double mu);

/// Decay of |1> .. |d-1> into |0> with rates gammas, F_i = |b_0><b_i| where
/// b_i are the columns of `basis` (must be orthonormal).
LindbladGenerator make_amplitude_damping_generator(const std::vector<double>& gammas, const CMatrix& basis);

/// Isotropic depolarizing generator L[D] = mu (tr D 1/d - D), i.e. G = mu/d 1.
LindbladGenerator make_depolarizing_generator(int d, double mu);

/// Qubit Pauli generator with jumps sqrt(g_i) sigma_i. The bit-flip generator
/// is (g, 0, 0): e^{tL} = diag(1, 1, e^{-2gt}, e^{-2gt}).
LindbladGenerator make_pauli_generator(double gx, double gy, double gz);

}  // namespace chandiv
