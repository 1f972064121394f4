#pragma once

#include <cstdint>
#include <vector>

#include "chandiv/channel.hpp"

namespace chandiv {

/// Two-qubit register ordered ancilla (most significant) then system.
struct DilationStage {
  CMatrix unitary;  ///< 4x4
  bool reset_ancilla_after = true;
};

struct DilationCircuit {
  std::vector<DilationStage> stages;  ///< in application order, ancilla starts in |0>
};

/// Unitary V with tr_anc[V (|0><0| (x) rho) V^dag] = e[rho]. Throws RankTooLarge
/// for Kraus rank above two.
CMatrix dilate_rank2(const ChannelRep& e, const Tolerances& tol = {});

/// max over matrix units |i><j| of the Frobenius error between the dilated
/// action and e; infinity if v is not a 4x4 unitary.
double verify_dilation(const CMatrix& v, const ChannelRep& e);

/// One stage per factor. Factors are given in product order (the last one acts
/// first), matching compose_all.
DilationCircuit build_circuit(const std::vector<ChannelRep>& factors, const Tolerances& tol = {});

/// Channel realised by the circuit: reset is trace-out followed by fresh |0>.
ChannelRep simulate_exact(const DilationCircuit& c);

struct TomographyResult {
  CMatrix reconstructed_choi;
  RMatrix reconstructed_ptm;
  long long shots_per_setting = 0;  ///< 0 means exact probabilities
  std::uint64_t seed = 0;
};

/// Process tomography over preparations |0>,|1>,|+>,|+i> and X, Y, Z
/// measurements. shots = 0 uses exact probabilities; otherwise each setting
/// draws a binomial sample from a mt19937_64 seeded with seed.
TomographyResult simulate_tomography(const DilationCircuit& c, long long shots, std::uint64_t seed);

struct Fidelity {
  double value = 0;
  bool clipped = false;  ///< a negative eigenvalue beyond 1e-9 was set to zero
};

/// tr sqrt(sqrt(A) B sqrt(A)) / sqrt(tr A tr B); for qubit Choi matrices of
/// trace 2 this is the usual division by 2.
Fidelity choi_fidelity(const CMatrix& a, const CMatrix& b);

}  // namespace chandiv
