#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chandiv/linalg.hpp"

namespace chandiv {

/// Numerical thresholds shared by every module.
struct Tolerances {
  double eig_zero = 1e-9;  ///< Choi eigenvalues below this (relative to tr Choi for ranks) count as zero.
  double tp_tol = 1e-10;   ///< allowed trace-preservation mismatch
  double t_tol = 1e-10;    ///< bisection width on the time axis

  /// Throws InvalidArgument unless every field is strictly positive.
  void validate() const;
};

enum class Representation { Ptm, Choi, Kraus, Superop };

std::string_view to_string(Representation r);
Representation representation_from_string(std::string_view s);

/// A linear map on d x d operators.
///
/// Internally the map is held as its superoperator in the column-stacking
/// convention (S vec(X) = vec(E[X])); the representation it was built from is
/// remembered so that serialization can round-trip it. Conversions to every
/// other representation are exact up to floating point.
///
/// Conventions:
///  - PTM entries are tr(B_i E[B_j]) over operator_basis(d); for qubits this is
///    1/2 tr(sigma_i E[sigma_j]).
///  - Choi = sum_ij |i><j| (x) E[|i><j|] (input factor first), trace d for TP maps.
///
/// The class does not insist on complete positivity or trace preservation:
/// intermediate objects (Lorentz flanks, families e^{-tL}E beyond the
/// boundary) are legitimately neither. Use is_cp / tp_residual to check.
class ChannelRep {
 public:
  static ChannelRep from_superop(CMatrix superop);
  static ChannelRep from_ptm(const RMatrix& ptm);
  static ChannelRep from_choi(const CMatrix& choi);
  static ChannelRep from_kraus(const std::vector<CMatrix>& kraus);

  int dim() const noexcept { return dim_; }
  Representation representation() const noexcept { return rep_; }

  const CMatrix& superop() const noexcept { return superop_; }
  RMatrix ptm() const;
  /// PTM without dropping the imaginary part (non-Hermiticity-preserving maps).
  CMatrix ptm_complex() const;
  CMatrix choi() const;
  /// Canonical Kraus set: descending Choi eigenvalue, eigenvalues below
  /// tol.eig_zero * tr(Choi) dropped, largest-magnitude entry real positive.
  std::vector<CMatrix> kraus(const Tolerances& tol = {}) const;

  CMatrix apply(const CMatrix& rho) const;

  /// max_ij |tr E[|i><j|] - delta_ij|
  double tp_residual() const;

  /// Same map, relabelled as a different representation for serialization.
  ChannelRep as(Representation r) const;

 private:
  ChannelRep(int dim, Representation rep, CMatrix superop)
      : dim_(dim), rep_(rep), superop_(std::move(superop)) {}

  int dim_;
  Representation rep_;
  CMatrix superop_;
};

struct CpCheck {
  bool completely_positive;
  double min_eigenvalue;  ///< smallest Choi eigenvalue (witness)
};

CMatrix to_choi(const ChannelRep& c);

/// Completely positive iff min Choi eigenvalue >= -tol.eig_zero.
/// Throws InvalidArgument if the Choi matrix is not Hermitian (malformed input).
CpCheck is_cp(const ChannelRep& c, const Tolerances& tol = {});

bool is_tp(const ChannelRep& c, const Tolerances& tol = {});

/// Number of Choi eigenvalues above tol.eig_zero * tr(Choi).
/// Throws NotCompletelyPositive for non-CP input.
int kraus_rank(const ChannelRep& c, const Tolerances& tol = {});

/// a o b: b is applied first. PTM(result) = PTM(a) * PTM(b).
ChannelRep compose(const ChannelRep& a, const ChannelRep& b);

/// maps[0] o maps[1] o ... o maps[n-1]; the last entry is applied first.
/// An empty list is rejected since its dimension is unknown.
ChannelRep compose_all(const std::vector<ChannelRep>& maps);

/// Determinant of the superoperator (real for Hermiticity-preserving maps).
double determinant(const ChannelRep& c);

/// Throws NotCompletelyPositive / InvalidArgument when c is not a channel.
void require_channel(const ChannelRep& c, const Tolerances& tol, std::string_view what);

// Named constructors ---------------------------------------------------------

ChannelRep identity_channel(int d);
/// X -> U X U^dagger
ChannelRep unitary_channel(const CMatrix& u);
/// N[X] = tr(X) 1/d
ChannelRep completely_depolarizing(int d);
/// D_q = q I + (1 - q) N
ChannelRep depolarizing(int d, double q);
/// E_NOT(rho) = (1 + rho^perp)/3, PTM diag(1, -1/3, -1/3, -1/3)
ChannelRep universal_not();
/// Qubit Pauli channel with PTM diag(1, eta1, eta2, eta3).
ChannelRep pauli_channel(double eta1, double eta2, double eta3);
/// diag(1, 1, l, l)
ChannelRep bit_flip(double lambda);
/// diag(1, l, 1, l)
ChannelRep bit_phase_flip(double lambda);
/// diag(1, l, l, 1)
ChannelRep phase_flip(double lambda);

/// Dispatch by name: "identity" {d}, "depolarizing_full" {d}, "depolarizing"
/// {d, q}, "not", "pauli" {eta1, eta2, eta3}, "bit_flip" / "phase_flip" /
/// "bit_phase_flip" {lambda}. The result is checked to be CPTP; a violation is
/// reported through NotCompletelyPositive carrying the Choi eigenvalue.
ChannelRep make_named(std::string_view name, const std::map<std::string, double>& params = {});

}  // namespace chandiv
