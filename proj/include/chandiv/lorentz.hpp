#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>

#include "chandiv/channel.hpp"

namespace chandiv {

/// Parameters of the non-diagonal qubit form M(v,x,z).
struct MParams {
  double v = 0;
  double x = 0;
  double z = 0;
};

/// f(v,z) = sqrt(1 + v - z - vz), clipped at zero.
double m_form_f(double v, double z);

/// The raw 4x4 Pauli-basis matrix of M(v,x,z), no checks.
RMatrix m_form_matrix(const MParams& p);

/// Case region (1..4 for i..iv) containing p, or nullopt. Boundary equalities
/// use an absolute tolerance of 1e-12.
std::optional<int> m_case(const MParams& p);

/// M(v,x,z) as a channel representation. The map is CP but only trace
/// preserving for z = 0. Throws NotCompletelyPositive (with the failing Choi
/// eigenvalue) or InvalidArgument (naming the violated inequality) outside
/// the four case regions.
ChannelRep make_m_form(const MParams& p, const Tolerances& tol = {});

/// {M(v,1,z), diag(1,x,x,1)} with compose(first, second) = M(v,x,z).
std::pair<ChannelRep, ChannelRep> split_m_form(const MParams& p, const Tolerances& tol = {});

enum class FormKind { Diagonal, NonDiagonal, Indeterminate };
std::string_view to_string(FormKind k);

enum class Tri { No, Yes, Indeterminate };

struct LorentzNormalForm {
  FormKind kind = FormKind::Indeterminate;
  /// s0 * diag(M) for the diagonal kind: (s0, s1, s2, s3) with s0 >= |s1| >= |s2| >= |s3|.
  std::array<double, 4> diagonal_entries{};
  MParams params;  ///< NonDiagonal only
  RMatrix t1;      ///< Pauli-basis matrix of the right flank
  RMatrix t2;      ///< Pauli-basis matrix of the left flank
  std::optional<ChannelRep> normal_channel;
  double reconstruction_error = 0;  ///< ||t2 * M * t1 - PTM(e)||_F
  std::string diagnostics;
};

/// Lorentz normal form E = T2 M T1 of a qubit channel. Returns kind
/// Indeterminate when diagonalizability of G R^T G R cannot be decided at the
/// cluster tolerance. Throws NormalFormError when a frame cannot be built or
/// the reconstruction check fails.
LorentzNormalForm normal_form(const ChannelRep& e, const Tolerances& tol = {});

Tri is_diagonal_form(const ChannelRep& e, const Tolerances& tol = {});

/// Minkowski metric diag(1,-1,-1,-1) and Phi_T = diag(1,1,-1,1).
const RMatrix& lorentz_metric();
const RMatrix& phi_t();

}  // namespace chandiv
