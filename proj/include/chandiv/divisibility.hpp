#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "chandiv/channel.hpp"
#include "chandiv/lbdecomp.hpp"
#include "chandiv/lorentz.hpp"

namespace chandiv {

enum class ClassLabel { Indivisible, DivisibleNonInfinitesimal, InfinitesimallyDivisible, Unitary, Indeterminate };
std::string_view to_string(ClassLabel c);

struct PauliInfdiv {
  bool infinitesimally_divisible = false;
  bool singular = false;                ///< matched the (0,0,lambda) family
  std::array<double, 3> normalized{};   ///< etas after Pauli conjugation, at most one negative
  std::array<int, 3> signs{1, 1, 1};    ///< normalized[i] = signs[i] * eta[i]
  std::array<double, 3> conditions{};   ///< eta_i / (eta_j eta_k); inf when the denominator vanishes
};

/// Infinitesimal-divisibility test for the Pauli channel diag(1, eta1, eta2, eta3).
/// Throws NotCompletelyPositive if the tuple is not a channel.
PauliInfdiv check_pauli_infdiv(const std::array<double, 3>& eta);

struct DivisibilityReport {
  ClassLabel label = ClassLabel::Indeterminate;
  std::optional<LorentzNormalForm> normal_form;
  int kraus_rank = 0;
  std::optional<PauliInfdiv> eta_test;
  std::optional<LBDecomposition> lb_witness;          ///< DivisibleNonInfinitesimal
  std::optional<ClassLabel> boundary_label;          ///< class of lb_witness->boundary
  std::vector<ChannelRep> factors;                    ///< rank <= 2 factorization, product order
  bool markovian_candidate = false;
  std::string note;
};

DivisibilityReport classify(const ChannelRep& e, const Tolerances& tol = {});

/// Factors an infinitesimally divisible qubit channel into CPTP maps of Kraus
/// rank <= 2, returned in product order (compose_all gives back e). Throws
/// NotInfinitesimallyDivisible otherwise.
std::vector<ChannelRep> factor_rank2(const ChannelRep& e, const Tolerances& tol = {});

struct NDivisibility {
  int n = 1;
  bool divisible = false;
  bool determined = true;
  std::vector<ChannelRep> witness;  ///< n factors in product order when divisible
  std::string reason;
};

NDivisibility n_divisibility_status(const ChannelRep& e, int n, const Tolerances& tol = {});

}  // namespace chandiv
