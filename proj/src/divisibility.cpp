#include "chandiv/divisibility.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "chandiv/errors.hpp"

namespace chandiv {

namespace {

constexpr double kZero = 1e-12;

std::array<double, 4> pauli_probabilities(const std::array<double, 3>& e) {
  return {(1 + e[0] + e[1] + e[2]) / 4, (1 + e[0] - e[1] - e[2]) / 4, (1 - e[0] + e[1] - e[2]) / 4,
          (1 - e[0] - e[1] + e[2]) / 4};
}

ChannelRep pauli(const std::array<double, 3>& e) { return pauli_channel(e[0], e[1], e[2]); }

CMatrix herm_power(const CMatrix& o, double power) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(o));
  const RVector ev = es.eigenvalues().array().pow(power);
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Rescales a chain of CP maps with a TP product into a chain of CPTP maps
/// with the same product and the same Kraus ranks.
std::vector<ChannelRep> normalize_chain(const std::vector<ChannelRep>& chain) {
  const int d = chain.front().dim();
  const CVector id = vec(CMatrix::Identity(d, d));
  CMatrix prefix = CMatrix::Identity(d * d, d * d);
  CMatrix prev_s = prefix;
  std::vector<ChannelRep> out;
  for (std::size_t j = 0; j < chain.size(); ++j) {
    prefix = prefix * chain[j].superop();
    CMatrix s_inv = CMatrix::Identity(d * d, d * d);
    CMatrix s = s_inv;
    if (j + 1 < chain.size()) {
      const CMatrix o = hermitian_part(unvec(prefix.adjoint() * id, d));
      const double m = min_hermitian_eigenvalue(o);
      if (!(m > 1e-12)) throw Error("factor_rank2: intermediate effect operator is singular");
      const CMatrix h = herm_power(o, 0.5), hi = herm_power(o, -0.5);
      s = kron(h.transpose(), h);
      s_inv = kron(hi.transpose(), hi);
    }
    out.push_back(ChannelRep::from_superop(prev_s * chain[j].superop() * s_inv));
    prev_s = s;
  }
  return out;
}

}  // namespace

std::string_view to_string(ClassLabel c) {
  switch (c) {
    case ClassLabel::Indivisible:
      return "Indivisible";
    case ClassLabel::DivisibleNonInfinitesimal:
      return "DivisibleNonInfinitesimal";
    case ClassLabel::InfinitesimallyDivisible:
      return "InfinitesimallyDivisible";
    case ClassLabel::Unitary:
      return "Unitary";
    case ClassLabel::Indeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

PauliInfdiv check_pauli_infdiv(const std::array<double, 3>& eta) {
  const auto p = pauli_probabilities(eta);
  for (double pk : p)
    if (pk < -kZero) throw NotCompletelyPositive("check_pauli_infdiv: eta tuple is not a Pauli channel", pk);

  PauliInfdiv r;
  int negatives = 0, zero_at = -1, smallest = 0;
  for (int i = 0; i < 3; ++i) {
    if (eta[i] < -kZero) ++negatives;
    if (std::abs(eta[i]) <= kZero && zero_at < 0) zero_at = i;
    if (std::abs(eta[i]) < std::abs(eta[smallest])) smallest = i;
  }
  // Conjugation by a Pauli flips the signs of two entries.
  int keep_negative = -1;
  if (negatives % 2 == 1 && zero_at < 0) keep_negative = smallest;
  for (int i = 0; i < 3; ++i) {
    const double mag = std::abs(eta[i]);
    r.normalized[i] = (i == keep_negative) ? -mag : mag;
    r.signs[i] = (r.normalized[i] * eta[i] < 0) ? -1 : 1;
  }
  int flips = 0;
  for (int s : r.signs) flips += (s < 0);
  if (flips % 2 == 1) {
    // only possible through a zero entry absorbing the sign
    r.signs[zero_at < 0 ? 0 : zero_at] *= -1;
  }

  const auto& n = r.normalized;
  bool positive = true, conditions = true;
  int zeros = 0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double den = n[j] * n[k];
    r.conditions[i] = den == 0 ? std::numeric_limits<double>::infinity() : n[i] / den;
    if (n[i] <= kZero) positive = false;
    if (std::abs(n[i]) <= kZero) ++zeros;
    if (n[i] < den - kZero) conditions = false;
  }
  if (positive && conditions) r.infinitesimally_divisible = true;
  if (zeros >= 2) {
    r.singular = true;
    r.infinitesimally_divisible = true;
  }
  return r;
}

std::vector<ChannelRep> factor_rank2(const ChannelRep& e, const Tolerances& tol) {
  if (e.dim() != 2) throw DimensionError("factor_rank2: qubit channels only");
  require_channel(e, tol, "factor_rank2");
  const int rank = kraus_rank(e, tol);
  if (rank <= 2) return {e};

  // Pauli input is used as is: degenerate etas leave the normal-form frames arbitrary.
  const RMatrix ptm = e.ptm();
  const bool pauli_input = (ptm - RMatrix(ptm.diagonal().asDiagonal())).norm() < 1e-12;
  LorentzNormalForm nf;
  if (pauli_input) {
    nf.kind = FormKind::Diagonal;
    nf.t1 = nf.t2 = RMatrix::Identity(4, 4);
    nf.normal_channel = e;
  } else {
    nf = normal_form(e, tol);
  }
  if (nf.kind == FormKind::Indeterminate)
    throw NormalFormError("factor_rank2: normal form is indeterminate; " + nf.diagnostics);

  const char* refusal =
      "factor_rank2: channel is not infinitesimally divisible; any factorization contains a factor of Kraus rank "
      "at least 3";
  std::vector<ChannelRep> core;
  if (nf.kind == FormKind::NonDiagonal) {
    auto [first, second] = split_m_form(nf.params, tol);
    core = {first, second};
  } else {
    if (rank == 3) throw NotInfinitesimallyDivisible(refusal);
    const RMatrix m = nf.normal_channel->ptm();
    const auto test = check_pauli_infdiv({m(1, 1), m(2, 2), m(3, 3)});
    if (!test.infinitesimally_divisible) throw NotInfinitesimallyDivisible(refusal);
    const auto& n = test.normalized;
    const ChannelRep flip = pauli({double(test.signs[0]), double(test.signs[1]), double(test.signs[2])});
    if (test.singular) {
      int k = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(n[i]) > std::abs(n[k])) k = i;
      const int j = (k == 0) ? 1 : 0;
      const double lam = n[k];
      std::array<double, 3> a{lam, lam, lam}, b{0, 0, 0};
      a[j] = 1.0;
      b[k] = 1.0;
      core = {compose(flip, pauli(a)), pauli(b)};
    } else {
      std::array<double, 3> lam{};
      for (int i = 0; i < 3; ++i) lam[i] = std::sqrt(n[(i + 1) % 3] * n[(i + 2) % 3] / n[i]);
      core = {compose(flip, bit_flip(lam[0])), bit_phase_flip(lam[1]), phase_flip(lam[2])};
    }
  }

  core.front() = compose(ChannelRep::from_ptm(nf.t2), core.front());
  core.back() = compose(core.back(), ChannelRep::from_ptm(nf.t1));
  std::vector<ChannelRep> out = normalize_chain(core);

  for (const auto& f : out) {
    if (kraus_rank(f, tol) > 2) throw Error("factor_rank2: produced a factor of Kraus rank above 2");
    if (f.tp_residual() > 1e-8) throw Error("factor_rank2: produced a factor that is not trace preserving");
  }
  const double err = (compose_all(out).superop() - e.superop()).norm();
  if (err > 1e-9) {
    std::ostringstream msg;
    msg << "factor_rank2: recomposition error " << err;
    throw Error(msg.str());
  }
  return out;
}

DivisibilityReport classify(const ChannelRep& e, const Tolerances& tol) {
  if (e.dim() != 2) throw DimensionError("classify: qubit channels only");
  require_channel(e, tol, "classify");
  DivisibilityReport rep;
  rep.kraus_rank = kraus_rank(e, tol);
  if (rep.kraus_rank == 1) {
    rep.label = ClassLabel::Unitary;
    rep.normal_form = normal_form(e, tol);
    return rep;
  }
  rep.normal_form = normal_form(e, tol);
  const LorentzNormalForm& nf = *rep.normal_form;
  if (nf.kind == FormKind::Indeterminate) {
    rep.label = ClassLabel::Indeterminate;
    rep.note = nf.diagnostics;
    return rep;
  }

  auto attach_factors = [&] {
    try {
      rep.factors = factor_rank2(e, tol);
    } catch (const Error& ex) {
      rep.note = ex.what();
    }
  };

  if (nf.kind == FormKind::NonDiagonal) {
    rep.label = ClassLabel::InfinitesimallyDivisible;
    attach_factors();
    return rep;
  }
  if (rep.kraus_rank == 3) {
    rep.label = ClassLabel::Indivisible;
    return rep;
  }
  if (rep.kraus_rank <= 2) {
    rep.label = ClassLabel::InfinitesimallyDivisible;
    attach_factors();
    return rep;
  }

  const RMatrix m = nf.normal_channel->ptm();
  rep.eta_test = check_pauli_infdiv({m(1, 1), m(2, 2), m(3, 3)});
  if (rep.eta_test->infinitesimally_divisible) {
    rep.label = ClassLabel::InfinitesimallyDivisible;
    rep.markovian_candidate = !rep.eta_test->singular;
    attach_factors();
    return rep;
  }
  rep.label = ClassLabel::DivisibleNonInfinitesimal;
  rep.lb_witness = lb_decompose_auto(e, tol);
  rep.boundary_label = classify(rep.lb_witness->boundary, tol).label;
  if (*rep.boundary_label != ClassLabel::Indivisible)
    rep.note = "boundary factor classified " + std::string(to_string(*rep.boundary_label));
  return rep;
}

NDivisibility n_divisibility_status(const ChannelRep& e, int n, const Tolerances& tol) {
  if (n < 1) throw InvalidArgument("n_divisibility_status: n must be at least 1");
  NDivisibility out;
  out.n = n;
  if (n == 1) {
    out.divisible = true;
    out.witness = {e};
    out.reason = "every channel is 1-divisible";
    return out;
  }
  const DivisibilityReport rep = classify(e, tol);
  auto pad = [&](const char* why) {
    out.divisible = true;
    out.witness = {e};
    for (int k = 1; k < n; ++k) out.witness.push_back(identity_channel(e.dim()));
    out.reason = why;
  };
  switch (rep.label) {
    case ClassLabel::Indivisible:
      out.reason = "indivisible: every factorization contains a unitary factor";
      return out;
    case ClassLabel::Indeterminate:
      out.determined = false;
      out.reason = "normal form indeterminate";
      return out;
    case ClassLabel::Unitary:
      pad("unitary channel padded with identities");
      return out;
    default:
      break;
  }
  std::optional<LBDecomposition> lb;
  try {
    lb = lb_decompose_auto(e, tol);
  } catch (const Error&) {
  }
  if (!lb || lb->t_min <= 0) {
    pad("boundary channel padded with identities");
    return out;
  }
  out.divisible = true;
  if (kraus_rank(lb->boundary, tol) == 1) {
    const ChannelRep root = exp_generator(lb->generator, 1.0 / n);
    for (int k = 0; k < n - 1; ++k) out.witness.push_back(root);
    out.witness.push_back(compose(root, lb->boundary));
    out.reason = "n-th root of the Markov factor, unitary boundary folded into the last factor";
  } else {
    const ChannelRep root = exp_generator(lb->generator, 1.0 / (n - 1));
    for (int k = 0; k < n - 1; ++k) out.witness.push_back(root);
    out.witness.push_back(lb->boundary);
    out.reason = "(n-1)-th root of the Markov factor followed by the boundary factor";
  }
  return out;
}

}  // namespace chandiv
