#include "chandiv/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chandiv/errors.hpp"

namespace chandiv {

namespace {

int dim_from_square(Eigen::Index n, const char* what) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n || d < 1 || d > kMaxDim)
    throw DimensionError(std::string(what) + ": size " + std::to_string(n) + " is not d^2 for d in [1, 16]");
  return static_cast<int>(d);
}

// Choi[(i d + a), (j d + b)] = E[|i><j|]_{ab} = S[(a + b d), (i + j d)]
CMatrix reshuffle_superop_to_choi(const CMatrix& s, int d) {
  CMatrix c(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) c(i * d + a, j * d + b) = s(a + b * d, i + j * d);
  return c;
}

CMatrix reshuffle_choi_to_superop(const CMatrix& c, int d) {
  CMatrix s(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s(a + b * d, i + j * d) = c(i * d + a, j * d + b);
  return s;
}

double param(const std::map<std::string, double>& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw InvalidArgument("missing parameter '" + key + "'");
  return it->second;
}

int dim_param(const std::map<std::string, double>& p) {
  const double d = p.count("dim") ? p.at("dim") : param(p, "d");
  if (d != std::floor(d) || d < 1 || d > kMaxDim) throw InvalidArgument("parameter d must be an integer in [1, 16]");
  return static_cast<int>(d);
}

}  // namespace

void Tolerances::validate() const {
  if (!(eig_zero > 0) || !(tp_tol > 0) || !(t_tol > 0))
    throw InvalidArgument("tolerances must be strictly positive");
}

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::Ptm: return "ptm";
    case Representation::Choi: return "choi";
    case Representation::Kraus: return "kraus";
    case Representation::Superop: return "superop";
  }
  return "superop";
}

Representation representation_from_string(std::string_view s) {
  if (s == "ptm") return Representation::Ptm;
  if (s == "choi") return Representation::Choi;
  if (s == "kraus") return Representation::Kraus;
  if (s == "superop") return Representation::Superop;
  throw InvalidArgument("unknown representation '" + std::string(s) + "'");
}

ChannelRep ChannelRep::from_superop(CMatrix superop) {
  if (superop.rows() != superop.cols()) throw DimensionError("superop must be square");
  const int d = dim_from_square(superop.rows(), "superop");
  return ChannelRep(d, Representation::Superop, std::move(superop));
}

ChannelRep ChannelRep::from_ptm(const RMatrix& ptm) {
  if (ptm.rows() != ptm.cols()) throw DimensionError("ptm must be square");
  const int d = dim_from_square(ptm.rows(), "ptm");
  const CMatrix& b = basis_change(d);
  return ChannelRep(d, Representation::Ptm, b * ptm.cast<cplx>() * b.adjoint());
}

ChannelRep ChannelRep::from_choi(const CMatrix& choi) {
  if (choi.rows() != choi.cols()) throw DimensionError("choi must be square");
  const int d = dim_from_square(choi.rows(), "choi");
  return ChannelRep(d, Representation::Choi, reshuffle_choi_to_superop(choi, d));
}

ChannelRep ChannelRep::from_kraus(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw DimensionError("empty Kraus set");
  const auto d = kraus.front().rows();
  if (d < 1 || d > kMaxDim) throw DimensionError("Kraus operator dimension outside [1, 16]");
  CMatrix s = CMatrix::Zero(d * d, d * d);
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d) throw DimensionError("Kraus operators must all be d x d");
    s += kron(k.conjugate(), k);
  }
  return ChannelRep(static_cast<int>(d), Representation::Kraus, std::move(s));
}

CMatrix ChannelRep::ptm_complex() const {
  const CMatrix& b = basis_change(dim_);
  return b.adjoint() * superop_ * b;
}

RMatrix ChannelRep::ptm() const { return ptm_complex().real(); }

CMatrix ChannelRep::choi() const { return reshuffle_superop_to_choi(superop_, dim_); }

std::vector<CMatrix> ChannelRep::kraus(const Tolerances& tol) const {
  const CMatrix c = hermitian_part(choi());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
  const double cutoff = tol.eig_zero * std::abs(c.trace().real());
  std::vector<CMatrix> out;
  for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
    const double lambda = es.eigenvalues()(k);
    if (lambda <= cutoff) break;
    const CVector v = es.eigenvectors().col(k);
    CMatrix op(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int a = 0; a < dim_; ++a) op(a, i) = std::sqrt(lambda) * v(i * dim_ + a);
    Eigen::Index best = 0;
    for (Eigen::Index n = 1; n < op.size(); ++n)
      if (std::abs(op(n)) > std::abs(op(best)) * (1.0 + 1e-12)) best = n;
    if (std::abs(op(best)) > 0) op *= std::conj(op(best)) / std::abs(op(best));
    out.push_back(std::move(op));
  }
  return out;
}

CMatrix ChannelRep::apply(const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw DimensionError("apply: operator has wrong shape");
  return unvec(superop_ * vec(rho), dim_);
}

double ChannelRep::tp_residual() const {
  // tr E[|i><j|] = sum_a S[(a + a d), (i + j d)]
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      cplx tr = 0.0;
      for (int a = 0; a < dim_; ++a) tr += superop_(a + a * dim_, i + j * dim_);
      worst = std::max(worst, std::abs(tr - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

ChannelRep ChannelRep::as(Representation r) const { return ChannelRep(dim_, r, superop_); }

CMatrix to_choi(const ChannelRep& c) { return c.choi(); }

CpCheck is_cp(const ChannelRep& c, const Tolerances& tol) {
  const CMatrix choi = c.choi();
  const double scale = std::max(1.0, choi.norm());
  if (hermiticity_residual(choi) > 1e-8 * scale)
    throw InvalidArgument("Choi matrix is not Hermitian: map does not preserve Hermiticity");
  const double m = min_hermitian_eigenvalue(choi);
  return {m >= -tol.eig_zero, m};
}

bool is_tp(const ChannelRep& c, const Tolerances& tol) { return c.tp_residual() <= tol.tp_tol; }

int kraus_rank(const ChannelRep& c, const Tolerances& tol) {
  const CMatrix choi = c.choi();
  const auto check = is_cp(c, tol);
  if (!check.completely_positive)
    throw NotCompletelyPositive("kraus_rank: map is not completely positive", check.min_eigenvalue);
  const RVector ev = hermitian_eigenvalues(choi);
  const double cutoff = tol.eig_zero * std::abs(choi.trace().real());
  return static_cast<int>((ev.array() > cutoff).count());
}

ChannelRep compose(const ChannelRep& a, const ChannelRep& b) {
  if (a.dim() != b.dim()) throw DimensionError("compose: dimension mismatch");
  return ChannelRep::from_superop(a.superop() * b.superop());
}

ChannelRep compose_all(const std::vector<ChannelRep>& maps) {
  if (maps.empty()) throw InvalidArgument("compose_all: empty list");
  CMatrix s = maps.front().superop();
  for (std::size_t k = 1; k < maps.size(); ++k) {
    if (maps[k].dim() != maps.front().dim()) throw DimensionError("compose_all: dimension mismatch");
    s = s * maps[k].superop();
  }
  return ChannelRep::from_superop(std::move(s));
}

double determinant(const ChannelRep& c) { return c.superop().determinant().real(); }

void require_channel(const ChannelRep& c, const Tolerances& tol, std::string_view what) {
  const auto check = is_cp(c, tol);
  if (!check.completely_positive) {
    std::ostringstream msg;
    msg << what << ": not completely positive (min Choi eigenvalue " << check.min_eigenvalue << ")";
    throw NotCompletelyPositive(msg.str(), check.min_eigenvalue);
  }
  const double tp = c.tp_residual();
  if (tp > tol.tp_tol) {
    std::ostringstream msg;
    msg << what << ": not trace preserving (residual " << tp << ")";
    throw InvalidArgument(msg.str());
  }
}

ChannelRep identity_channel(int d) {
  if (d < 1 || d > kMaxDim) throw DimensionError("identity_channel: dimension outside [1, 16]");
  return ChannelRep::from_superop(CMatrix::Identity(d * d, d * d));
}

ChannelRep unitary_channel(const CMatrix& u) {
  if (!is_unitary(u, 1e-10)) throw InvalidArgument("unitary_channel: matrix is not unitary");
  return ChannelRep::from_kraus({u});
}

ChannelRep completely_depolarizing(int d) {
  if (d < 1 || d > kMaxDim) throw DimensionError("completely_depolarizing: dimension outside [1, 16]");
  // S = vec(1/d) vec(1)^dagger
  const CVector out = vec(CMatrix::Identity(d, d)) / static_cast<double>(d);
  const CVector in = vec(CMatrix::Identity(d, d));
  return ChannelRep::from_superop(out * in.adjoint());
}

ChannelRep depolarizing(int d, double q) {
  CMatrix s = q * identity_channel(d).superop() + (1.0 - q) * completely_depolarizing(d).superop();
  return ChannelRep::from_superop(std::move(s));
}

ChannelRep universal_not() { return pauli_channel(-1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0); }

ChannelRep pauli_channel(double eta1, double eta2, double eta3) {
  RVector diag(4);
  diag << 1.0, eta1, eta2, eta3;
  return ChannelRep::from_ptm(diag.asDiagonal().toDenseMatrix());
}

ChannelRep bit_flip(double lambda) { return pauli_channel(1.0, lambda, lambda); }
ChannelRep bit_phase_flip(double lambda) { return pauli_channel(lambda, 1.0, lambda); }
ChannelRep phase_flip(double lambda) { return pauli_channel(lambda, lambda, 1.0); }

ChannelRep make_named(std::string_view name, const std::map<std::string, double>& params) {
  auto build = [&]() -> ChannelRep {
    if (name == "identity") return identity_channel(dim_param(params));
    if (name == "depolarizing_full") return completely_depolarizing(dim_param(params));
    if (name == "depolarizing") return depolarizing(dim_param(params), param(params, "q"));
    if (name == "not") return universal_not();
    if (name == "pauli") return pauli_channel(param(params, "eta1"), param(params, "eta2"), param(params, "eta3"));
    if (name == "bit_flip") return bit_flip(param(params, "lambda"));
    if (name == "phase_flip") return phase_flip(param(params, "lambda"));
    if (name == "bit_phase_flip") return bit_phase_flip(param(params, "lambda"));
    throw InvalidArgument("unknown channel name '" + std::string(name) + "'");
  };
  ChannelRep c = build();
  require_channel(c, Tolerances{}, name);
  return c;
}

}  // namespace chandiv
