#include "chandiv/dilation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "chandiv/errors.hpp"

namespace chandiv {

namespace {

const std::array<CMatrix, 3>& paulis() {
  static const std::array<CMatrix, 3> p = [] {
    CMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, cplx(0, -1), cplx(0, 1), 0;
    z << 1, 0, 0, -1;
    return std::array<CMatrix, 3>{x, y, z};
  }();
  return p;
}

CMatrix apply_stage(const CMatrix& v, const CMatrix& joint) { return v * joint * v.adjoint(); }

CMatrix with_fresh_ancilla(const CMatrix& rho) {
  CMatrix anc = CMatrix::Zero(2, 2);
  anc(0, 0) = 1.0;
  return kron(anc, rho);
}

CMatrix run(const DilationCircuit& c, const CMatrix& rho) {
  CMatrix joint = with_fresh_ancilla(rho);
  for (const auto& s : c.stages) {
    joint = apply_stage(s.unitary, joint);
    if (s.reset_ancilla_after) joint = with_fresh_ancilla(partial_trace_first(joint, 2, 2));
  }
  return partial_trace_first(joint, 2, 2);
}

}  // namespace

CMatrix dilate_rank2(const ChannelRep& e, const Tolerances& tol) {
  if (e.dim() != 2) throw DimensionError("dilate_rank2: qubit channels only");
  require_channel(e, tol, "dilate_rank2");
  std::vector<CMatrix> k = e.kraus(tol);
  if (k.size() > 2)
    throw RankTooLarge("dilate_rank2: Kraus rank " + std::to_string(k.size()) + " needs more than one ancilla qubit");
  while (k.size() < 2) k.push_back(CMatrix::Zero(2, 2));

  CMatrix v = CMatrix::Zero(4, 4);
  v.block(0, 0, 2, 2) = k[0];
  v.block(2, 0, 2, 2) = k[1];
  // Complete columns 2,3 by Gram-Schmidt over the standard basis, taking the
  // candidate with the largest residual each time.
  for (int col = 2; col < 4; ++col) {
    CVector best;
    double best_norm = -1;
    for (int cand = 0; cand < 4; ++cand) {
      CVector y = CVector::Zero(4);
      y(cand) = 1.0;
      for (int j = 0; j < col; ++j) y -= v.col(j).dot(y) * v.col(j);
      const double n = y.norm();
      if (n > best_norm + 1e-12) {
        best_norm = n;
        best = y;
      }
    }
    v.col(col) = best / best_norm;
  }
  if (verify_dilation(v, e) > 1e-9) throw Error("dilate_rank2: dilation check failed");
  return v;
}

double verify_dilation(const CMatrix& v, const ChannelRep& e) {
  if (e.dim() != 2 || v.rows() != 4 || v.cols() != 4 || !is_unitary(v, 1e-10))
    return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CMatrix unit = CMatrix::Zero(2, 2);
      unit(i, j) = 1.0;
      const CMatrix got = partial_trace_first(apply_stage(v, with_fresh_ancilla(unit)), 2, 2);
      worst = std::max(worst, (got - e.apply(unit)).norm());
    }
  return worst;
}

DilationCircuit build_circuit(const std::vector<ChannelRep>& factors, const Tolerances& tol) {
  DilationCircuit c;
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) c.stages.push_back({dilate_rank2(*it, tol), true});
  if (!c.stages.empty()) c.stages.back().reset_ancilla_after = false;
  return c;
}

ChannelRep simulate_exact(const DilationCircuit& c) {
  CMatrix s(4, 4);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      CMatrix unit = CMatrix::Zero(2, 2);
      unit(i, j) = 1.0;
      s.col(i + 2 * j) = vec(run(c, unit));
    }
  return ChannelRep::from_superop(s);
}

TomographyResult simulate_tomography(const DilationCircuit& c, long long shots, std::uint64_t seed) {
  if (shots < 0) throw InvalidArgument("simulate_tomography: shots must be positive (0 selects exact probabilities)");
  const ChannelRep channel = simulate_exact(c);
  const double h = 1.0 / std::sqrt(2.0);
  const std::array<CVector, 4> preps = {
      (CVector(2) << 1, 0).finished(), (CVector(2) << 0, 1).finished(), (CVector(2) << h, h).finished(),
      (CVector(2) << h, cplx(0, h)).finished()};

  std::mt19937_64 rng(seed);
  std::array<CMatrix, 4> est;
  for (std::size_t k = 0; k < preps.size(); ++k) {
    const CMatrix out = channel.apply(preps[k] * preps[k].adjoint());
    CMatrix rho = CMatrix::Identity(2, 2) / 2.0;
    for (std::size_t b = 0; b < 3; ++b) {
      const double expect = (paulis()[b] * out).trace().real();
      double r = expect;
      if (shots > 0) {
        const double p_plus = std::clamp((1.0 + expect) / 2.0, 0.0, 1.0);
        std::binomial_distribution<long long> draw(shots, p_plus);
        r = 2.0 * static_cast<double>(draw(rng)) / static_cast<double>(shots) - 1.0;
      }
      rho += r / 2.0 * paulis()[b];
    }
    est[k] = rho;
  }

  // Images of I, X, Y, Z from the four preparations.
  const std::array<CMatrix, 4> images = {est[0] + est[1], 2.0 * est[2] - est[0] - est[1],
                                         2.0 * est[3] - est[0] - est[1], est[0] - est[1]};
  const std::array<CMatrix, 4> sig = {CMatrix::Identity(2, 2), paulis()[0], paulis()[1], paulis()[2]};
  RMatrix ptm(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) ptm(i, j) = (sig[i] * images[j]).trace().real() / 2.0;

  TomographyResult res;
  res.reconstructed_ptm = ptm;
  res.reconstructed_choi = ChannelRep::from_ptm(ptm).choi();
  res.shots_per_setting = shots;
  res.seed = seed;
  return res;
}

Fidelity choi_fidelity(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw DimensionError("choi_fidelity: shape mismatch");
  Fidelity f;
  bool ca = false, cb = false;
  const CMatrix sa = psd_sqrt(a, 1e-9, &ca);
  const CMatrix sb = psd_sqrt(b, 1e-9, &cb);
  // tr sqrt(sqrt(A) B sqrt(A)) = ||sqrt(A) sqrt(B)||_1; the SVD form is symmetric in A and B.
  const double nuclear = Eigen::JacobiSVD<CMatrix>(sa * sb).singularValues().sum();
  const double norm = std::sqrt(std::abs(a.trace().real() * b.trace().real()));
  if (!(norm > 0)) throw InvalidArgument("choi_fidelity: zero-trace argument");
  f.value = nuclear / norm;
  f.clipped = ca || cb;
  return f;
}

}  // namespace chandiv
