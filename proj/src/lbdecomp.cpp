#include "chandiv/lbdecomp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "chandiv/errors.hpp"

namespace chandiv {

namespace {

class Family {
 public:
  Family(const ChannelRep& e, const LindbladGenerator& g, Side side)
      : dim_(e.dim()), e_(e.superop()), l_(generator_superop(g)), side_(side) {}

  CMatrix at(double t) const {
    const CMatrix back = (-t * l_).exp();
    return side_ == Side::Left ? CMatrix(back * e_) : CMatrix(e_ * back);
  }

  double min_eig(double t) const { return min_hermitian_eigenvalue(ChannelRep::from_superop(at(t)).choi()); }

  double trace_l() const { return l_.trace().real(); }
  const CMatrix& base() const { return e_; }
  int dim() const { return dim_; }

 private:
  int dim_;
  CMatrix e_;
  CMatrix l_;
  Side side_;
};

bool is_constant(const Family& f, double t_max) {
  const double scale = std::max(1.0, f.base().norm());
  for (double t : {0.25 * t_max, t_max})
    if ((f.at(t) - f.base()).norm() > 1e-12 * scale) return false;
  return true;
}

}  // namespace

ChannelRep LBDecomposition::recompose() const {
  const ChannelRep markov = markov_factor();
  return side == Side::Left ? compose(markov, boundary) : compose(boundary, markov);
}

double recomposition_error(const ChannelRep& e, const LBDecomposition& dec) {
  return (dec.recompose().superop() - e.superop()).norm();
}

LBDecomposition lb_decompose(const ChannelRep& e, const LindbladGenerator& g, const Tolerances& tol,
                             const LbOptions& opts) {
  tol.validate();
  if (g.dim() != e.dim()) throw DimensionError("lb_decompose: generator and channel dimensions differ");
  const auto cp = is_cp(e, tol);
  if (!cp.completely_positive)
    throw NotCompletelyPositive("lb_decompose: input is not completely positive", cp.min_eigenvalue);
  if (opts.scan_steps < 2) throw InvalidArgument("lb_decompose: scan_steps must be at least 2");

  const Family family(e, g, opts.side);
  const int d = e.dim();

  double hint = 0.0;
  const double tr_l = family.trace_l();
  const double det = std::abs(determinant(e));
  if (det > 1e-10 && tr_l < 0) hint = std::log(det) / tr_l;  // |det F_t| > 1 beyond this

  const double f0 = family.min_eig(0.0);
  if (f0 <= tol.eig_zero) {
    return LBDecomposition{g.scaled(0.0), e, 0.0, f0, hint, opts.side};
  }
  if (!g.has_dissipation())
    throw DegenerateFamily("lb_decompose: generator has no dissipative part, the family never leaves CP");

  double t_max = 0;
  if (opts.t_max) {
    t_max = *opts.t_max;
    if (!(t_max > 0)) throw InvalidArgument("lb_decompose: t_max must be positive");
  } else if (hint > 0) {
    t_max = 10.0 * hint;
  } else {
    t_max = 10.0 * d * d / std::abs(tr_l);
  }

  double lo = 0.0, hi = -1.0;
  for (int attempt = 0; attempt <= 10 && hi < 0; ++attempt) {
    if (is_constant(family, t_max))
      throw DegenerateFamily(
          "lb_decompose: the family F_t does not depend on t; choose a generator for which the input is not a "
          "fixed point");
    const double step = t_max / opts.scan_steps;
    lo = 0.0;
    for (int k = 1; k <= opts.scan_steps; ++k) {
      const double t = k * step;
      if (family.min_eig(t) < 0.0) {
        hi = t;
        break;
      }
      lo = t;
    }
    if (hi < 0) t_max *= 2.0;
  }
  if (hi < 0) {
    std::ostringstream msg;
    msg << "lb_decompose: family stays completely positive up to t = " << t_max / 2.0 << "; enlarge the horizon";
    throw NoCrossing(msg.str());
  }

  while (hi - lo > tol.t_tol) {
    const double mid = 0.5 * (lo + hi);
    if (family.min_eig(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }

  ChannelRep boundary = ChannelRep::from_superop(family.at(lo));
  const double m = family.min_eig(lo);
  return LBDecomposition{g.scaled(lo), std::move(boundary), lo, m, hint, opts.side};
}

GeneratorChoice select_generator(const ChannelRep& e, const Tolerances& tol) {
  const int rank = kraus_rank(e, tol);
  if (rank == 1) throw UnitaryInput("unitary input: nothing to decompose (Kraus rank 1)");
  const int d = e.dim();
  const double det = std::abs(determinant(e));
  if (det > 1e-10) {
    LindbladGenerator g = make_depolarizing_generator(d, 1.0);
    const double tr_l = generator_superop(g).trace().real();
    return {std::move(g), std::log(det) / tr_l, false};
  }

  // Singular channel: probe an informationally complete frame and pick psi
  // from the least pure output so that <psi|rho|psi> < 1.
  std::vector<CVector> probes;
  for (int k = 0; k < d; ++k) {
    CVector v = CVector::Zero(d);
    v(k) = 1.0;
    probes.push_back(v);
  }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      CVector p = CVector::Zero(d), q = CVector::Zero(d);
      p(j) = q(j) = 1.0 / std::sqrt(2.0);
      p(k) = 1.0 / std::sqrt(2.0);
      q(k) = cplx(0.0, 1.0 / std::sqrt(2.0));
      probes.push_back(p);
      probes.push_back(q);
    }
  std::vector<CMatrix> outputs;
  std::vector<double> purity;
  for (const auto& p : probes) {
    outputs.push_back(hermitian_part(e.apply(p * p.adjoint())));
    purity.push_back((outputs.back() * outputs.back()).trace().real());
  }
  std::vector<std::size_t> order(outputs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return purity[a] < purity[b] - 1e-12; });

  for (std::size_t idx : order) {
    const CMatrix& rho = outputs[idx];
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    std::vector<int> cols(static_cast<std::size_t>(d));
    std::iota(cols.begin(), cols.end(), 0);
    std::stable_sort(cols.begin(), cols.end(), [&](int a, int b) {
      return es.eigenvalues()(a) > es.eigenvalues()(b) + 1e-12;
    });
    for (int c : cols) {
      const CVector psi = es.eigenvectors().col(c).normalized();
      const double pop = (psi.adjoint() * rho * psi)(0).real();
      if (pop >= 1.0 - 1e-9) continue;
      LindbladGenerator g = make_psi_generator(psi, 1.0);
      // E[D] = |psi><psi| tr D makes the family constant.
      const CVector proj = vec(CMatrix(psi * psi.adjoint()));
      const CMatrix collapse = proj * vec(CMatrix::Identity(d, d)).adjoint();
      if ((e.superop() - collapse).norm() < 1e-10) continue;
      return {std::move(g), -std::log(1.0 - std::max(pop, 0.0)), true};
    }
  }
  throw DegenerateFamily("select_generator: no psi gives a non-trivial family");
}

LBDecomposition lb_decompose_auto(const ChannelRep& e, const Tolerances& tol) {
  const auto choice = select_generator(e, tol);
  LbOptions opts;
  if (choice.bracket_hint > 0) opts.t_max = 10.0 * choice.bracket_hint;
  LBDecomposition dec = lb_decompose(e, choice.generator, tol, opts);
  dec.bracket_hint = choice.bracket_hint;
  return dec;
}

std::vector<ScanSample> crossing_scan(const ChannelRep& e, const LindbladGenerator& g, double t_max, int steps,
                                      Side side, const Tolerances& tol) {
  if (!(t_max > 0)) throw InvalidArgument("crossing_scan: t_max must be positive");
  if (steps < 2) throw InvalidArgument("crossing_scan: steps must be at least 2");
  if (g.dim() != e.dim()) throw DimensionError("crossing_scan: generator and channel dimensions differ");
  const Family family(e, g, side);
  std::vector<ScanSample> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double t = (k == steps - 1) ? t_max : t_max * k / (steps - 1);
    const ChannelRep f = ChannelRep::from_superop(family.at(t));
    const double m = min_hermitian_eigenvalue(f.choi());
    out.push_back({t, m, determinant(f), m >= -tol.eig_zero});
  }
  return out;
}

}  // namespace chandiv
