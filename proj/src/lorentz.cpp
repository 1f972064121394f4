#include "chandiv/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "chandiv/errors.hpp"

namespace chandiv {

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kClusterGap = 1e-7;
constexpr double kDiagResid = 1e-6;
constexpr double kDefectResid = 1e-4;
constexpr double kNullTol = 1e-8;
constexpr double kReconTol = 1e-8;

double gdot(const RVector& a, const RVector& b) { return a(0) * b(0) - a.tail<3>().dot(b.tail<3>()); }

RVector unit(int k) {
  RVector e = RVector::Zero(4);
  e(k) = 1.0;
  return e;
}

void make_dominant_positive(RVector& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v(k) < 0) v = -v;
}

/// Fills the columns of f not marked fixed with unit spacelike vectors
/// G-orthogonal to everything before them. The fixed columns must already be
/// G-orthonormal and include the timelike one.
void complete_frame(RMatrix& f, const std::array<bool, 4>& fixed) {
  std::vector<RVector> have;
  for (int j = 0; j < 4; ++j)
    if (fixed[j]) have.push_back(f.col(j));
  for (int j = 0; j < 4; ++j) {
    if (fixed[j]) continue;
    RVector best;
    double best_norm = -1;
    for (int k = 0; k < 4; ++k) {
      RVector y = unit(k);
      for (const auto& h : have) y -= (gdot(y, h) / gdot(h, h)) * h;
      const double n = -gdot(y, y);
      if (n > best_norm) {
        best_norm = n;
        best = y;
      }
    }
    if (best_norm <= 1e-12) throw NormalFormError("normal_form: cannot complete the Lorentz frame");
    f.col(j) = best / std::sqrt(best_norm);
    have.push_back(f.col(j));
  }
}

double lorentz_defect(const RMatrix& l) { return (l.transpose() * lorentz_metric() * l - lorentz_metric()).norm(); }

/// Null vector in span(w, y) other than w (w null, the span Lorentzian).
RVector other_null(const RVector& w, const RVector& y) {
  const RVector v = y - (y.dot(w) / w.dot(w)) * w;
  const double vw = gdot(v, w);
  if (std::abs(vw) < 1e-14) throw NormalFormError("normal_form: degenerate null plane");
  return v - (gdot(v, v) / (2.0 * vw)) * w;
}

/// Proper rotation whose third spatial axis is n (unit 3-vector embedded in 4).
RMatrix rotation_with_axis3(const RVector& n) {
  RMatrix f = RMatrix::Zero(4, 4);
  f.col(0) = unit(0);
  f.col(3) = n;
  complete_frame(f, {true, false, false, true});
  if (f.determinant() < 0) f.col(2) = -f.col(2);
  return f;
}

}  // namespace

const RMatrix& lorentz_metric() {
  static const RMatrix g = RVector((RVector(4) << 1, -1, -1, -1).finished()).asDiagonal();
  return g;
}

const RMatrix& phi_t() {
  static const RMatrix p = RVector((RVector(4) << 1, 1, -1, 1).finished()).asDiagonal();
  return p;
}

std::string_view to_string(FormKind k) {
  switch (k) {
    case FormKind::Diagonal:
      return "diagonal";
    case FormKind::NonDiagonal:
      return "nondiagonal";
    case FormKind::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

double m_form_f(double v, double z) { return std::sqrt(std::max(0.0, 1.0 + v - z - v * z)); }

RMatrix m_form_matrix(const MParams& p) {
  const double xf = p.x * m_form_f(p.v, p.z);
  RMatrix m = RMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(0, 3) = p.z;
  m(1, 1) = xf;
  m(2, 2) = xf;
  m(3, 0) = p.v;
  m(3, 3) = p.v - p.z + 1.0;
  return m;
}

std::optional<int> m_case(const MParams& p) {
  const double t = kBoundaryTol;
  const bool z_half_open = p.z >= -t && p.z < 1.0 - t;
  const bool v_open = p.v > -1.0 + t && p.v <= p.z + t;
  const bool x_zero = std::abs(p.x) <= t;
  if (z_half_open && v_open) {
    if (std::abs(p.x) < 1.0 - t) return 1;
    if (std::abs(std::abs(p.x) - 1.0) <= t) return 2;
  }
  if (z_half_open && std::abs(p.v + 1.0) <= t && x_zero) return 3;
  if (std::abs(p.z - 1.0) <= t && x_zero && p.v >= -1.0 - t && p.v <= 1.0 + t) return 4;
  return std::nullopt;
}

ChannelRep make_m_form(const MParams& p, const Tolerances& tol) {
  ChannelRep m = ChannelRep::from_ptm(m_form_matrix(p));
  if (m_case(p)) return m;

  std::ostringstream msg;
  msg << "make_m_form: (v,x,z) = (" << p.v << ", " << p.x << ", " << p.z << ") is outside all case regions: ";
  if (p.z < 0 || p.z > 1)
    msg << "z must lie in [0,1]";
  else if (p.z == 1 || (p.v <= -1 && std::abs(p.x) > kBoundaryTol))
    msg << "x must be 0 when z = 1 or v = -1";
  else if (p.v < -1)
    msg << "v must be >= -1";
  else if (p.v > p.z)
    msg << "v must be <= z";
  else
    msg << "|x| must be <= 1";
  const auto cp = is_cp(m, tol);
  msg << " (min Choi eigenvalue " << cp.min_eigenvalue << ")";
  if (!cp.completely_positive) throw NotCompletelyPositive(msg.str(), cp.min_eigenvalue);
  throw InvalidArgument(msg.str());
}

std::pair<ChannelRep, ChannelRep> split_m_form(const MParams& p, const Tolerances& tol) {
  make_m_form(p, tol);
  // f vanishes in cases iii and iv, where M(v,1,z) = M(v,0,z) lies in the same case
  const double x_first = m_form_f(p.v, p.z) > 0 ? 1.0 : 0.0;
  ChannelRep first = make_m_form({p.v, x_first, p.z}, tol);
  ChannelRep second = phase_flip(p.x);
  return {std::move(first), std::move(second)};
}

namespace {

struct Cluster {
  double lambda;
  double imag;
  int size;
  RMatrix basis;  ///< 4 x size, Euclidean-orthonormal
  double resid;
};

struct Spectrum {
  std::vector<Cluster> clusters;
  Tri diagonalizable;
};

Spectrum analyze(const RMatrix& n) {
  Eigen::EigenSolver<RMatrix> es(n, false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  std::vector<std::vector<cplx>> groups;
  for (const cplx& l : ev) {
    if (!groups.empty() && std::abs(l - groups.back().back()) <= kClusterGap)
      groups.back().push_back(l);
    else
      groups.push_back({l});
  }
  Spectrum out{{}, Tri::Yes};
  double worst = 0;
  for (const auto& g : groups) {
    cplx mean = 0;
    for (const cplx& l : g) mean += l;
    mean /= static_cast<double>(g.size());
    const int m = static_cast<int>(g.size());
    const RMatrix p = n - mean.real() * RMatrix::Identity(4, 4);
    Eigen::JacobiSVD<RMatrix> svd(p, Eigen::ComputeFullV);
    double resid = svd.singularValues()(4 - m);
    if (std::abs(mean.imag()) > kClusterGap) resid = std::max(resid, 1.0);
    worst = std::max(worst, resid);
    out.clusters.push_back({mean.real(), mean.imag(), m, svd.matrixV().rightCols(m), resid});
  }
  if (worst >= kDefectResid)
    out.diagonalizable = Tri::No;
  else if (worst > kDiagResid)
    out.diagonalizable = Tri::Indeterminate;
  return out;
}

struct Frames {
  RMatrix x;      ///< L1^{-T} = G L1 G
  RMatrix l2;
  RMatrix sigma;  ///< R = L2 Sigma L1^T
  MParams params;
  FormKind kind;
};

LorentzNormalForm assemble(const RMatrix& ptm, const Frames& fr, const Tolerances& tol) {
  const RMatrix& g = lorentz_metric();
  const RMatrix& phi = phi_t();
  const double scale = fr.sigma(0, 0);
  if (!(scale > 0)) throw NormalFormError("normal_form: non-positive leading scale");
  const RMatrix l1 = g * fr.x * g;
  LorentzNormalForm nf;
  nf.kind = fr.kind;
  nf.params = fr.params;
  const RMatrix m = fr.sigma * phi / scale;
  nf.t2 = scale * fr.l2;
  nf.t1 = phi * l1.transpose() * phi;
  for (int i = 0; i < 4; ++i) nf.diagonal_entries[static_cast<std::size_t>(i)] = scale * m(i, i);
  nf.normal_channel = ChannelRep::from_ptm(m);
  nf.reconstruction_error = (nf.t2 * m * nf.t1 - ptm).norm();
  std::ostringstream diag;
  diag << "L1 defect " << lorentz_defect(l1) << ", L2 defect " << lorentz_defect(fr.l2) << ", det L1 "
       << l1.determinant() << ", det L2 " << fr.l2.determinant();
  nf.diagnostics = diag.str();
  if (nf.reconstruction_error > kReconTol * std::max(1.0, ptm.norm()) || lorentz_defect(l1) > 1e-6 ||
      lorentz_defect(fr.l2) > 1e-6 || l1.determinant() < 0 || fr.l2.determinant() < 0 || l1(0, 0) <= 0 ||
      fr.l2(0, 0) <= 0) {
    std::ostringstream msg;
    msg << "normal-form extraction failed: reconstruction error " << nf.reconstruction_error << "; "
        << nf.diagnostics;
    throw NormalFormError(msg.str());
  }
  if (fr.kind == FormKind::Diagonal && !is_cp(*nf.normal_channel, tol).completely_positive)
    throw NormalFormError("normal-form extraction failed: diagonal form is not CP; " + nf.diagnostics);
  return nf;
}

Frames diagonal_frames(const RMatrix& r, const Spectrum& sp) {
  const RMatrix& g = lorentz_metric();
  RVector timelike;
  int n_time = 0;
  std::vector<std::pair<double, RVector>> space;
  for (const auto& c : sp.clusters) {
    const RMatrix h = c.basis.transpose() * g * c.basis;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
    for (int k = 0; k < c.size; ++k) {
      const double dk = es.eigenvalues()(k);
      if (std::abs(dk) < kNullTol) throw NormalFormError("normal_form: null eigenvector in a diagonalizable cluster");
      RVector v = c.basis * es.eigenvectors().col(k) / std::sqrt(std::abs(dk));
      if (dk > 0) {
        timelike = v;
        ++n_time;
      } else {
        space.emplace_back(c.lambda, v);
      }
    }
  }
  if (n_time != 1) throw NormalFormError("normal_form: expected exactly one timelike eigenvector");
  std::stable_sort(space.begin(), space.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  RMatrix x(4, 4);
  if (timelike(0) < 0) timelike = -timelike;
  x.col(0) = timelike;
  for (int i = 1; i < 4; ++i) {
    RVector v = space[static_cast<std::size_t>(i - 1)].second;
    make_dominant_positive(v);
    x.col(i) = v;
  }
  if (x.determinant() < 0) x.col(3) = -x.col(3);

  const RMatrix y = r * x;
  const double s0sq = gdot(y.col(0), y.col(0));
  if (!(s0sq > 0) || y(0, 0) <= 0) throw NormalFormError("normal_form: image of the timelike axis is not future timelike");
  const double s0 = std::sqrt(s0sq);
  RMatrix l2 = RMatrix::Zero(4, 4);
  std::array<double, 4> s{s0, 0, 0, 0};
  std::array<bool, 4> fixed{true, false, false, false};
  l2.col(0) = y.col(0) / s0;
  for (int i = 1; i < 4; ++i) {
    const double n = std::sqrt(std::max(0.0, -gdot(y.col(i), y.col(i))));
    if (n > 1e-9 * s0) {
      RVector l = y.col(i) / n;
      const RVector before = l;
      make_dominant_positive(l);
      const double sign = l.dot(before) > 0 ? 1.0 : -1.0;
      l2.col(i) = l;
      s[static_cast<std::size_t>(i)] = sign * n;
      fixed[static_cast<std::size_t>(i)] = true;
    }
  }
  complete_frame(l2, fixed);
  if (l2.determinant() < 0) {
    int flip = 3;
    for (int i = 3; i >= 1; --i)
      if (!fixed[static_cast<std::size_t>(i)]) {
        flip = i;
        break;
      }
    l2.col(flip) = -l2.col(flip);
    s[static_cast<std::size_t>(flip)] = -s[static_cast<std::size_t>(flip)];
  }
  RMatrix sigma = RMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) sigma(i, i) = s[static_cast<std::size_t>(i)];
  return {x, l2, sigma, {}, FormKind::Diagonal};
}

RMatrix sigma2(double a, double b, double c, double d) {
  RMatrix s = RMatrix::Zero(4, 4);
  s(0, 0) = a;
  s(0, 3) = b;
  s(1, 1) = d;
  s(2, 2) = -d;
  s(3, 0) = c;
  s(3, 3) = a + c - b;
  return s;
}

MParams params_from(double a, double b, double c, double d) {
  MParams p{c / a, 0.0, b / a};
  const double f = m_form_f(p.v, p.z);
  p.x = f > 1e-12 ? (d / a) / f : 0.0;
  return p;
}

/// R = sigma * u * r^T with one of u, r null: cases iii and iv.
Frames rank_one_frames(RVector u, RVector r, double sigma) {
  if (u(0) < 0) {
    u = -u;
    r = -r;
  }
  if (r(0) <= 0) throw NormalFormError("normal_form: rank-one map is not orthochronous");
  const double gr = gdot(r, r) / (r(0) * r(0));
  const RVector us = (RVector(4) << 0, u.tail<3>()).finished();
  const RVector rs = (RVector(4) << 0, r.tail<3>()).finished();
  auto axis = [](const RVector& spatial) {
    return spatial.norm() > 1e-12 ? rotation_with_axis3(spatial / spatial.norm()) : RMatrix(RMatrix::Identity(4, 4));
  };
  const double a = sigma * u(0) * r(0);
  const RMatrix l1 = axis(rs);
  if (gr > kNullTol) {
    // u null, r timelike: sigma2 = a p0 (1,0,0,z)^T with p0 = (1,0,0,-1)
    const RMatrix l2 = axis(-us);
    const double z = rs.norm() / r(0);
    return {lorentz_metric() * l1 * lorentz_metric(), l2, sigma2(a, a * z, -a, 0.0), {-1.0, 0.0, z},
            FormKind::NonDiagonal};
  }
  // r null: sigma2 = a (1,0,0,v)(1,0,0,1)^T
  const RMatrix l2 = axis(us);
  const double v = us.norm() / u(0);
  return {lorentz_metric() * l1 * lorentz_metric(), l2, sigma2(a, a, a * v, 0.0), {v, 0.0, 1.0},
          FormKind::NonDiagonal};
}

RMatrix null_space(const RMatrix& a, int dim) {
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim);
}

/// Jordan-block route: N has a defective eigenvalue mu with a null eigenvector p.
Frames jordan_frames(const RMatrix& r, const RMatrix& n, const Spectrum& sp) {
  RVector p;
  RMatrix e;  // 4 x 2 basis of the spacelike invariant plane
  if (sp.clusters.size() == 1) {
    const RMatrix pm = n - sp.clusters[0].lambda * RMatrix::Identity(4, 4);
    Eigen::JacobiSVD<RMatrix> svd(pm, Eigen::ComputeFullU | Eigen::ComputeFullV);
    p = svd.matrixU().col(0);
    const RVector r1 = svd.matrixV().col(0);
    const RMatrix ker = svd.matrixV().rightCols(3);
    const RMatrix row = r1.transpose() * lorentz_metric() * ker;
    e = ker * null_space(row, 2);
  } else {
    const Cluster* def = nullptr;
    const Cluster* other = nullptr;
    for (const auto& c : sp.clusters) {
      if (c.resid >= kDefectResid && c.size == 2 && std::abs(c.imag) <= kClusterGap)
        def = &c;
      else if (c.size == 2)
        other = &c;
    }
    if (def == nullptr || other == nullptr || sp.clusters.size() != 2)
      throw NormalFormError("normal_form: spectrum of G R^T G R matches neither normal form");
    const RMatrix pm = n - def->lambda * RMatrix::Identity(4, 4);
    p = null_space(pm, 1).col(0);
    e = other->basis;
  }
  if (std::abs(gdot(p, p)) > 1e-6) throw NormalFormError("normal_form: defective eigenvector is not null");
  if (p(0) < 0) p = -p;

  // e1, e2: G-orthonormal basis of the spacelike plane
  const RMatrix h = e.transpose() * lorentz_metric() * e;
  Eigen::SelfAdjointEigenSolver<RMatrix> hs(h);
  if (hs.eigenvalues().maxCoeff() > -kNullTol) throw NormalFormError("normal_form: invariant plane is not spacelike");
  RVector e1 = e * hs.eigenvectors().col(0) / std::sqrt(-hs.eigenvalues()(0));
  RVector e2 = e * hs.eigenvectors().col(1) / std::sqrt(-hs.eigenvalues()(1));

  // q: the other null direction of the Lorentzian plane G-orthogonal to e
  const RMatrix vplane = null_space(RMatrix(e.transpose() * lorentz_metric()), 2);
  RVector y0 = vplane.col(0) - vplane.col(0).dot(p) / p.squaredNorm() * p;
  RVector y1 = vplane.col(1) - vplane.col(1).dot(p) / p.squaredNorm() * p;
  RVector q = other_null(p, y0.norm() > y1.norm() ? y0 : y1);
  q *= 2.0 / gdot(p, q);
  if (q(0) < 0) throw NormalFormError("normal_form: null frame is not future directed");
  {
    const double s = std::sqrt(q(0) / p(0));
    p *= s;
    q /= s;
  }

  const double dnorm_raw = std::sqrt(std::max(0.0, -gdot(r * e1, r * e1)));
  auto build = [&](const RVector& pp, const RVector& qq, const RVector& w2, const RVector& u2) -> Frames {
    RMatrix x(4, 4);
    x << (pp + qq) / 2, e1, e2, (qq - pp) / 2;
    RVector f2 = e2;
    if (x.determinant() < 0) {
      f2 = -e2;
      x.col(2) = f2;
    }
    const RVector rp = r * pp, rq = r * qq;
    const double a1 = gdot(rp, u2) / 2, a2 = gdot(rq, w2) / 2, a3 = gdot(rq, u2) / 2;
    const double a = (a1 + a2 + a3) / 2, b = (a2 - a1 + a3) / 2, c = (a2 - a1 - a3) / 2;
    RMatrix l2 = RMatrix::Zero(4, 4);
    l2.col(0) = (u2 + w2) / 2;
    l2.col(3) = (u2 - w2) / 2;
    double d = 0;
    if (dnorm_raw > 1e-9 * std::abs(a)) {
      d = dnorm_raw;
      l2.col(1) = r * e1 / d;
      l2.col(2) = -(r * f2) / d;
    } else {
      complete_frame(l2, {true, false, false, true});
      if (l2.determinant() < 0) l2.col(2) = -l2.col(2);
    }
    return {x, l2, sigma2(a, b, c, d), params_from(a, b, c, d), FormKind::NonDiagonal};
  };

  const RVector rp = r * p;
  if (rp.norm() < 1e-10) throw NormalFormError("normal_form: null eigenvector is annihilated");
  RVector what = rp(0) > 0 ? rp : RVector(-rp);
  RVector uhat = other_null(what, r * q);
  if (uhat(0) < 0) uhat = -uhat;
  const double gwu = gdot(what, uhat);
  const double alpha = std::sqrt(2.0 * uhat(0) / (what(0) * gwu));
  const double beta = alpha * what(0) / uhat(0);
  RVector w2 = alpha * what, u2 = beta * uhat;

  Frames fr = build(p, q, w2, u2);
  if (fr.params.z < -kBoundaryTol || !m_case(fr.params)) {
    // Equalize the three null-frame coefficients: (v,z) = (-1/3, 1/3).
    const RVector rpp = r * p, rqq = r * q;
    const double a1 = gdot(rpp, u2) / 2, a2 = gdot(rqq, w2) / 2, a3 = gdot(rqq, u2) / 2;
    if (a1 > 0 && a2 > 0 && a3 > 0) {
      const double s = std::sqrt(a3 / a1), t = std::sqrt(a3 / a2);
      fr = build(s * p, q / s, t * w2, u2 / t);
    }
  }
  return fr;
}

}  // namespace

Tri is_diagonal_form(const ChannelRep& e, const Tolerances& tol) {
  const LorentzNormalForm nf = normal_form(e, tol);
  if (nf.kind == FormKind::Indeterminate) return Tri::Indeterminate;
  return nf.kind == FormKind::Diagonal ? Tri::Yes : Tri::No;
}

LorentzNormalForm normal_form(const ChannelRep& e, const Tolerances& tol) {
  if (e.dim() != 2) throw DimensionError("normal_form: Lorentz normal forms are defined for qubits only");
  const auto cp = is_cp(e, tol);
  if (!cp.completely_positive)
    throw NotCompletelyPositive("normal_form: input is not completely positive", cp.min_eigenvalue);
  const RMatrix ptm = e.ptm();
  const RMatrix& g = lorentz_metric();
  const RMatrix r = ptm * phi_t();

  Eigen::JacobiSVD<RMatrix> rsvd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector sv = rsvd.singularValues();
  if (sv(1) < 1e-10 * sv(0)) {
    const RVector u = rsvd.matrixU().col(0), rv = rsvd.matrixV().col(0);
    const double gu = gdot(u, u), gr = gdot(rv, rv);
    if (gu < -kNullTol || gr < -kNullTol) throw NormalFormError("normal_form: rank-one map with spacelike factor");
    if (gu <= kNullTol || gr <= kNullTol) return assemble(ptm, rank_one_frames(u, rv, sv(0)), tol);
  }

  const RMatrix n = g * r.transpose() * g * r;
  const Spectrum sp = analyze(n);
  if (sp.diagonalizable == Tri::Indeterminate) {
    LorentzNormalForm nf;
    nf.kind = FormKind::Indeterminate;
    std::ostringstream msg;
    msg << "eigenvalue clusters of G R^T G R are neither clearly diagonalizable nor clearly defective:";
    for (const auto& c : sp.clusters) msg << " [lambda " << c.lambda << " x" << c.size << " resid " << c.resid << "]";
    nf.diagnostics = msg.str();
    return nf;
  }
  if (sp.diagonalizable == Tri::Yes) return assemble(ptm, diagonal_frames(r, sp), tol);
  return assemble(ptm, jordan_frames(r, n, sp), tol);
}

}  // namespace chandiv
