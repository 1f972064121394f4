// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "chandiv/dilation.hpp"
#include "chandiv/divisibility.hpp"
#include "chandiv/errors.hpp"
#include "chandiv/lbdecomp.hpp"
#include "chandiv/lindblad.hpp"
#include "chandiv/lorentz.hpp"
#include "support.hpp"

using namespace chandiv;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

RMatrix ptm_of(std::initializer_list<std::initializer_list<double>> rows) {
  RMatrix m(rows.size(), rows.size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

CVector ket0(int d) {
  CVector v = CVector::Zero(d);
  v(0) = 1;
  return v;
}

bool in_tetrahedron(double a, double b, double c) {
  const double m = 1e-12;
  return 1 + a + b + c >= -m && 1 + a - b - c >= -m && 1 - a + b - c >= -m && 1 - a - b + c >= -m;
}

ChannelRep flanked(std::mt19937_64& rng, const ChannelRep& e) {
  return compose_all({unitary_channel(testsupport::random_unitary(rng, 2)), e,
                      unitary_channel(testsupport::random_unitary(rng, 2))});
}

void c1(Check& c) {
  const ChannelRep n = completely_depolarizing(2);
  const LBDecomposition d = lb_decompose(n, make_psi_generator(ket0(2), 1.0));
  c.expect(std::abs(d.t_min - std::log(2.0)) < 1e-9, "t_min off");
  const RMatrix markov = ptm_of({{1, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 0.5, 0}, {0.5, 0, 0, 0.5}});
  const RMatrix boundary = ptm_of({{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {-1, 0, 0, 0}});
  c.expect((d.markov_factor().ptm() - markov).cwiseAbs().maxCoeff() < 1e-9, "Markov factor differs");
  c.expect((d.boundary.ptm() - boundary).cwiseAbs().maxCoeff() < 1e-9, "boundary differs");
}

void c2(Check& c) {
  for (int d = 2; d <= 5; ++d) {
    const LBDecomposition r = lb_decompose(completely_depolarizing(d), make_psi_generator(ket0(d), 1.0));
    c.expect(std::abs(r.t_min - std::log(double(d) / (d - 1))) < 1e-8, "t_min off at d=" + std::to_string(d));
    c.expect(kraus_rank(r.boundary) == d * d - d, "boundary rank off at d=" + std::to_string(d));
  }
}

void c3(Check& c) {
  int lattice = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      for (int k = 0; k < 20; ++k) {
        const double a = -1 + 2.0 * i / 19, b = -1 + 2.0 * j / 19, e = -1 + 2.0 * k / 19;
        if (!in_tetrahedron(a, b, e) || !check_pauli_infdiv({a, b, e}).infinitesimally_divisible) continue;
        ++lattice;
        const ChannelRep ch = pauli_channel(a, b, e);
        const auto fs = factor_rank2(ch);
        for (const auto& f : fs) c.expect(kraus_rank(f) <= 2, "factor rank above 2");
        c.expect((compose_all(fs).superop() - ch.superop()).norm() < 1e-9, "recomposition error");
      }
  c.expect(lattice > 100, "lattice too sparse");

  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1, 1);
  int made = 0;
  while (made < 100) {
    const double a = u(rng), b = u(rng), e = u(rng);
    if (a * b * e >= -1e-3 || !in_tetrahedron(a, b, e)) continue;
    if (1 + a + b + e < 0.05 || 1 + a - b - e < 0.05 || 1 - a + b - e < 0.05 || 1 - a - b + e < 0.05) continue;
    const ChannelRep ch = flanked(rng, pauli_channel(a, b, e));
    ++made;
    bool refused = false;
    try {
      factor_rank2(ch);
    } catch (const NotInfinitesimallyDivisible&) {
      refused = true;
    }
    c.expect(refused, "factor_rank2 accepted a channel outside C^CP");
    const LBDecomposition d = lb_decompose_auto(ch);
    c.expect(recomposition_error(ch, d) < 1e-8, "LB recomposition error");
    c.expect(classify(d.boundary).label == ClassLabel::Indivisible, "boundary not indivisible");
  }
}

void c4(Check& c) {
  auto rank_is = [&](MParams p, int want, const char* tag) {
    const ChannelRep m = make_m_form(p);
    c.expect(is_cp(m).completely_positive, std::string("not CP in case ") + tag);
    const int r = kraus_rank(m);
    if (r != want) {
      std::ostringstream s;
      s << "case " << tag << " (v,x,z)=(" << p.v << "," << p.x << "," << p.z << ") rank " << r << " expected " << want;
      c.expect(false, s.str());
    }
  };
  for (int iz = 0; iz < 10; ++iz) {
    const double z = iz / 10.0;
    for (int iv = 0; iv <= 10; ++iv) {
      const double v = -1 + (z + 1) * (iv + (iv == 0 ? 0.05 : 0)) / 10;  // v in (-1, z]
      const bool edge = iv == 10;
      for (int ix = 1; ix < 10; ++ix) rank_is({v, -1 + ix / 5.0, z}, edge ? 2 : 3, "i");
      for (double x : {-1.0, 1.0}) rank_is({v, x, z}, edge ? 1 : 2, "ii");
    }
    rank_is({-1, 0, z}, 2, "iii");
  }
  for (int iv = 0; iv <= 10; ++iv) {
    const double v = -1 + iv / 5.0;
    rank_is({v, 0, 1}, (iv == 0 || iv == 10) ? 1 : 2, "iv");
  }
}

void c5(Check& c) {
  double worst = 0;
  for (int iz = 0; iz < 10; ++iz)
    for (int iv = 1; iv <= 10; ++iv)
      for (int ix = 1; ix < 20; ++ix) {
        const double z = iz / 10.0, v = -1 + (z + 1) * iv / 10, x = -1 + ix / 10.0;
        const RMatrix d = RVector((RVector(4) << 1, x, x, 1).finished()).asDiagonal();
        worst = std::max(worst, (m_form_matrix({v, x, z}) - m_form_matrix({v, 1, z}) * d).norm());
      }
  c.expect(worst < 1e-12, "patch identity fails");
}

void c6(Check& c) {
  c.expect(classify(universal_not()).label == ClassLabel::Indivisible, "E_NOT not indivisible");
  const ChannelRep sq = compose(universal_not(), universal_not());
  c.expect(classify(sq).label == ClassLabel::InfinitesimallyDivisible, "E_NOT^2 not infinitesimally divisible");
  const NDivisibility n7 = n_divisibility_status(sq, 7);
  c.expect(n7.divisible && n7.witness.size() == 7, "no 7-factor witness");
  for (const auto& f : n7.witness) c.expect(is_cp(f).completely_positive && is_tp(f), "witness factor not a channel");
  if (!n7.witness.empty()) c.expect((compose_all(n7.witness).superop() - sq.superop()).norm() < 1e-9, "witness mismatch");
  c.expect(classify(identity_channel(2)).label == ClassLabel::Unitary, "identity not unitary");
}

void c7(Check& c) {
  const DilationCircuit circ = build_circuit({bit_flip(0.75), pauli_channel(0, 0, 1)});
  const RMatrix target = pauli_channel(0, 0, 0.75).ptm();
  c.expect((simulate_tomography(circ, 0, 0).reconstructed_ptm - target).norm() < 1e-10, "exact round trip");
  CMatrix theo = CMatrix::Zero(4, 4);
  theo(0, 0) = theo(3, 3) = 0.875;
  theo(1, 1) = theo(2, 2) = 0.125;
  double lo = 1, sum = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const double f = choi_fidelity(theo, simulate_tomography(circ, 20000, s).reconstructed_choi).value;
    lo = std::min(lo, f);
    sum += f;
  }
  c.expect(sum / 10 >= 0.995, "mean fidelity below 0.995");
  c.expect(lo >= 0.99, "min fidelity below 0.99");
}

void c8(Check& c) {
  CMatrix ub = CMatrix::Zero(4, 4);
  ub(0, 2) = ub(1, 1) = ub(2, 0) = ub(3, 3) = 1;
  const double lam = 0.75, gm = std::sqrt((1 - lam) / 2), gp = std::sqrt((1 + lam) / 2);
  CMatrix ul(4, 4);
  ul << 0, gm, 0, -gp, gm, 0, -gp, 0, gp, 0, gm, 0, 0, gp, 0, gm;
  c.expect(verify_dilation(ub, pauli_channel(0, 0, 1)) < 1e-9, "U_boundary fails");
  c.expect(verify_dilation(ul, bit_flip(lam)) < 1e-9, "U_eL fails");
}

void c9(Check& c) {
  LbOptions o;
  o.side = Side::Right;
  bool raised = false;
  try {
    lb_decompose(completely_depolarizing(2), make_psi_generator(ket0(2), 1.0), {}, o);
  } catch (const DegenerateFamily&) {
    raised = true;
  }
  c.expect(raised, "right-sided family of N not reported as degenerate");
  const auto scan = crossing_scan(completely_depolarizing(2), make_psi_generator(ket0(2), 1.0), 5.0, 11, Side::Right, {});
  for (const auto& s : scan) c.expect(std::abs(s.min_choi_eig - 0.5) < 1e-12, "right family not constant");
}

void c10(Check& c) {
  std::mt19937_64 rng(1010);
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 3;
    const ChannelRep e = testsupport::random_channel(rng, d, 1 + k % (d * d));
    const ChannelRep back = ChannelRep::from_kraus(ChannelRep::from_choi(ChannelRep::from_ptm(e.ptm()).choi()).kraus());
    c.expect((back.superop() - e.superop()).norm() < 1e-10, "representation round trip");
  }
  std::uniform_real_distribution<double> u(0, 2);
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 2, n = d * d - 1;
    const CMatrix a = testsupport::ginibre(rng, n, n), h = testsupport::ginibre(rng, d, d);
    const LindbladGenerator g(0.5 * (h + h.adjoint()), a * a.adjoint() / double(n));
    const double s = u(rng), t = u(rng);
    c.expect((exp_generator(g, s + t).superop() - compose(exp_generator(g, s), exp_generator(g, t)).superop()).norm() < 1e-8,
             "semigroup law");
  }
  for (int k = 0; k < 100; ++k) {
    const ChannelRep a = testsupport::random_channel(rng, 2, 1 + k % 4), b = testsupport::random_channel(rng, 2, 1 + (k / 4) % 4);
    const double rhs = determinant(a) * determinant(b);
    c.expect(std::abs(determinant(compose(a, b)) - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)), "det multiplicativity");
  }
  for (int k = 0; k < 100; ++k) {
    const ChannelRep e = k % 2 ? testsupport::random_channel(rng, 2, 2 + k % 3)
                               : pauli_channel(0.4 - 0.005 * k, 0.3, k % 4 == 0 ? -0.1 : 0.2);
    c.expect(classify(flanked(rng, e)).label == classify(e).label, "class label changed under unitaries");
  }
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Check&)>> criteria[] = {
      {"depolarizing LB decomposition, d=2", c1},
      {"t_min = log(d/(d-1)) and boundary rank d^2-d for d=2..5", c2},
      {"rank-2 factorization on the C^CP lattice; refusal outside", c3},
      {"M-form Kraus-rank case table", c4},
      {"M-form patch identity", c5},
      {"classification regression", c6},
      {"tomography round trip and sampled fidelity", c7},
      {"displayed dilation unitaries verify", c8},
      {"right-sided decomposition of N is degenerate", c9},
      {"property suites", c10},
  };
  int failures = 0, id = 0;
  for (const auto& [name, fn] : criteria) {
    ++id;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& ex) {
      c.expect(false, std::string("threw: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " (" << secs << " s)";
    if (!c.ok) std::cout << " -- " << c.why.str();
    std::cout << '\n';
    failures += !c.ok;
  }
  return failures;
}
