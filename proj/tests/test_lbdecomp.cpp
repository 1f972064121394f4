#include <doctest.h>

#include <cmath>

#include "chandiv/errors.hpp"
#include "chandiv/lbdecomp.hpp"
#include "support.hpp"

using namespace chandiv;

TEST_CASE("completely depolarizing qubit: t_min = ln 2 and the displayed factors") {
  const LBDecomposition d = lb_decompose_auto(completely_depolarizing(2));
  CHECK(d.t_min == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  RMatrix markov(4, 4), boundary = RMatrix::Zero(4, 4);
  markov << 1, 0, 0, 0, 0, 0.5, 0, 0, 0, 0, 0.5, 0, 0.5, 0, 0, 0.5;
  boundary(0, 0) = 1;
  boundary(3, 0) = -1;
  CHECK((d.markov_factor().ptm() - markov).norm() < 1e-9);
  CHECK((d.boundary.ptm() - boundary).norm() < 1e-9);
  CHECK(recomposition_error(completely_depolarizing(2), d) < 1e-9);
}

TEST_CASE("t_min = log(d/(d-1)) and boundary rank d^2 - d") {
  for (int d = 2; d <= 5; ++d) {
    const LBDecomposition dec = lb_decompose_auto(completely_depolarizing(d));
    CHECK(dec.t_min == doctest::Approx(std::log(double(d) / (d - 1))).epsilon(1e-9));
    CHECK(kraus_rank(dec.boundary) == d * d - d);
  }
}

TEST_CASE("nonsingular input uses the determinant bracket") {
  std::mt19937_64 rng(17);
  const ChannelRep e = testsupport::random_channel(rng, 2, 4);
  const GeneratorChoice g = select_generator(e);
  CHECK_FALSE(g.singular);
  const double t_prime = std::log(std::abs(determinant(e))) / generator_superop(g.generator).trace().real();
  CHECK(g.bracket_hint == doctest::Approx(t_prime));
  const LBDecomposition dec = lb_decompose_auto(e);
  CHECK(dec.t_min > 0);
  CHECK(dec.t_min <= t_prime + 1e-9);
  CHECK(recomposition_error(e, dec) < 1e-9);
  CHECK(kraus_rank(dec.boundary) < 4);
  CHECK(std::abs(dec.min_choi_eig_at_tmin) < 1e-8);
}

TEST_CASE("boundary input returns t_min = 0") {
  const ChannelRep e = universal_not();
  const LBDecomposition dec = lb_decompose(e, make_depolarizing_generator(2, 1.0));
  CHECK(dec.t_min == 0.0);
  CHECK((dec.boundary.superop() - e.superop()).norm() == 0.0);
  CHECK_FALSE(dec.generator.has_dissipation());
}

TEST_CASE("unitary input is refused by the automatic decomposition") {
  CHECK_THROWS_AS(lb_decompose_auto(identity_channel(2)), UnitaryInput);
}

TEST_CASE("right-sided decomposition of N is impossible") {
  CVector psi(2);
  psi << 1, 0;
  LbOptions opts;
  opts.side = Side::Right;
  CHECK_THROWS_AS(lb_decompose(completely_depolarizing(2), make_psi_generator(psi, 1.0), {}, opts), DegenerateFamily);
  const auto rows = crossing_scan(completely_depolarizing(2), make_psi_generator(psi, 1.0), 5.0, 11, Side::Right);
  for (const auto& r : rows) CHECK(r.min_choi_eig == doctest::Approx(0.5));
}

TEST_CASE("Hamiltonian-only generator cannot leave CP") {
  CMatrix h(2, 2);
  h << 1, 0, 0, -1;
  CHECK_THROWS_AS(lb_decompose(pauli_channel(0.5, 0.5, 0.5), LindbladGenerator(h, CMatrix::Zero(3, 3))),
                  DegenerateFamily);
}

TEST_CASE("short horizon still finds the crossing by doubling") {
  LbOptions opts;
  opts.t_max = 0.01;
  const LBDecomposition d = lb_decompose(pauli_channel(0.5, 0.5, 0.5), make_depolarizing_generator(2, 1.0), {}, opts);
  CHECK(d.t_min == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("non-CP input is rejected") {
  RMatrix t = RMatrix::Identity(4, 4);
  t(3, 3) = -1;
  CHECK_THROWS_AS(lb_decompose_auto(ChannelRep::from_ptm(t)), NotCompletelyPositive);
}

TEST_CASE("crossing scan grid and sign change") {
  const auto rows = crossing_scan(pauli_channel(0.5, 0.5, 0.5), make_depolarizing_generator(2, 1.0), 2.0, 5);
  REQUIRE(rows.size() == 5);
  CHECK(rows.front().t == 0.0);
  CHECK(rows.back().t == 2.0);
  CHECK(rows[1].t == doctest::Approx(0.5));
  CHECK(rows.front().is_cp);
  CHECK_FALSE(rows.back().is_cp);
  CHECK(rows.front().det == doctest::Approx(0.125));
  CHECK_THROWS_AS(crossing_scan(universal_not(), make_depolarizing_generator(2, 1.0), 1.0, 1), InvalidArgument);
}

TEST_CASE("amplitude damping generator as the family") {
  const LindbladGenerator ad = make_amplitude_damping_generator({1.0}, CMatrix::Identity(2, 2));
  const ChannelRep e = compose(exp_generator(ad, 0.4), pauli_channel(0.2, 0.3, 0.1));
  const LBDecomposition d = lb_decompose(e, ad);
  CHECK(d.t_min > 0.4 - 1e-8);
  CHECK(recomposition_error(e, d) < 1e-9);
}
