#include <doctest.h>

#include <cmath>

#include "chandiv/channel.hpp"
#include "chandiv/errors.hpp"
#include "support.hpp"

using namespace chandiv;

namespace {

RVector sorted_eigs(const CMatrix& m) {
  RVector ev = hermitian_eigenvalues(m);
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

}  // namespace

TEST_CASE("identity Choi is d times the Bell projector") {
  for (int d : {2, 3, 4}) {
    const RVector ev = sorted_eigs(identity_channel(d).choi());
    CHECK(ev(ev.size() - 1) == doctest::Approx(d).epsilon(1e-12));
    CHECK(ev.head(ev.size() - 1).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(kraus_rank(identity_channel(d)) == 1);
  }
}

TEST_CASE("transposition-like PTM is not CP") {
  RMatrix t = RMatrix::Identity(4, 4);
  t(3, 3) = -1;
  const ChannelRep c = ChannelRep::from_ptm(t);
  const RVector ev = sorted_eigs(c.choi());
  const double want[] = {-1, 1, 1, 1};
  for (int k = 0; k < 4; ++k) CHECK(ev(k) == doctest::Approx(want[k]).epsilon(1e-12));
  const CpCheck cp = is_cp(c);
  CHECK_FALSE(cp.completely_positive);
  CHECK(cp.min_eigenvalue == doctest::Approx(-1.0));
  CHECK_THROWS_AS(kraus_rank(c), NotCompletelyPositive);
  CHECK_THROWS_AS(require_channel(c, {}, "test"), NotCompletelyPositive);
}

TEST_CASE("universal NOT has Choi spectrum {0, 2/3, 2/3, 2/3}") {
  const ChannelRep n = universal_not();
  const RVector ev = sorted_eigs(n.choi());
  CHECK(std::abs(ev(0)) < 1e-12);
  for (int k = 1; k < 4; ++k) CHECK(ev(k) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(kraus_rank(n) == 3);
  CHECK(determinant(n) == doctest::Approx(-1.0 / 27).epsilon(1e-12));
  CHECK((n.ptm() - RVector((RVector(4) << 1, -1.0 / 3, -1.0 / 3, -1.0 / 3).finished()).asDiagonal().toDenseMatrix())
            .norm() < 1e-12);
}

TEST_CASE("phase-damped PTM diag(1,0,0,3/4) Choi diagonal") {
  const ChannelRep c = pauli_channel(0, 0, 0.75);
  const CMatrix choi = c.choi();
  const double want[] = {0.875, 0.125, 0.125, 0.875};
  for (int k = 0; k < 4; ++k) {
    CHECK(choi(k, k).real() == doctest::Approx(want[k]).epsilon(1e-12));
  }
  CHECK((choi - CMatrix(choi.diagonal().asDiagonal())).norm() < 1e-12);
}

TEST_CASE("completely depolarizing channel") {
  std::mt19937_64 rng(3);
  for (int d : {2, 3, 5}) {
    const ChannelRep n = completely_depolarizing(d);
    const CMatrix rho = testsupport::random_density(rng, d);
    CHECK((n.apply(rho) - CMatrix::Identity(d, d) / double(d)).norm() < 1e-12);
    CHECK(kraus_rank(n) == d * d);
    CHECK(is_tp(n));
  }
}

TEST_CASE("qubit operator basis is I, X, Y, Z over sqrt 2") {
  const auto& b = operator_basis(2);
  REQUIRE(b.size() == 4);
  const double s = 1 / std::sqrt(2.0);
  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  CHECK((b[0] - s * CMatrix::Identity(2, 2)).norm() < 1e-15);
  CHECK((b[1] - s * x).norm() < 1e-15);
  CHECK((b[2] - s * y).norm() < 1e-15);
  CHECK((b[3] - s * z).norm() < 1e-15);
}

TEST_CASE("generalized Gell-Mann basis is orthonormal") {
  for (int d : {2, 3, 4}) {
    const auto& b = operator_basis(d);
    REQUIRE(int(b.size()) == d * d);
    for (int i = 0; i < d * d; ++i)
      for (int j = 0; j < d * d; ++j) {
        const cplx ip = (b[i].adjoint() * b[j]).trace();
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
  }
}

TEST_CASE("compose applies the right factor first") {
  std::mt19937_64 rng(11);
  const ChannelRep a = testsupport::random_channel(rng, 2, 2);
  const ChannelRep b = testsupport::random_channel(rng, 2, 3);
  const CMatrix rho = testsupport::random_density(rng, 2);
  CHECK((compose(a, b).apply(rho) - a.apply(b.apply(rho))).norm() < 1e-12);
  CHECK((compose_all({a, b, a}).apply(rho) - a.apply(b.apply(a.apply(rho)))).norm() < 1e-12);
  CHECK_THROWS_AS(compose(a, identity_channel(3)), DimensionError);
}

TEST_CASE("Kraus extraction reproduces the channel") {
  std::mt19937_64 rng(5);
  for (int k = 1; k <= 4; ++k) {
    const ChannelRep c = testsupport::random_channel(rng, 2, k);
    const auto ks = c.kraus();
    CHECK(int(ks.size()) == k);
    CHECK((ChannelRep::from_kraus(ks).superop() - c.superop()).norm() < 1e-10);
  }
}

TEST_CASE("unitary channels have Kraus rank one") {
  std::mt19937_64 rng(8);
  const ChannelRep u = unitary_channel(testsupport::random_unitary(rng, 3));
  CHECK(kraus_rank(u) == 1);
  CHECK(std::abs(std::abs(determinant(u)) - 1.0) < 1e-10);
}

TEST_CASE("named constructors") {
  CHECK((make_named("not").superop() - universal_not().superop()).norm() < 1e-14);
  CHECK((make_named("identity", {{"d", 3}}).superop() - identity_channel(3).superop()).norm() < 1e-14);
  CHECK((make_named("bit_flip", {{"lambda", 0.75}}).ptm() -
         RVector((RVector(4) << 1, 1, 0.75, 0.75).finished()).asDiagonal().toDenseMatrix())
            .norm() < 1e-14);
  CHECK_THROWS_AS(make_named("no-such-channel"), InvalidArgument);
  CHECK_THROWS_AS(make_named("pauli", {{"eta1", 1}, {"eta2", 1}, {"eta3", -1}}), NotCompletelyPositive);
}

TEST_CASE("tolerance validation") {
  Tolerances t;
  t.eig_zero = -1;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
}

TEST_CASE("representation names round trip") {
  for (auto r : {Representation::Ptm, Representation::Choi, Representation::Kraus, Representation::Superop})
    CHECK(representation_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(representation_from_string("chi"), InvalidArgument);
}
