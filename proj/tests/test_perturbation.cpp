#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace spectrakit;
using testgen::Rng;

TEST_CASE("slice_projections") {
  SliceProjections id = slice_projections(identity_op(), 0.4);
  CHECK(operator_norm(sub(id.p_rho, identity_op())).value < 1e-12);
  CHECK(operator_norm(id.p_gamma).value < 1e-12);

  // diag(1, 0.9, 0.5, 0.1, tail): cut 0.8, rho spans {e1, e2}
  StructuredOperator l = make_operator(
      0.0, 4, {cplx{1, 0}, 0, 0, 0, 0, cplx{0.9, 0}, 0, 0, 0, 0, cplx{0.5, 0}, 0, 0, 0, 0, cplx{0.1, 0}},
      TailRule::from_terms({{cplx{0.05, 0.0}, 0.5, 0.0}}));
  SliceProjections sp = slice_projections(l, 0.4);
  CHECK(std::abs(sp.p_rho.entry(1, 1) - cplx{1.0, 0.0}) < 1e-10);
  CHECK(std::abs(sp.p_rho.entry(2, 2) - cplx{1.0, 0.0}) < 1e-10);
  CHECK(std::abs(sp.p_rho.entry(3, 3)) < 1e-10);
  CHECK(std::abs(sp.p_gamma.entry(3, 3) - cplx{1.0, 0.0}) < 1e-10);
  CHECK(sp.p_rho.scalar() == cplx{0.0, 0.0});

  // partition of unity + idempotence + orthogonality, dense
  Rng rng(97);
  for (int c = 0; c < 10; ++c) {
    StructuredOperator lc = testgen::random_positive_contraction(rng);
    SliceProjections s = slice_projections(lc, testgen::uniform(rng, 0.1, 1.5));
    DenseMatrix g = truncate(s.p_gamma, 12), r = truncate(s.p_rho, 12);
    CHECK((g + r - DenseMatrix::identity(12)).frobenius() < 1e-10);
    CHECK((g * g - g).frobenius() < 1e-10);
    CHECK((r * r - r).frobenius() < 1e-10);
    CHECK((g * r).frobenius() < 1e-10);
    CHECK(g.hermitian_defect() < 1e-10);
  }

  CHECK_THROWS_AS(slice_projections(scalar_op(-1.0), 0.4), not_positive);
}

TEST_CASE("flatten_top") {
  FlattenResult id = flatten_top(identity_op(), 0.4);
  CHECK(operator_norm(sub(id.j, identity_op())).value < 1e-12);
  CHECK(!id.empty_top);

  StructuredOperator l = make_operator(
      0.0, 4, {cplx{1, 0}, 0, 0, 0, 0, cplx{0.9, 0}, 0, 0, 0, 0, cplx{0.5, 0}, 0, 0, 0, 0, cplx{0.1, 0}},
      TailRule::from_terms({{cplx{0.05, 0.0}, 0.5, 0.0}}));
  FlattenResult f = flatten_top(l, 0.4);
  CHECK(std::abs(f.j.entry(1, 1) - cplx{1.0, 0.0}) < 1e-10);
  CHECK(std::abs(f.j.entry(2, 2) - cplx{1.0, 0.0}) < 1e-10);
  CHECK(std::abs(f.j.entry(3, 3) - cplx{0.5, 0.0}) < 1e-10);
  CHECK(operator_norm(sub(f.j, l)).value == doctest::Approx(0.1).epsilon(1e-10));

  // empty top slice: L bounded by 0.5, cut 0.8
  StructuredOperator small = scale(0.5, identity_op());
  FlattenResult fe = flatten_top(small, 0.4);
  CHECK(fe.empty_top);
}

TEST_CASE("attainify constructive path") {
  StructuredOperator s = add(identity_op(), diag_op({{cplx{-1.0, 0.0}, 1.0, 2.0}}));
  PerturbationCertificate cert = attainify(s, 0.1, std::nullopt);
  CHECK(cert.distance == doctest::Approx(0.04));  // entry 5 moves from 1 - 1/25 to 1
  CHECK(cert.eta.vector.at(5) != cplx{0.0, 0.0});
  CHECK(cert.norm_preserved == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(cert.beta_achieved == cplx{1.0, 0.0});
  CHECK(apply(cert.z, cert.eta.vector).norm() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(operator_norm(sub(cert.z, s)).value == doctest::Approx(cert.distance).epsilon(1e-12));

  // explicit beta equal to the essential value
  PerturbationCertificate c2 = attainify(s, 0.1, cplx{1.0, 0.0});
  CHECK(c2.distance < 0.1);

  CHECK_THROWS_AS(attainify(s, 0.1, cplx{0.0, 0.0}), beta_outside_essential_range);
}

TEST_CASE("attainify trivial path") {
  StructuredOperator s = identity_op();
  PerturbationCertificate cert = attainify(s, 0.5, std::nullopt);
  CHECK(cert.distance == 0.0);
  CHECK(cert.norm_preserved == doctest::Approx(1.0));
}

TEST_CASE("monotone refinement of the correction index") {
  // larger admissible n* never increases the distance (envelope monotone)
  StructuredOperator s = add(identity_op(), diag_op({{cplx{-1.0, 0.0}, 1.0, 2.0}}));
  double prev = 1.0;
  for (double alpha : {0.5, 0.1, 0.05}) {
    PerturbationCertificate cert = attainify(s, alpha, std::nullopt);
    CHECK(cert.distance <= prev + 1e-15);
    prev = cert.distance;
  }
}
