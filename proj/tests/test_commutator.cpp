#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace spectrakit;
using testgen::Rng;

namespace {

StructuredOperator swap_block() {
  return make_operator(0.0, 2, {0, cplx{1, 0}, cplx{1, 0}, 0}, TailRule::zero());
}

/// s * (u (x) v + v (x) u) for orthonormal u, v: a rotated swap, norm s,
/// with maximizing vectors orthogonal to their images.
StructuredOperator rotated_swap(Rng& rng, std::int64_t dim, double s) {
  DenseMatrix q = testgen::random_unitary(rng, dim);
  FinVector u, v;
  for (std::int64_t i = 0; i < dim; ++i) {
    u.set(i + 1, q.at(i, 0));
    v.set(i + 1, q.at(i, 1));
  }
  return scale(s, add(outer_op(u, v), outer_op(v, u)));
}

}  // namespace

TEST_CASE("maximizer_single") {
  MaximizerReport m = maximizer_single(swap_block());
  CHECK(m.target == doctest::Approx(2.0));
  CHECK(m.achieved == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(operator_norm(m.x).value <= 1.0 + 1e-9);
  REQUIRE(!m.witnesses.empty());
  CHECK(std::abs(m.witnesses[0].value) < 1e-9);

  MaximizerReport m3 = maximizer_single(scale(3.0, swap_block()));
  CHECK(m3.achieved == doctest::Approx(6.0).epsilon(1e-9));

  CHECK_THROWS_AS(maximizer_single(identity_op()), precondition_failed);
  CHECK_THROWS_AS(maximizer_single(make_operator(0.0, 2, {0, cplx{1, 0}, 0, 0}, TailRule::zero())),
                  precondition_failed);  // not hyponormal
}

TEST_CASE("maximizer_single on rotated variants") {
  Rng rng(83);
  for (int c = 0; c < 10; ++c) {
    const double s = testgen::uniform(rng, 0.5, 3.0);
    MaximizerReport m = maximizer_single(rotated_swap(rng, 4, s));
    CHECK(std::abs(m.achieved - 2.0 * s) < 1e-7);
  }
}

TEST_CASE("maximizer_pair dependent case") {
  FinVector e1 = FinVector::basis(1);
  StructuredOperator s = outer_op(e1, e1);
  StructuredOperator t = scale(-1.0, outer_op(e1, e1));
  MaximizerReport m = maximizer_pair(s, t);
  CHECK(m.target == doctest::Approx(2.0));
  CHECK(m.achieved == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("maximizer_pair independent case") {
  // swaps on disjoint coordinate pairs: both witnesses have zero form
  StructuredOperator s = swap_block();
  std::vector<cplx> tb(16, cplx{0, 0});
  tb[2 * 4 + 3] = 1.0;
  tb[3 * 4 + 2] = 1.0;
  StructuredOperator t = make_operator(0.0, 4, tb, TailRule::zero());
  MaximizerReport m = maximizer_pair(s, t);
  CHECK(m.target == doctest::Approx(2.0));
  CHECK(m.achieved == doctest::Approx(2.0).epsilon(1e-8));
  // partial isometry and homogeneity
  DenseMatrix x = truncate(m.x, 6);
  CHECK((x * x.adjoint() * x - x).frobenius() < 1e-8);

  MaximizerReport ms = maximizer_pair(scale(2.0, s), scale(3.0, t));
  CHECK(ms.achieved == doctest::Approx(2.0 + 3.0).epsilon(1e-8));
}

TEST_CASE("maximizer_pair rejects mismatched phases") {
  // <S zeta, zeta>/||S|| = 1 for every maximizer of I; T likewise: sum is 2
  CHECK_THROWS_AS(maximizer_pair(identity_op(), identity_op()), phase_condition_failed);
}

TEST_CASE("maximizer_sandwich") {
  MaximizerReport m = maximizer_sandwich(identity_op(), identity_op());
  CHECK(m.achieved == doctest::Approx(1.0).epsilon(1e-10));

  FinVector e1 = FinVector::basis(1);
  StructuredOperator s = scale(2.0, outer_op(e1, e1));
  StructuredOperator t = scale(3.0, outer_op(e1, e1));
  MaximizerReport m6 = maximizer_sandwich(s, t);
  CHECK(m6.target == doctest::Approx(6.0));
  CHECK(m6.achieved == doctest::Approx(6.0).epsilon(1e-9));

  MaximizerReport mz = maximizer_sandwich(zero_op(), identity_op());
  CHECK(mz.target == 0.0);
  CHECK(mz.achieved < 1e-12);

  CHECK_THROWS_AS(maximizer_sandwich(add(identity_op(), diag_op({{cplx{-1.0, 0.0}, 1.0, 1.0}})),
                                     identity_op()),
                  norm_not_attained);
}

TEST_CASE("triangle inequality upper bound") {
  Rng rng(89);
  for (int c = 0; c < 5; ++c) {
    const double s = testgen::uniform(rng, 0.5, 2.0);
    MaximizerReport m = maximizer_single(rotated_swap(rng, 3, s));
    const double xnorm = operator_norm(m.x).value;
    CHECK(m.achieved <= 2.0 * s * xnorm + 1e-9);
  }
}
