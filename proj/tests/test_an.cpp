#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace spectrakit;
using testgen::Rng;

namespace {

StructuredOperator harmonic(double c = 1.0) { return diag_op({{cplx{c, 0.0}, 1.0, 1.0}}); }

}  // namespace

TEST_CASE("classify") {
  ClassifyFlags id = classify(identity_op());
  CHECK(id.self_adjoint);
  CHECK(id.normal);
  CHECK(id.hyponormal);
  CHECK(id.positive);
  CHECK(!id.compact);

  ClassifyFlags ii = classify(scalar_op(cplx{0.0, 1.0}));
  CHECK(ii.normal);
  CHECK(!ii.self_adjoint);

  StructuredOperator shift2 = make_operator(0.0, 2, {0, cplx{1, 0}, 0, 0}, TailRule::zero());
  ClassifyFlags sh = classify(shift2);
  CHECK(!sh.hyponormal);
  CHECK(!sh.normal);
  CHECK(sh.compact);
}

TEST_CASE("is_norm_attaining") {
  AttainReport yes = is_norm_attaining(add(harmonic(), scalar_op(0.5)));
  CHECK(yes.verdict == Attainment::Yes);
  CHECK(yes.norm_value == doctest::Approx(1.5).epsilon(1e-12));
  REQUIRE(yes.witness.has_value());
  CHECK(std::abs(yes.witness->vector.at(1)) == doctest::Approx(1.0));
  CHECK(apply(add(harmonic(), scalar_op(0.5)), yes.witness->vector).norm() ==
        doctest::Approx(1.5).epsilon(1e-12));

  CHECK(is_norm_attaining(add(harmonic(), scalar_op(-1.0))).verdict == Attainment::No);
  CHECK(is_norm_attaining(zero_op()).verdict == Attainment::Yes);
}

TEST_CASE("an_check endpoint examples") {
  ANVerdict id = an_check(identity_op());
  REQUIRE(id.kind == ANVerdict::Kind::InAN);
  CHECK(id.triple->alpha == 1.0);
  CHECK(operator_norm(id.triple->k).value < 1e-12);
  CHECK(operator_norm(id.triple->f).value < 1e-12);

  ANVerdict plus = an_check(add(identity_op(), harmonic()));
  REQUIRE(plus.kind == ANVerdict::Kind::InAN);
  CHECK(plus.triple->alpha == 1.0);
  CHECK(operator_norm(sub(plus.triple->k, harmonic())).value < 1e-9);
  CHECK(operator_norm(plus.triple->f).value < 1e-9);

  ANVerdict minus = an_check(add(identity_op(), harmonic(-1.0)));
  REQUIRE(minus.kind == ANVerdict::Kind::NotAN);
  CHECK(minus.reason == NotANReason::InfinitelyManyBelowEssential);
  REQUIRE(minus.offenders.size() == 8);
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(minus.offenders[i] == doctest::Approx(1.0 - 1.0 / (i + 1)));

  FinVector e1 = FinVector::basis(1);
  ANVerdict rank1 = an_check(sub(identity_op(), scale(0.5, outer_op(e1, e1))));
  REQUIRE(rank1.kind == ANVerdict::Kind::InAN);
  CHECK(rank1.triple->alpha == 1.0);
  CHECK(operator_norm(rank1.triple->k).value < 1e-9);
  CHECK(operator_norm(sub(rank1.triple->f, scale(0.5, outer_op(e1, e1)))).value < 1e-9);
  CHECK(operator_norm(rank1.triple->f).value <= 1.0 + 1e-9);
}

TEST_CASE("an_reassemble") {
  ANTriple trivial{zero_op(), zero_op(), 1.0};
  CHECK(operator_norm(sub(an_reassemble(trivial), identity_op())).value < 1e-12);

  ANTriple bad{zero_op(), harmonic(), 1.0};  // F with a tail is not finite rank
  CHECK_THROWS_AS(an_reassemble(bad), invalid_triple);

  Rng rng(67);
  for (int c = 0; c < 10; ++c) {
    // K on tail + first block coord, F on the other block coords
    const double alpha = testgen::uniform(rng, 0.5, 2.0);
    std::vector<cplx> kb(9, cplx{0, 0}), fb(9, cplx{0, 0});
    kb[0] = {testgen::uniform(rng, 0.1, 2.0), 0.0};
    fb[4] = {testgen::uniform(rng, 0.1, 1.0) * alpha, 0.0};
    fb[8] = {testgen::uniform(rng, 0.1, 1.0) * alpha, 0.0};
    StructuredOperator k = make_operator(
        0.0, 3, kb, TailRule::from_terms({{cplx{testgen::uniform(rng, 0.1, 1.0), 0.0}, 0.7, 0.0}}));
    StructuredOperator f = make_operator(0.0, 3, fb, TailRule::zero());
    StructuredOperator t = an_reassemble({k, f, alpha});
    ANVerdict v = an_check(t);
    REQUIRE(v.kind == ANVerdict::Kind::InAN);
    CHECK(v.triple->alpha == alpha);
    CHECK(operator_norm(sub(an_reassemble(*v.triple), t)).value < 1e-9);
  }
}

TEST_CASE("adjoint invariance of the verdict kind") {
  Rng rng(71);
  auto kind_of = [&](const StructuredOperator& t) { return an_check(t).kind; };
  // InAN family
  for (int c = 0; c < 5; ++c) {
    StructuredOperator t =
        add(scalar_op(testgen::uniform(rng, 0.5, 2.0)),
            diag_op({{cplx{testgen::uniform(rng, 0.1, 1.0), 0.0}, 0.8, 0.0}}));
    CHECK(kind_of(t) == ANVerdict::Kind::InAN);
    CHECK(kind_of(adjoint(t)) == ANVerdict::Kind::InAN);
  }
  // NotAN family
  for (int c = 0; c < 5; ++c) {
    StructuredOperator t =
        add(scalar_op(testgen::uniform(rng, 0.5, 2.0)),
            diag_op({{cplx{-testgen::uniform(rng, 0.1, 0.4), 0.0}, 1.0, 1.0}}));
    CHECK(kind_of(t) == ANVerdict::Kind::NotAN);
    CHECK(kind_of(adjoint(t)) == ANVerdict::Kind::NotAN);
  }
  // Undecided family: symbolic tails with no usable sign certificate
  for (int c = 0; c < 5; ++c) {
    StructuredOperator base =
        add(scalar_op(2.0), diag_op({{testgen::random_cplx(rng, 0.4), 0.5, 0.0}}));
    StructuredOperator t = invert(base);
    CHECK(kind_of(t) == ANVerdict::Kind::Undecided);
    CHECK(kind_of(adjoint(t)) == ANVerdict::Kind::Undecided);
  }
}

TEST_CASE("null_space") {
  CHECK(null_space(identity_op()).empty());

  FinVector e1 = FinVector::basis(1);
  auto ker = null_space(sub(identity_op(), outer_op(e1, e1)));
  REQUIRE(ker.size() == 1);
  CHECK(std::abs(std::abs(ker[0].at(1)) - 1.0) < 1e-10);

  CHECK_THROWS_AS(null_space(zero_op()), uncertifiable_kernel);

  // designed kernel vector lands in range(F)
  Rng rng(73);
  for (int c = 0; c < 5; ++c) {
    const double alpha = testgen::uniform(rng, 0.5, 1.5);
    DenseMatrix u = testgen::random_unitary(rng, 3);
    FinVector v;
    for (std::int64_t i = 0; i < 3; ++i) v.set(i + 1, u.at(i, 0));
    FinVector w;
    for (std::int64_t i = 0; i < 3; ++i) w.set(i + 1, u.at(i, 1));
    StructuredOperator f = scale(-alpha, outer_op(v, v));
    // the diagonal part of K must live past the block so it misses v
    StructuredOperator k =
        add(scale(testgen::uniform(rng, 0.2, 1.0), outer_op(w, w)),
            make_operator(0.0, 3, std::vector<cplx>(9, cplx{0, 0}),
                          TailRule::from_terms({{cplx{0.3, 0.0}, 0.6, 0.0}})));
    StructuredOperator t = add(add(k, f), scalar_op(alpha));
    auto kernel = null_space(t);
    REQUIRE(kernel.size() == 1);
    // kernel vector parallel to v = range(F)
    const double overlap = std::abs(kernel[0].inner(v));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("triple parts commute with the polar isometry") {
  // normal InAN operator: |T| decomposition commutes with V
  Rng rng(79);
  for (int c = 0; c < 5; ++c) {
    const double alpha = testgen::uniform(rng, 0.8, 1.5);
    std::vector<cplx> b(4, cplx{0, 0});
    b[0] = {testgen::uniform(rng, 0.2, 1.0), 0.0};
    b[3] = {-testgen::uniform(rng, 0.2, 0.7) * alpha, 0.0};
    StructuredOperator t = make_operator(
        alpha, 2, b, TailRule::from_terms({{cplx{testgen::uniform(rng, 0.1, 0.5), 0.0}, 0.7, 0.0}}));
    PolarPair pp = polar(t);
    ANVerdict v = an_check(pp.modulus);
    REQUIRE(v.kind == ANVerdict::Kind::InAN);
    const StructuredOperator& k = v.triple->k;
    const StructuredOperator& f = v.triple->f;
    CHECK(operator_norm(sub(multiply(pp.v, k), multiply(k, pp.v))).value < 1e-8);
    CHECK(operator_norm(sub(multiply(pp.v, f), multiply(f, pp.v))).value < 1e-8);
    CHECK(operator_norm(sub(multiply(k, f), multiply(f, k))).value < 1e-8);
  }
}
