#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace spectrakit;
using testgen::Rng;

namespace {

StructuredOperator harmonic(double c = 1.0) { return diag_op({{cplx{c, 0.0}, 1.0, 1.0}}); }

}  // namespace

TEST_CASE("tail_bounds sign-tag paths") {
  TailRule pos = TailRule::from_terms({{cplx{1.0, 0.0}, 1.0, 1.0}});  // 1/n
  TailBounds tb = tail_bounds(pos, 0, 1e-12);
  CHECK(tb.sup_att == TailAttain::Attained);
  CHECK(tb.sup_lo == 1.0);
  CHECK(tb.sup_idx == 1);
  CHECK(tb.inf_att == TailAttain::NotAttained);
  CHECK(tb.inf_lo == 0.0);

  TailRule neg = TailRule::from_terms({{cplx{-1.0, 0.0}, 1.0, 2.0}});
  TailBounds tn = tail_bounds(neg, 0, 1e-12);
  CHECK(tn.inf_att == TailAttain::Attained);
  CHECK(tn.inf_lo == -1.0);
  CHECK(tn.sup_att == TailAttain::NotAttained);
  CHECK(tn.sup_hi == 0.0);

  TailBounds tz = tail_bounds(TailRule::zero(), 3, 1e-12);
  CHECK(tz.sup_att == TailAttain::Attained);
  CHECK(tz.sup_idx == 4);

  // mixed-sign rule routed through the evaluation scan
  TailRule mixed = TailRule::from_terms({{cplx{0.0, 1.0}, 0.5, 0.0}});
  TailBounds tm = tail_bounds(mixed, 0, 1e-12);
  CHECK(tm.sup_hi >= 0.0);
  CHECK(tm.inf_lo <= 0.0);
}

TEST_CASE("operator_norm attainment verdicts") {
  NormReport id = operator_norm(identity_op());
  CHECK(id.value == doctest::Approx(1.0));
  CHECK(id.attainment == Attainment::Yes);

  NormReport h = operator_norm(harmonic());
  CHECK(h.value == doctest::Approx(1.0));
  CHECK(h.attainment == Attainment::Yes);
  CHECK(h.witness->at(1) != cplx{0.0, 0.0});

  // entries 1 - 1/n approach but never reach 1
  NormReport no = operator_norm(add(identity_op(), harmonic(-1.0)));
  CHECK(no.value == doctest::Approx(1.0));
  CHECK(no.attainment == Attainment::No);

  // a zero deviation entry at the essential value is still an exact eigenvector
  StructuredOperator at_ess =
      make_operator(1.0, 1, {cplx{0.0, 0.0}}, TailRule::from_terms({{cplx{-1.0, 0.0}, 1.0, 1.0}}));
  CHECK(operator_norm(at_ess).attainment == Attainment::Yes);

  // two rates whose sign only settles astronomically far out: the certificate
  // degrades to an uncertifiable scan and the verdict stays open
  StructuredOperator amb = add(
      scalar_op(1.0), diag_op({{cplx{-1.0, 0.0}, 0.999999, 0.0}, {cplx{1.0, 0.0}, 1.0, 1.0}}));
  CHECK(operator_norm(amb).attainment == Attainment::Undecided);
}

TEST_CASE("min_modulus and essential_min_modulus") {
  CHECK(min_modulus(identity_op()).value == doctest::Approx(1.0));
  CHECK(min_modulus(harmonic()).value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(essential_min_modulus(scalar_op(cplx{3.0, 4.0})) == doctest::Approx(5.0));
  CHECK(essential_min_modulus(harmonic()) == 0.0);

  StructuredOperator t = add(identity_op(), diag_op({{cplx{0.5, 0.0}, 0.5, 0.0}}));
  MinModulusReport mm = min_modulus(t);
  CHECK(mm.value == doctest::Approx(1.0).epsilon(1e-9));  // entries 1 + 0.5^(n+1) > 1, essential 1
  CHECK(mm.error_bound < 1e-7);
}

TEST_CASE("spectrum_sa coverage") {
  StructuredOperator t = add(identity_op(), harmonic());
  SpectrumApprox sp = spectrum_sa(t, 1e-6, 8);
  CHECK(sp.essential_points == std::vector<double>{1.0});
  CHECK(sp.eigenvalues.front().value == doctest::Approx(2.0));
  // every dense eigenvalue of a truncation lies in a certified ball
  DenseMatrix m = truncate(t, 50);
  EigResult eig = dense_sym_eig(m);
  for (double lam : eig.values) {
    bool covered = false;
    for (const auto& e : sp.eigenvalues)
      if (std::abs(lam - e.value) <= e.error_radius + 1e-12) covered = true;
    if (!covered) covered = std::abs(lam - 1.0) <= sp.cluster_radius + 1e-12;
    CHECK(covered);
  }
  CHECK_THROWS_AS(spectrum_sa(scalar_op(cplx{0.0, 1.0})), not_self_adjoint);
}

TEST_CASE("modulus") {
  StructuredOperator t = add(harmonic(), scalar_op(-1.0));  // diag(1/n - 1)
  StructuredOperator m = modulus(t);
  CHECK(m.scalar().real() == doctest::Approx(1.0));
  for (std::int64_t n = 1; n <= 30; ++n)
    CHECK(m.entry(n, n).real() == doctest::Approx(std::abs(1.0 / n - 1.0)));
  CHECK(is_positive(m));

  Rng rng(43);
  for (int c = 0; c < 10; ++c) {
    StructuredOperator x = testgen::random_operator(rng);
    StructuredOperator mx = modulus(x);
    // |X|^2 = X* X on a dense section
    DenseMatrix lhs = truncate(multiply(mx, mx), 8);
    DenseMatrix rhs = truncate(gram(x), 8);
    CHECK((lhs - rhs).frobenius() < 1e-9);
  }
}

TEST_CASE("sqrt_positive") {
  StructuredOperator t = add(identity_op(), harmonic());
  StructuredOperator r = sqrt_positive(t);
  CHECK(operator_norm(sub(multiply(r, r), t)).value < 1e-9);
  CHECK_THROWS_AS(sqrt_positive(scalar_op(-1.0)), not_positive);
  // zero scalar with an undecided tail sign cannot certify the branch
  StructuredOperator mixed = diag_op({{cplx{1.0, 0.0}, 0.9, 0.0}, {cplx{-1.0, 0.0}, 0.5, 0.0}});
  StructuredOperator psd = gram(mixed);  // squares: positive
  CHECK(is_positive(psd));
  CHECK_NOTHROW(sqrt_positive(psd));
}

TEST_CASE("pos_neg_parts") {
  Rng rng(47);
  for (int c = 0; c < 15; ++c) {
    StructuredOperator t = testgen::random_self_adjoint(rng);
    auto [p, m] = pos_neg_parts(t);
    CHECK(is_positive(p, 1e-8));
    CHECK(is_positive(m, 1e-8));
    CHECK(operator_norm(sub(sub(p, m), t)).value < 1e-9);
    CHECK(operator_norm(multiply(p, m)).value < 1e-8);
  }
  CHECK_THROWS_AS(pos_neg_parts(scalar_op(cplx{0.0, 1.0})), not_self_adjoint);
}

TEST_CASE("polar") {
  // scalar 1 with block diag(-2, 1): V = I - 2 e1(x)e1
  StructuredOperator t = make_operator(1.0, 2, {cplx{-2, 0}, 0, 0, cplx{1, 0}}, TailRule::zero());
  PolarPair pp = polar(t);
  CHECK(pp.v.entry(1, 1) == cplx{-1.0, 0.0});
  CHECK(pp.v.entry(2, 2) == cplx{1.0, 0.0});
  CHECK(std::abs(pp.modulus.entry(1, 1) - cplx{1.0, 0.0}) < 1e-10);
  CHECK(std::abs(pp.modulus.entry(2, 2) - cplx{2.0, 0.0}) < 1e-10);

  Rng rng(53);
  for (int c = 0; c < 10; ++c) {
    StructuredOperator x = testgen::random_operator(rng);
    PolarPair px = polar(x);
    CHECK(operator_norm(sub(multiply(px.v, px.modulus), x)).value < 1e-8);
    CHECK(is_positive(px.modulus, 1e-8));
    CHECK(operator_norm(px.v).value < 1.0 + 1e-8);
  }

  // zero scalar with a genuinely complex tail phase leaves the class
  StructuredOperator bad = diag_op({{cplx{0.0, 1.0}, 0.5, 0.0}});
  CHECK_THROWS_AS(polar(bad), unsupported_polar);
}

TEST_CASE("invert") {
  StructuredOperator t = add(identity_op(), diag_op({{cplx{0.5, 0.0}, 0.5, 0.0}}));
  StructuredOperator inv = invert(t);
  DenseMatrix prod = truncate(multiply(t, inv), 40);
  CHECK((prod - DenseMatrix::identity(40)).frobenius() < 1e-12);

  CHECK_THROWS_AS(invert(harmonic()), not_invertible);

  Rng rng(59);
  for (int c = 0; c < 10; ++c) {
    StructuredOperator x = testgen::random_operator(rng);
    StructuredOperator shifted = add(x, scalar_op(cplx{8.0, 0.0}));  // push spectrum away from 0
    StructuredOperator ix = invert(shifted);
    DenseMatrix p = truncate(multiply(shifted, ix), 20);
    CHECK((p - DenseMatrix::identity(20)).frobenius() < 1e-9);
  }
}

TEST_CASE("minimum modulus identities on normal operators") {
  Rng rng(61);
  for (int c = 0; c < 10; ++c) {
    // self-adjoint diagonal-conjugated block, spectrum away from zero
    const std::int64_t n = 4;
    DenseMatrix u = testgen::random_unitary(rng, n);
    std::vector<cplx> eigs(n);
    for (auto& v : eigs) v = {testgen::uniform(rng, 0.5, 2.0), 0.0};
    const double alpha = testgen::uniform(rng, 0.8, 1.5);
    StructuredOperator t = make_operator(alpha, n, testgen::conjugated_diag_block(u, eigs, alpha),
                                         TailRule::from_terms({{cplx{0.2, 0.0}, 0.6, 0.0}}));
    const double m = min_modulus(t).value;
    CHECK(std::abs(m - 1.0 / operator_norm(invert(t)).value) < 1e-7);
    CHECK(std::abs(min_modulus(multiply(t, t)).value - m * m) < 1e-7);
    CHECK(std::abs(min_modulus(modulus(t)).value - m) < 1e-7);
    CHECK(std::abs(min_modulus(sqrt_positive(t)).value * min_modulus(sqrt_positive(t)).value - m) <
          1e-7);
  }
}
