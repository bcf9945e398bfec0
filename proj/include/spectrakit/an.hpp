#pragma once

#include <string>

#include "spectrakit/spectral.hpp"

namespace spectrakit {

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

struct ClassifyFlags {
  bool self_adjoint = false;
  bool normal = false;
  bool hyponormal = false;
  bool positive = false;
  bool compact = false;
};

namespace detail {

/// Certified bounds [lo, hi] on inf sigma(T) for self-adjoint T.
inline std::pair<double, double> sym_min_spectrum(const StructuredOperator& t, double tol) {
  const double e = t.scalar().real();
  double lo = e, hi = e;
  if (t.block_size() > 0) {
    EigResult eig = dense_sym_eig(block_matrix(t));
    lo = std::min(lo, eig.values.back() - eig.residual);
    hi = std::min(hi, eig.values.back() + eig.residual);
  }
  if (!t.tail().is_zero()) {
    TailBounds tb = tail_bounds(t.tail(), t.block_size(), std::max(tol, 1e-13));
    lo = std::min(lo, e + tb.inf_lo);
    hi = std::min(hi, e + tb.inf_hi);
  }
  return {lo, hi};
}

}  // namespace detail

inline ClassifyFlags classify(const StructuredOperator& t, double tol = kDefaultTol) {
  ClassifyFlags f;
  f.self_adjoint = is_self_adjoint(t, tol);
  // self-commutator T*T - TT*: self-adjoint with scalar 0
  StructuredOperator c = sub(gram(t), gram(adjoint(t)));
  f.normal = operator_norm(c, tol).value <= tol;
  f.hyponormal = f.normal || detail::sym_min_spectrum(c, tol).first >= -tol;
  f.positive = is_positive(t, tol);
  f.compact = t.scalar() == cplx{0.0, 0.0};
  return f;
}

// ---------------------------------------------------------------------------
// norm attainment
// ---------------------------------------------------------------------------

struct AttainReport {
  Attainment verdict = Attainment::Undecided;
  double norm_value = 0.0;
  std::optional<Witness> witness;
};

/// Does some unit x achieve ||Tx|| = ||T||? Decided through the spectrum of
/// T*T: the sup is attained iff it is an eigenvalue, which the certified
/// tail-sup search settles except within the tolerance band.
inline AttainReport is_norm_attaining(const StructuredOperator& t, double tol = kDefaultTol) {
  NormReport nr = operator_norm(t, tol);
  AttainReport out;
  out.verdict = nr.attainment;
  out.norm_value = nr.value;
  if (nr.witness) out.witness = Witness{nr.witness->normalized(), cplx{nr.value, 0.0}};
  return out;
}

// ---------------------------------------------------------------------------
// AN triple extraction
// ---------------------------------------------------------------------------

/// (K, F, alpha): K positive compact, F positive finite rank with K F = 0 and
/// F <= alpha I, representing a positive operator as K - F + alpha I.
struct ANTriple {
  StructuredOperator k;
  StructuredOperator f;
  double alpha = 0.0;
};

enum class NotANReason { InfinitelyManyBelowEssential, NormNotAttainedOnSubspace };

struct ANVerdict {
  enum class Kind { InAN, NotAN, Undecided } kind = Kind::Undecided;
  std::optional<ANTriple> triple;
  NotANReason reason = NotANReason::InfinitelyManyBelowEssential;
  std::vector<double> offenders;  // first eigenvalues below the essential point
  std::string explanation;
};

namespace detail {

/// Positive self-adjoint case: alpha is the essential point, A = T - alpha I
/// is compact self-adjoint, and T attains its norm on every closed subspace
/// exactly when A has finitely many negative eigenvalues.
inline ANVerdict an_check_positive(const StructuredOperator& t, double tol) {
  ANVerdict out;
  const double s = t.scalar().real();
  StructuredOperator a = sub(t, scalar_op(s));
  const SignTag tag = a.tail().is_zero() ? SignTag{SignKind::IdenticallyZero, 1} : a.tail().sign;

  if (tag.kind == SignKind::Complex) {
    out.kind = ANVerdict::Kind::Undecided;
    out.explanation = "tail sign is undecidable; cannot certify finite rank of the negative part";
    return out;
  }
  if (tag.kind == SignKind::EventuallyNonpos) {
    out.kind = ANVerdict::Kind::NotAN;
    out.reason = NotANReason::InfinitelyManyBelowEssential;
    const std::int64_t start = std::max(tag.from, a.block_size() + 1);
    for (std::int64_t n = start; n < start + 8; ++n)
      out.offenders.push_back(s + a.tail().at(n).real());
    return out;
  }

  // tail eventually strictly positive (or identically zero): any negative
  // eigenvalues live in the finite range, so fold it into the block
  StructuredOperator ap = promote(a, std::max(a.block_size(), tag.from - 1));
  auto [k, f] = pos_neg_parts(ap, tol);
  const double f_top = operator_norm(f, tol).value;
  if (f_top > s + tol) {
    out.kind = ANVerdict::Kind::Undecided;
    out.explanation = "negative part exceeds the essential point; input not certifiably positive";
    return out;
  }
  out.kind = ANVerdict::Kind::InAN;
  out.triple = ANTriple{std::move(k), std::move(f), s};
  return out;
}

}  // namespace detail

/// Norm-attainment on every nonzero closed subspace. Positive operators are
/// analyzed directly; self-adjoint ones through |T| = T+ + T-; everything
/// else through T*T (T has the property iff T*T does).
inline ANVerdict an_check(const StructuredOperator& t, double tol = kDefaultTol) {
  if (is_positive(t, tol)) return detail::an_check_positive(t, tol);
  if (is_self_adjoint(t, tol)) {
    try {
      auto [p, m] = pos_neg_parts(t, tol);
      return detail::an_check_positive(add(p, m), tol);
    } catch (const sign_undecidable&) {
      ANVerdict out;
      out.kind = ANVerdict::Kind::Undecided;
      out.explanation = "tail sign is undecidable; cannot split into positive and negative parts";
      return out;
    }
  }
  return detail::an_check_positive(gram(t), tol);
}

inline StructuredOperator an_reassemble(const ANTriple& triple, double tol = kDefaultTol) {
  if (triple.k.scalar() != cplx{0.0, 0.0})
    throw invalid_triple("K must have zero scalar part (compact)");
  if (triple.f.scalar() != cplx{0.0, 0.0} || !triple.f.tail().is_zero())
    throw invalid_triple("F must be finite rank: zero scalar and zero tail");
  if (!(triple.alpha >= 0.0)) throw invalid_triple("alpha must be nonnegative");
  if (!is_positive(triple.k, tol)) throw invalid_triple("K must be positive");
  if (!is_positive(triple.f, tol)) throw invalid_triple("F must be positive");
  if (operator_norm(multiply(triple.k, triple.f), tol).value > tol)
    throw invalid_triple("K F must vanish");
  if (operator_norm(triple.f, tol).value > triple.alpha + tol)
    throw invalid_triple("F must be dominated by alpha");
  return add(sub(triple.k, triple.f), scalar_op(triple.alpha));
}

// ---------------------------------------------------------------------------
// kernel
// ---------------------------------------------------------------------------

/// Orthonormal kernel basis: dense-block kernel vectors plus tail coordinates
/// whose diagonal entry vanishes within tol. Requires the set of candidate
/// tail indices to be certifiably finite.
inline std::vector<FinVector> null_space(const StructuredOperator& t_in, double tol = kDefaultTol) {
  const cplx alpha = t_in.scalar();
  const double aa = std::abs(alpha);
  StructuredOperator t = t_in;
  if (!t.tail().is_zero()) {
    std::int64_t settle;
    if (aa > tol) {
      // beyond env < |alpha| - tol every diagonal entry stays off zero
      settle = env_below_index(t.tail().envelope, aa - tol);
    } else if (t.tail().sign.kind == SignKind::EventuallyNonneg ||
               t.tail().sign.kind == SignKind::EventuallyNonpos) {
      // entries are exactly nonzero beyond the sign index
      settle = t.tail().sign.from;
    } else {
      throw uncertifiable_kernel("tail diagonal entries cluster at zero");
    }
    t = promote(t, std::max(t.block_size(), settle - 1));
  } else if (aa <= tol && aa != 0.0) {
    throw uncertifiable_kernel("scalar part within tolerance of zero");
  } else if (aa == 0.0 && t_in.tail().is_zero() && t_in.block_size() >= 0) {
    // alpha = 0 with a vanished tail: every coordinate beyond the block is in
    // the kernel, which is not finitely enumerable
    throw uncertifiable_kernel("kernel contains the whole tail subspace");
  }
  std::vector<FinVector> out;
  if (t.block_size() > 0) {
    for (const auto& col : dense_kernel(block_matrix(t), tol)) {
      FinVector v;
      for (std::size_t i = 0; i < col.size(); ++i) v.set(static_cast<std::int64_t>(i) + 1, col[i]);
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace spectrakit
