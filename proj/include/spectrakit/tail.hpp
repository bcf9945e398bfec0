#pragma once

#include <memory>
#include <utility>

#include "spectrakit/envelope.hpp"

namespace spectrakit {

/// Exact closed-form rule n -> complex value for tail diagonal entries.
/// User-entered rules are signed term sums; derived operations wrap entries
/// in shift nodes (sqrt, reciprocal, modulus, phase, positive/negative part)
/// that stay exactly evaluable.
class TailExpr {
 public:
  virtual ~TailExpr() = default;
  virtual cplx eval(std::int64_t n) const = 0;
};

using ExprPtr = std::shared_ptr<const TailExpr>;

class TermSumExpr final : public TailExpr {
 public:
  explicit TermSumExpr(TermList terms) : terms_(std::move(terms)) {}
  cplx eval(std::int64_t n) const override {
    cplx s{0.0, 0.0};
    for (const auto& t : terms_) s += t.at(n);
    return s;
  }
  const TermList& terms() const { return terms_; }

 private:
  TermList terms_;
};

class AddExpr final : public TailExpr {
 public:
  AddExpr(ExprPtr a, ExprPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  cplx eval(std::int64_t n) const override { return a_->eval(n) + b_->eval(n); }

 private:
  ExprPtr a_, b_;
};

class MulExpr final : public TailExpr {
 public:
  MulExpr(ExprPtr a, ExprPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  cplx eval(std::int64_t n) const override { return a_->eval(n) * b_->eval(n); }

 private:
  ExprPtr a_, b_;
};

class ScaleExpr final : public TailExpr {
 public:
  ScaleExpr(cplx f, ExprPtr a) : f_(f), a_(std::move(a)) {}
  cplx eval(std::int64_t n) const override { return f_ * a_->eval(n); }

 private:
  cplx f_;
  ExprPtr a_;
};

class ConjExpr final : public TailExpr {
 public:
  explicit ConjExpr(ExprPtr a) : a_(std::move(a)) {}
  cplx eval(std::int64_t n) const override { return std::conj(a_->eval(n)); }

 private:
  ExprPtr a_;
};

class ReExpr final : public TailExpr {
 public:
  explicit ReExpr(ExprPtr a) : a_(std::move(a)) {}
  cplx eval(std::int64_t n) const override { return {a_->eval(n).real(), 0.0}; }

 private:
  ExprPtr a_;
};

/// sqrt(max(0, s + Re d(n))) - sqrt(s), for the square root of a positive
/// operator with scalar part s.
class SqrtShiftExpr final : public TailExpr {
 public:
  SqrtShiftExpr(double s, ExprPtr d) : s_(s), d_(std::move(d)) {}
  cplx eval(std::int64_t n) const override {
    const double v = std::max(0.0, s_ + d_->eval(n).real());
    return {std::sqrt(v) - std::sqrt(s_), 0.0};
  }

 private:
  double s_;
  ExprPtr d_;
};

/// 1/(a + d(n)) - 1/a, the tail of an inverse.
class RecipShiftExpr final : public TailExpr {
 public:
  RecipShiftExpr(cplx a, ExprPtr d) : a_(a), d_(std::move(d)) {}
  cplx eval(std::int64_t n) const override { return 1.0 / (a_ + d_->eval(n)) - 1.0 / a_; }

 private:
  cplx a_;
  ExprPtr d_;
};

/// |a + d(n)| - |a|, the tail of a modulus.
class ModShiftExpr final : public TailExpr {
 public:
  ModShiftExpr(cplx a, ExprPtr d) : a_(a), d_(std::move(d)) {}
  cplx eval(std::int64_t n) const override { return {std::abs(a_ + d_->eval(n)) - std::abs(a_), 0.0}; }

 private:
  cplx a_;
  ExprPtr d_;
};

/// phase(a + d(n)) - phase(a) with phase(0) = 0, the tail of a polar factor.
class PhaseShiftExpr final : public TailExpr {
 public:
  PhaseShiftExpr(cplx a, ExprPtr d) : a_(a), d_(std::move(d)) {}
  static cplx phase(cplx z) {
    const double m = std::abs(z);
    return m == 0.0 ? cplx{0.0, 0.0} : z / m;
  }
  cplx eval(std::int64_t n) const override { return phase(a_ + d_->eval(n)) - phase(a_); }

 private:
  cplx a_;
  ExprPtr d_;
};

/// max(0, a + Re d(n)) - max(0, a), the tail of a positive part.
class PosShiftExpr final : public TailExpr {
 public:
  PosShiftExpr(double a, ExprPtr d) : a_(a), d_(std::move(d)) {}
  cplx eval(std::int64_t n) const override {
    return {std::max(0.0, a_ + d_->eval(n).real()) - std::max(0.0, a_), 0.0};
  }

 private:
  double a_;
  ExprPtr d_;
};

/// max(0, -(a + Re d(n))) - max(0, -a), the tail of a negative part.
class NegShiftExpr final : public TailExpr {
 public:
  NegShiftExpr(double a, ExprPtr d) : a_(a), d_(std::move(d)) {}
  cplx eval(std::int64_t n) const override {
    return {std::max(0.0, -(a_ + d_->eval(n).real())) - std::max(0.0, -a_), 0.0};
  }

 private:
  double a_;
  ExprPtr d_;
};

// ---------------------------------------------------------------------------

/// Exact entry rule plus certified decay envelope and eventual-sign tag.
/// A null entry means the identically-zero tail.
struct TailRule {
  ExprPtr entry;
  DecayEnvelope envelope;
  SignTag sign{SignKind::IdenticallyZero, 1};
  bool is_real = true;

  bool is_zero() const { return entry == nullptr; }

  cplx at(std::int64_t n) const { return entry ? entry->eval(n) : cplx{0.0, 0.0}; }

  /// Term list if the rule is a plain signed term sum, else nullptr.
  const TermList* terms() const {
    if (auto* ts = dynamic_cast<const TermSumExpr*>(entry.get())) return &ts->terms();
    return nullptr;
  }

  static TailRule zero() { return {}; }

  static TailRule from_terms(TermList terms) {
    terms = terms_simplify(terms);
    if (terms.empty()) return zero();
    TailRule rule;
    rule.envelope = terms_envelope(terms);
    rule.envelope.validate();
    rule.sign = sign_of_terms(terms);
    rule.is_real = terms_real(terms, 1e-15);
    rule.entry = std::make_shared<TermSumExpr>(std::move(terms));
    return rule;
  }
};

inline TailRule tail_add(const TailRule& a, const TailRule& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (const TermList* ta = a.terms()) {
    if (const TermList* tb = b.terms()) return TailRule::from_terms(terms_add(*ta, *tb));
  }
  TailRule out;
  out.entry = std::make_shared<AddExpr>(a.entry, b.entry);
  out.envelope = env_concat(a.envelope, b.envelope);
  out.is_real = a.is_real && b.is_real;
  if (a.sign.kind == b.sign.kind &&
      (a.sign.kind == SignKind::EventuallyNonneg || a.sign.kind == SignKind::EventuallyNonpos)) {
    out.sign = {a.sign.kind, std::max(a.sign.from, b.sign.from)};
  } else {
    out.sign = {SignKind::Complex, 1};
  }
  return out;
}

inline TailRule tail_scale(cplx f, const TailRule& a) {
  if (a.is_zero() || f == cplx{0.0, 0.0}) return TailRule::zero();
  if (const TermList* ta = a.terms()) return TailRule::from_terms(terms_scale(f, *ta));
  TailRule out;
  out.entry = std::make_shared<ScaleExpr>(f, a.entry);
  out.envelope = env_scale(std::abs(f), a.envelope);
  const bool f_real = f.imag() == 0.0;
  out.is_real = a.is_real && f_real;
  out.sign = {SignKind::Complex, 1};
  if (f_real && a.sign.kind != SignKind::Complex) {
    if (a.sign.kind == SignKind::IdenticallyZero) {
      out.sign = a.sign;
    } else {
      const bool flip = f.real() < 0.0;
      auto k = a.sign.kind;
      if (flip)
        k = (k == SignKind::EventuallyNonneg) ? SignKind::EventuallyNonpos : SignKind::EventuallyNonneg;
      out.sign = {k, a.sign.from};
    }
  }
  return out;
}

inline TailRule tail_conj(const TailRule& a) {
  if (a.is_zero()) return a;
  if (const TermList* ta = a.terms()) return TailRule::from_terms(terms_conj(*ta));
  if (a.is_real) return a;
  TailRule out;
  out.entry = std::make_shared<ConjExpr>(a.entry);
  out.envelope = a.envelope;
  out.is_real = a.is_real;
  out.sign = a.is_real ? a.sign : SignTag{SignKind::Complex, 1};
  return out;
}

inline TailRule tail_re(const TailRule& a) {
  if (a.is_zero()) return a;
  if (a.is_real) return a;
  if (const TermList* ta = a.terms()) return TailRule::from_terms(terms_re(*ta));
  TailRule out;
  out.entry = std::make_shared<ReExpr>(a.entry);
  out.envelope = a.envelope;
  out.is_real = true;
  out.sign = {SignKind::Complex, 1};
  return out;
}

inline TailRule tail_mul(const TailRule& a, const TailRule& b) {
  if (a.is_zero() || b.is_zero()) return TailRule::zero();
  if (const TermList* ta = a.terms()) {
    if (const TermList* tb = b.terms()) return TailRule::from_terms(terms_mul(*ta, *tb));
  }
  TailRule out;
  out.entry = std::make_shared<MulExpr>(a.entry, b.entry);
  out.envelope = env_product(a.envelope, b.envelope);
  out.is_real = a.is_real && b.is_real;
  out.sign = {SignKind::Complex, 1};
  if (a.sign.kind != SignKind::Complex && b.sign.kind != SignKind::Complex) {
    if (a.sign.kind == SignKind::IdenticallyZero || b.sign.kind == SignKind::IdenticallyZero) {
      out.sign = {SignKind::IdenticallyZero, std::max(a.sign.from, b.sign.from)};
    } else {
      const bool neg = (a.sign.kind == SignKind::EventuallyNonpos) !=
                       (b.sign.kind == SignKind::EventuallyNonpos);
      out.sign = {neg ? SignKind::EventuallyNonpos : SignKind::EventuallyNonneg,
                  std::max(a.sign.from, b.sign.from)};
    }
  }
  return out;
}

}  // namespace spectrakit
