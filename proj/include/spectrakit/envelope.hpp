#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "spectrakit/errors.hpp"

namespace spectrakit {

using cplx = std::complex<double>;

/// One envelope term c * r^n * n^(-p) with c >= 0, r in (0,1], p >= 0.
/// (r,p) = (1,0) is allowed only for c = 0 (the bound must vanish).
struct EnvelopeTerm {
  double c = 0.0;
  double r = 1.0;
  double p = 0.0;

  double at(std::int64_t n) const {
    if (c == 0.0) return 0.0;
    return c * std::pow(r, static_cast<double>(n)) * std::pow(static_cast<double>(n), -p);
  }

  void validate() const {
    if (!(c >= 0.0)) throw malformed_envelope("coefficient must be nonnegative");
    if (!(r > 0.0 && r <= 1.0)) throw malformed_envelope("rate must lie in (0,1]");
    if (!(p >= 0.0)) throw malformed_envelope("exponent must be nonnegative");
    if (r == 1.0 && p == 0.0 && c > 0.0)
      throw nonvanishing_tail("envelope term c*1^n*n^0 with c>0 does not vanish");
  }
};

/// Pointwise bound env(n) = sum of terms, valid and monotone nonincreasing
/// for n >= valid_from. env(n) -> 0 as n -> infinity.
struct DecayEnvelope {
  std::vector<EnvelopeTerm> terms;
  std::int64_t valid_from = 1;

  double at(std::int64_t n) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.at(n);
    return s;
  }

  bool is_zero() const {
    return std::all_of(terms.begin(), terms.end(), [](const EnvelopeTerm& t) { return t.c == 0.0; });
  }

  void validate() const {
    for (const auto& t : terms) t.validate();
    if (valid_from < 1) throw malformed_envelope("valid_from must be >= 1");
  }

  /// Drops zero terms and merges equal (r,p) pairs. Caps the term count by
  /// folding excess terms into a single conservative bound with the largest
  /// rate and smallest exponent among them (sound since each term is
  /// dominated by c * r_max^n * n^(-p_min) for n >= 1).
  void simplify(std::size_t cap = 16) {
    std::map<std::pair<double, double>, double> merged;
    for (const auto& t : terms) {
      if (t.c == 0.0) continue;
      merged[{t.r, t.p}] += t.c;
    }
    terms.clear();
    for (const auto& [rp, c] : merged) terms.push_back({c, rp.first, rp.second});
    if (terms.size() > cap) {
      // keep the slowest-decaying terms explicit, collapse the rest
      std::sort(terms.begin(), terms.end(), [](const EnvelopeTerm& a, const EnvelopeTerm& b) {
        return a.r != b.r ? a.r > b.r : a.p < b.p;
      });
      EnvelopeTerm rest{0.0, 0.0, 0.0};
      bool first = true;
      for (std::size_t i = cap - 1; i < terms.size(); ++i) {
        rest.c += terms[i].c;
        if (first) {
          rest.r = terms[i].r;
          rest.p = terms[i].p;
          first = false;
        } else {
          rest.r = std::max(rest.r, terms[i].r);
          rest.p = std::min(rest.p, terms[i].p);
        }
      }
      terms.resize(cap - 1);
      terms.push_back(rest);
    }
  }
};

inline DecayEnvelope env_concat(const DecayEnvelope& a, const DecayEnvelope& b) {
  DecayEnvelope out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  out.valid_from = std::max(a.valid_from, b.valid_from);
  out.simplify();
  return out;
}

inline DecayEnvelope env_scale(double factor, const DecayEnvelope& a) {
  DecayEnvelope out = a;
  for (auto& t : out.terms) t.c *= std::abs(factor);
  out.simplify();
  return out;
}

inline DecayEnvelope env_product(const DecayEnvelope& a, const DecayEnvelope& b) {
  DecayEnvelope out;
  out.valid_from = std::max(a.valid_from, b.valid_from);
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) out.terms.push_back({ta.c * tb.c, ta.r * tb.r, ta.p + tb.p});
  out.simplify();
  return out;
}

/// Term-wise square root: sqrt(sum c_i r_i^n n^-p_i) <= sum sqrt(c_i) sqrt(r_i)^n n^(-p_i/2)
/// by subadditivity of sqrt.
inline DecayEnvelope env_sqrt(const DecayEnvelope& a) {
  DecayEnvelope out;
  out.valid_from = a.valid_from;
  for (const auto& t : a.terms) out.terms.push_back({std::sqrt(t.c), std::sqrt(t.r), t.p / 2.0});
  out.simplify();
  return out;
}

// ---------------------------------------------------------------------------
// Signed term sums: the user-facing tail family sum_i c_i * r_i^n * n^(-p_i)
// with complex coefficients (real for user input; complex arise internally).
// ---------------------------------------------------------------------------

struct SignedTerm {
  cplx c{0.0, 0.0};
  double r = 1.0;
  double p = 0.0;

  cplx at(std::int64_t n) const {
    if (c == cplx{0.0, 0.0}) return {0.0, 0.0};
    return c * std::pow(r, static_cast<double>(n)) * std::pow(static_cast<double>(n), -p);
  }
};

using TermList = std::vector<SignedTerm>;

inline TermList terms_simplify(const TermList& in) {
  std::map<std::pair<double, double>, cplx> merged;
  for (const auto& t : in) {
    if (t.c == cplx{0.0, 0.0}) continue;
    merged[{t.r, t.p}] += t.c;
  }
  TermList out;
  for (const auto& [rp, c] : merged)
    if (c != cplx{0.0, 0.0}) out.push_back({c, rp.first, rp.second});
  return out;
}

inline TermList terms_add(const TermList& a, const TermList& b) {
  TermList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return terms_simplify(out);
}

inline TermList terms_scale(cplx f, const TermList& a) {
  TermList out;
  for (const auto& t : a) out.push_back({f * t.c, t.r, t.p});
  return terms_simplify(out);
}

inline TermList terms_conj(const TermList& a) {
  TermList out;
  for (const auto& t : a) out.push_back({std::conj(t.c), t.r, t.p});
  return out;
}

inline TermList terms_re(const TermList& a) {
  TermList out;
  for (const auto& t : a) out.push_back({cplx{t.c.real(), 0.0}, t.r, t.p});
  return terms_simplify(out);
}

inline TermList terms_mul(const TermList& a, const TermList& b) {
  TermList out;
  for (const auto& ta : a)
    for (const auto& tb : b) out.push_back({ta.c * tb.c, ta.r * tb.r, ta.p + tb.p});
  return terms_simplify(out);
}

inline bool terms_real(const TermList& a, double tol = 0.0) {
  for (const auto& t : a)
    if (std::abs(t.c.imag()) > tol * std::max(1.0, std::abs(t.c))) return false;
  return true;
}

inline DecayEnvelope terms_envelope(const TermList& a) {
  DecayEnvelope env;
  env.valid_from = 1;
  for (const auto& t : a) env.terms.push_back({std::abs(t.c), t.r, t.p});
  env.simplify();
  return env;
}

enum class SignKind { EventuallyNonneg, EventuallyNonpos, IdenticallyZero, Complex };

/// Sign of a tail entry sequence, valid (strictly: nonzero with the stated
/// sign) for all n >= from. Complex means undetermined.
struct SignTag {
  SignKind kind = SignKind::Complex;
  std::int64_t from = 1;
};

/// Eventual sign of a signed term sum: the dominant term (largest r, then
/// smallest p) decides; the validity index is found by bounding the
/// subdominant remainder strictly below the dominant term.
inline SignTag sign_of_terms(const TermList& in) {
  TermList terms = terms_simplify(in);
  if (terms.empty()) return {SignKind::IdenticallyZero, 1};
  if (!terms_real(terms, 1e-15)) return {SignKind::Complex, 1};

  std::size_t dom = 0;
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i].r > terms[dom].r || (terms[i].r == terms[dom].r && terms[i].p < terms[dom].p))
      dom = i;
  }
  const double cd = terms[dom].c.real();
  const double rd = terms[dom].r;
  const double pd = terms[dom].p;

  if (terms.size() == 1) {
    return {cd > 0.0 ? SignKind::EventuallyNonneg : SignKind::EventuallyNonpos, 1};
  }

  // ratio_i(n) = |c_i|/|c_d| * (r_i/r_d)^n * n^(pd - p_i); each ratio is
  // monotone nonincreasing for n >= n_mono.
  std::int64_t n_mono = 1;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i == dom) continue;
    const double q = pd - terms[i].p;
    if (q > 0.0) {
      const double lr = std::log(rd / terms[i].r);  // > 0 here (r_i < r_d forced when q > 0? no)
      if (terms[i].r >= rd) return {SignKind::Complex, 1};  // cannot dominate
      n_mono = std::max<std::int64_t>(n_mono, static_cast<std::int64_t>(std::ceil(q / lr)) + 1);
    }
  }

  auto remainder_ratio = [&](std::int64_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i == dom) continue;
      s += std::abs(terms[i].c) * std::pow(terms[i].r / rd, static_cast<double>(n)) *
           std::pow(static_cast<double>(n), pd - terms[i].p);
    }
    return s / std::abs(cd);
  };

  std::int64_t n = n_mono;
  const std::int64_t cap = std::int64_t{1} << 40;
  while (remainder_ratio(n) >= 1.0) {
    if (n > cap) return {SignKind::Complex, 1};
    n *= 2;
  }
  return {cd > 0.0 ? SignKind::EventuallyNonneg : SignKind::EventuallyNonpos, n};
}

}  // namespace spectrakit
