#pragma once

#include <limits>
#include <optional>

#include "spectrakit/dense.hpp"

namespace spectrakit {

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

/// Smallest n >= valid_from with env(n) < x (strict), using monotonicity.
inline std::int64_t env_below_index(const DecayEnvelope& env, double x) {
  if (!(x > 0.0)) throw precondition_error("env_below_index requires x > 0");
  if (env.is_zero() || env.at(env.valid_from) < x) return env.valid_from;
  std::int64_t lo = env.valid_from, hi = 2 * env.valid_from;
  while (!(env.at(hi) < x)) {
    lo = hi;
    hi *= 2;
    if (hi > (std::int64_t{1} << 50)) throw convergence_error("envelope decays too slowly");
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (env.at(mid) < x)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline bool is_self_adjoint(const StructuredOperator& t, double tol = kDefaultTol) {
  if (std::abs(t.scalar().imag()) > tol) return false;
  if (!t.tail().is_real) return false;
  const std::int64_t n = t.block_size();
  const double scale = std::max(1.0, std::abs(t.scalar()));
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j <= i; ++j)
      if (std::abs(t.block_at(i, j) - std::conj(t.block_at(j, i))) > tol * scale) return false;
  return true;
}

enum class TailAttain { Attained, NotAttained, Unknown };

/// Certified bounds on sup / inf of the (real) tail entries d_n over n > N.
/// Both limits include 0 in their closure since d_n -> 0.
struct TailBounds {
  double sup_lo = 0.0, sup_hi = 0.0;
  double inf_lo = 0.0, inf_hi = 0.0;
  TailAttain sup_att = TailAttain::Attained;
  TailAttain inf_att = TailAttain::Attained;
  std::int64_t sup_idx = 0, inf_idx = 0;
};

namespace detail {

constexpr std::int64_t kScanCap = std::int64_t{1} << 17;

/// Sup search over a strictly-positive region n >= start: doubling scan,
/// terminated when the envelope certifies no later entry can beat the best.
inline std::optional<std::pair<double, std::int64_t>> scan_positive_sup(const TailRule& rule,
                                                                        std::int64_t start) {
  double best = -std::numeric_limits<double>::infinity();
  std::int64_t best_idx = start;
  std::int64_t n = start;
  std::int64_t evals = 0;
  std::int64_t until = start;
  while (true) {
    for (; n <= until; ++n) {
      const double v = rule.at(n).real();
      if (v > best) {
        best = v;
        best_idx = n;
      }
      if (++evals > kScanCap) return std::nullopt;
    }
    if (best > 0.0 && rule.envelope.at(until + 1) < best) return std::make_pair(best, best_idx);
    until = 2 * until;
  }
}

}  // namespace detail

inline TailBounds tail_bounds(const TailRule& rule, std::int64_t n_block, double eps) {
  TailBounds out;
  if (rule.is_zero()) {
    out.sup_idx = out.inf_idx = n_block + 1;
    return out;
  }
  SignTag tag = rule.sign;
  // a validity index too far out to scan up to is useless; fall back to the
  // generic evaluation path
  if (tag.from > n_block + 1 + detail::kScanCap) tag = {SignKind::Complex, 1};
  const std::int64_t region_start = std::max(n_block + 1, tag.from);

  // explicit entries before the tag's validity index
  double exp_max = -std::numeric_limits<double>::infinity();
  double exp_min = std::numeric_limits<double>::infinity();
  std::int64_t exp_max_idx = 0, exp_min_idx = 0;
  for (std::int64_t n = n_block + 1; n < region_start; ++n) {
    const double v = rule.at(n).real();
    if (v > exp_max) {
      exp_max = v;
      exp_max_idx = n;
    }
    if (v < exp_min) {
      exp_min = v;
      exp_min_idx = n;
    }
  }
  const bool have_explicit = exp_max_idx != 0;

  // region n >= region_start
  double reg_sup_lo, reg_sup_hi, reg_inf_lo, reg_inf_hi;
  TailAttain reg_sup_att, reg_inf_att;
  std::int64_t reg_sup_idx = 0, reg_inf_idx = 0;

  switch (tag.kind) {
    case SignKind::IdenticallyZero:
      reg_sup_lo = reg_sup_hi = reg_inf_lo = reg_inf_hi = 0.0;
      reg_sup_att = reg_inf_att = TailAttain::Attained;
      reg_sup_idx = reg_inf_idx = region_start;
      break;
    case SignKind::EventuallyNonneg: {
      auto found = detail::scan_positive_sup(rule, region_start);
      if (found) {
        reg_sup_lo = reg_sup_hi = found->first;
        reg_sup_att = TailAttain::Attained;
        reg_sup_idx = found->second;
      } else {
        reg_sup_lo = rule.at(region_start).real();
        reg_sup_hi = rule.envelope.at(region_start);
        reg_sup_att = TailAttain::Unknown;
      }
      reg_inf_lo = reg_inf_hi = 0.0;  // entries strictly positive, limit 0
      reg_inf_att = TailAttain::NotAttained;
      break;
    }
    case SignKind::EventuallyNonpos: {
      TailRule neg = tail_scale(-1.0, rule);
      auto found = detail::scan_positive_sup(neg, region_start);
      if (found) {
        reg_inf_lo = reg_inf_hi = -found->first;
        reg_inf_att = TailAttain::Attained;
        reg_inf_idx = found->second;
      } else {
        reg_inf_hi = rule.at(region_start).real();
        reg_inf_lo = -rule.envelope.at(region_start);
        reg_inf_att = TailAttain::Unknown;
      }
      reg_sup_lo = reg_sup_hi = 0.0;
      reg_sup_att = TailAttain::NotAttained;
      break;
    }
    case SignKind::Complex:
    default: {
      // evaluate everything out to where the envelope drops below eps
      std::int64_t n_eval;
      try {
        n_eval = env_below_index(rule.envelope, std::max(eps, 1e-14));
      } catch (const convergence_error&) {
        n_eval = region_start + detail::kScanCap;
      }
      n_eval = std::min(std::max(n_eval, region_start), region_start + detail::kScanCap);
      double best = -std::numeric_limits<double>::infinity();
      double worst = std::numeric_limits<double>::infinity();
      std::int64_t bidx = region_start, widx = region_start;
      for (std::int64_t n = region_start; n <= n_eval; ++n) {
        const double v = rule.at(n).real();
        if (v > best) {
          best = v;
          bidx = n;
        }
        if (v < worst) {
          worst = v;
          widx = n;
        }
      }
      const double rem = rule.envelope.at(n_eval + 1);
      reg_sup_lo = std::max(best, 0.0);
      reg_sup_hi = std::max(best, rem);
      reg_inf_hi = std::min(worst, 0.0);
      reg_inf_lo = std::min(worst, -rem);
      if (best > rem) {
        reg_sup_att = TailAttain::Attained;
        reg_sup_lo = reg_sup_hi = best;
        reg_sup_idx = bidx;
      } else {
        reg_sup_att = TailAttain::Unknown;
      }
      if (worst < -rem) {
        reg_inf_att = TailAttain::Attained;
        reg_inf_lo = reg_inf_hi = worst;
        reg_inf_idx = widx;
      } else {
        reg_inf_att = TailAttain::Unknown;
      }
      break;
    }
  }

  // combine explicit entries with the region bounds
  if (!have_explicit) {
    out.sup_lo = reg_sup_lo;
    out.sup_hi = reg_sup_hi;
    out.sup_att = reg_sup_att;
    out.sup_idx = reg_sup_idx;
    out.inf_lo = reg_inf_lo;
    out.inf_hi = reg_inf_hi;
    out.inf_att = reg_inf_att;
    out.inf_idx = reg_inf_idx;
    return out;
  }
  // sup
  if (exp_max >= reg_sup_hi) {
    out.sup_lo = out.sup_hi = exp_max;
    out.sup_att = TailAttain::Attained;
    out.sup_idx = exp_max_idx;
  } else if (reg_sup_att == TailAttain::Attained && reg_sup_lo >= exp_max) {
    out.sup_lo = out.sup_hi = reg_sup_lo;
    out.sup_att = TailAttain::Attained;
    out.sup_idx = reg_sup_idx;
  } else if (reg_sup_att == TailAttain::NotAttained && exp_max < reg_sup_lo) {
    out.sup_lo = out.sup_hi = reg_sup_lo;  // = 0, approached but not attained
    out.sup_att = TailAttain::NotAttained;
  } else {
    out.sup_lo = std::max(exp_max, reg_sup_lo);
    out.sup_hi = std::max(exp_max, reg_sup_hi);
    out.sup_att = TailAttain::Unknown;
  }
  // inf
  if (exp_min <= reg_inf_lo) {
    out.inf_lo = out.inf_hi = exp_min;
    out.inf_att = TailAttain::Attained;
    out.inf_idx = exp_min_idx;
  } else if (reg_inf_att == TailAttain::Attained && reg_inf_hi <= exp_min) {
    out.inf_lo = out.inf_hi = reg_inf_hi;
    out.inf_att = TailAttain::Attained;
    out.inf_idx = reg_inf_idx;
  } else if (reg_inf_att == TailAttain::NotAttained && exp_min > reg_inf_hi) {
    out.inf_lo = out.inf_hi = reg_inf_hi;
    out.inf_att = TailAttain::NotAttained;
  } else {
    out.inf_lo = std::min(exp_min, reg_inf_lo);
    out.inf_hi = std::min(exp_min, reg_inf_hi);
    out.inf_att = TailAttain::Unknown;
  }
  return out;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct EigenEntry {
  double value = 0.0;
  double error_radius = 0.0;
  int multiplicity = 1;
  FinVector witness;
};

/// Finite eigenvalue list plus essential point(s) and a cluster radius: all
/// unlisted spectrum lies within cluster_radius of an essential point. The
/// represented set is countable by construction.
struct SpectrumApprox {
  std::vector<EigenEntry> eigenvalues;
  std::vector<double> essential_points;
  double cluster_radius = 0.0;
};

inline FinVector witness_from_column(const DenseMatrix& vectors, std::int64_t col) {
  FinVector v;
  for (std::int64_t i = 0; i < vectors.size(); ++i) {
    const cplx x = vectors.at(i, col);
    if (std::abs(x) > 0.0) v.coords[i + 1] = x;
  }
  return v;
}

/// Spectrum of a self-adjoint structured operator. The block/tail
/// decomposition is exact, so the coverage certificate is: block eigenvalues
/// within Jacobi radii, listed tail entries exact (witness e_n), everything
/// else within cluster_radius of the essential point alpha.
inline SpectrumApprox spectrum_sa(const StructuredOperator& t, double tol = kDefaultTol,
                                  std::int64_t window = 32) {
  if (!is_self_adjoint(t, std::max(tol, 1e-12)))
    throw not_self_adjoint("spectrum_sa requires a self-adjoint operator");
  SpectrumApprox out;
  out.essential_points.push_back(t.scalar().real());

  const std::int64_t nb = t.block_size();
  if (nb > 0) {
    EigResult eig = dense_sym_eig(block_matrix(t));
    for (std::int64_t k = 0; k < nb; ++k)
      out.eigenvalues.push_back({eig.values[k], eig.residual, 1, witness_from_column(eig.vectors, k)});
  }

  if (t.tail().is_zero()) {
    out.cluster_radius = 0.0;
    return out;
  }
  const std::int64_t n_star = tail_cutoff(t, tol);
  constexpr std::int64_t kListCap = 4096;
  const std::int64_t n_list = std::min(n_star, nb + std::max(window, kListCap));
  const double alpha = t.scalar().real();
  for (std::int64_t n = nb + 1; n <= n_list; ++n)
    out.eigenvalues.push_back({alpha + t.tail().at(n).real(), 0.0, 1, FinVector::basis(n)});
  // the `window` largest remaining entries beyond the consecutive range
  if (window > 0) {
    std::vector<std::pair<double, std::int64_t>> beyond;
    const std::int64_t scan_end = n_list + 4 * window;
    for (std::int64_t n = n_list + 1; n <= scan_end; ++n)
      beyond.push_back({std::abs(t.tail().at(n)), n});
    std::sort(beyond.begin(), beyond.end(), std::greater<>());
    beyond.resize(std::min<std::size_t>(beyond.size(), static_cast<std::size_t>(window)));
    for (const auto& [mag, n] : beyond)
      out.eigenvalues.push_back({alpha + t.tail().at(n).real(), 0.0, 1, FinVector::basis(n)});
  }
  out.cluster_radius = t.tail().envelope.at(std::max(n_list + 1, t.tail().envelope.valid_from));
  return out;
}

// ---------------------------------------------------------------------------
// operator norm / minimum modulus
// ---------------------------------------------------------------------------

enum class Attainment { Yes, No, Undecided };

struct NormReport {
  double value = 0.0;
  double error_bound = 0.0;
  Attainment attainment = Attainment::Undecided;
  std::optional<FinVector> witness;
};

namespace detail {

struct GramAnalysis {
  StructuredOperator p;   // T*T, Hermitian
  double e = 0.0;         // essential point of T*T
  std::vector<double> lam;
  DenseMatrix vectors;
  double rho = 0.0;       // Jacobi residual
  TailBounds tb;
};

inline GramAnalysis analyze_gram(const StructuredOperator& t, double tol) {
  GramAnalysis g;
  g.p = gram(t);
  g.e = g.p.scalar().real();
  if (g.p.block_size() > 0) {
    EigResult eig = dense_sym_eig(block_matrix(g.p));
    g.lam = std::move(eig.values);
    g.vectors = std::move(eig.vectors);
    g.rho = eig.residual;
  }
  const double scale = std::max(1.0, g.e);
  g.tb = tail_bounds(g.p.tail(), g.p.block_size(), std::max(tol, 1e-13) * scale);
  return g;
}

}  // namespace detail

/// Norm ||T|| = sqrt(sup sigma(T*T)) with certified attainment verdict.
inline NormReport operator_norm(const StructuredOperator& t, double tol = kDefaultTol) {
  detail::GramAnalysis g = detail::analyze_gram(t, tol);
  const bool have_block = !g.lam.empty();
  const double lam_max = have_block ? g.lam.front() : -std::numeric_limits<double>::infinity();
  const double e = g.e;
  const double tail_hi = e + g.tb.sup_hi;
  const double tail_lo = e + g.tb.sup_lo;

  const double sq_lo = std::max({have_block ? lam_max - g.rho : e, tail_lo, e});
  const double sq_hi = std::max({have_block ? lam_max + g.rho : e, tail_hi, e});
  const double sq_best = std::max({have_block ? lam_max : e, tail_lo, e});

  NormReport out;
  out.value = std::sqrt(std::max(0.0, sq_best));
  out.error_bound = std::sqrt(std::max(0.0, sq_hi)) - std::sqrt(std::max(0.0, sq_lo));

  const double scale = std::max({1.0, std::abs(e), have_block ? std::abs(lam_max) : 0.0});
  const double band = std::max(tol, 1e-12) * scale;

  if (g.tb.sup_att == TailAttain::Attained) {
    // both the tail sup and the block max are genuine eigenvalues
    if (have_block && lam_max > tail_lo) {
      out.attainment = Attainment::Yes;
      out.witness = witness_from_column(g.vectors, 0);
    } else {
      out.attainment = Attainment::Yes;
      out.witness = FinVector::basis(g.tb.sup_idx);
    }
    return out;
  }
  if (have_block && lam_max - g.rho >= tail_hi) {
    out.attainment = Attainment::Yes;
    out.witness = witness_from_column(g.vectors, 0);
    return out;
  }
  if (g.tb.sup_att == TailAttain::NotAttained) {
    // tail sup = e, approached but never attained
    if (have_block && lam_max - g.rho > e) {
      out.attainment = Attainment::Yes;
      out.witness = witness_from_column(g.vectors, 0);
      return out;
    }
    if (have_block && lam_max + g.rho + band > e) {
      out.attainment = Attainment::Undecided;  // block eigenvalue within the band of e
      return out;
    }
    out.attainment = Attainment::No;
    return out;
  }
  out.attainment = Attainment::Undecided;
  return out;
}

struct MinModulusReport {
  double value = 0.0;
  double error_bound = 0.0;
};

/// m(T) = inf{||Tx|| : ||x||=1} = sqrt(inf sigma(T*T)) = d(0, sigma(|T|)).
inline MinModulusReport min_modulus(const StructuredOperator& t, double tol = kDefaultTol) {
  detail::GramAnalysis g = detail::analyze_gram(t, tol);
  const bool have_block = !g.lam.empty();
  const double lam_min = have_block ? g.lam.back() : std::numeric_limits<double>::infinity();
  const double e = g.e;

  const double sq_lo = std::min({have_block ? lam_min - g.rho : e, e + g.tb.inf_lo, e});
  const double sq_hi = std::min({have_block ? lam_min + g.rho : e, e + g.tb.inf_hi, e});
  const double sq_best = std::min({have_block ? lam_min : e, e + g.tb.inf_hi, e});

  MinModulusReport out;
  out.value = std::sqrt(std::max(0.0, sq_best));
  out.error_bound = std::sqrt(std::max(0.0, sq_hi)) - std::sqrt(std::max(0.0, sq_lo));
  return out;
}

/// Essential minimum modulus: d(0, essential spectrum of |T|) = |alpha|,
/// exact for the structured class.
inline double essential_min_modulus(const StructuredOperator& t) { return std::abs(t.scalar()); }

// ---------------------------------------------------------------------------
// modulus / positive square root / positive-negative parts
// ---------------------------------------------------------------------------

namespace detail {

/// Reconstruct sum f(lambda_k) v_k v_k^* from a Hermitian eigendecomposition.
template <typename F>
DenseMatrix spectral_function(const EigResult& eig, F&& f) {
  const std::int64_t n = eig.vectors.size();
  DenseMatrix out(n);
  for (std::int64_t k = 0; k < n; ++k) {
    const double fv = f(eig.values[k]);
    if (fv == 0.0) continue;
    for (std::int64_t i = 0; i < n; ++i) {
      const cplx vik = eig.vectors.at(i, k);
      if (vik == cplx{0, 0}) continue;
      for (std::int64_t j = 0; j < n; ++j)
        out.at(i, j) += fv * vik * std::conj(eig.vectors.at(j, k));
    }
  }
  return out;
}

inline std::vector<cplx> deviation_block(const DenseMatrix& full, cplx scalar) {
  const std::int64_t n = full.size();
  std::vector<cplx> b(full.data());
  for (std::int64_t i = 0; i < n; ++i) b[i * n + i] -= scalar;
  return b;
}

}  // namespace detail

/// |T| = (T*T)^(1/2): block from the dense PSD square root of A*A, tail as
/// absolute-value shift nodes |alpha + d_n| - |alpha| (1-Lipschitz, so the
/// tail envelope carries over unchanged).
inline StructuredOperator modulus(const StructuredOperator& t, double tol = kDefaultTol) {
  const cplx alpha = t.scalar();
  const double aa = std::abs(alpha);
  DenseMatrix a = block_matrix(t);
  DenseMatrix mod_block(0);
  if (t.block_size() > 0) {
    EigResult eig = dense_sym_eig(a.adjoint() * a);
    mod_block = detail::spectral_function(eig, [](double l) { return std::sqrt(std::max(0.0, l)); });
  }
  TailRule tail;
  if (!t.tail().is_zero()) {
    const TailRule& d = t.tail();
    tail.entry = std::make_shared<ModShiftExpr>(alpha, d.entry);
    tail.envelope = d.envelope;
    tail.is_real = true;
    tail.sign = {SignKind::Complex, 1};
    if (aa == 0.0) {
      // |d(n)|: nonnegative, strict wherever d is
      if (d.sign.kind == SignKind::IdenticallyZero)
        tail.sign = d.sign;
      else if (d.sign.kind != SignKind::Complex)
        tail.sign = {SignKind::EventuallyNonneg, d.sign.from};
    } else if (alpha.imag() == 0.0 && d.is_real && d.sign.kind != SignKind::Complex) {
      // beyond env < |alpha| the entry equals sign(alpha) * d(n)
      const std::int64_t idx = env_below_index(d.envelope, aa);
      if (d.sign.kind == SignKind::IdenticallyZero) {
        tail.sign = {SignKind::IdenticallyZero, std::max(d.sign.from, idx)};
      } else {
        SignKind k = d.sign.kind;
        if (alpha.real() < 0.0)
          k = (k == SignKind::EventuallyNonneg) ? SignKind::EventuallyNonpos
                                                : SignKind::EventuallyNonneg;
        tail.sign = {k, std::max(d.sign.from, idx)};
      }
    }
  }
  (void)tol;
  return make_operator(aa, t.block_size(), detail::deviation_block(mod_block, aa), std::move(tail));
}

/// Certified positivity check: self-adjoint and min sigma(T) >= -tol.
inline bool is_positive(const StructuredOperator& t, double tol = kDefaultTol) {
  if (!is_self_adjoint(t, tol)) return false;
  const double alpha = t.scalar().real();
  if (alpha < -tol) return false;
  if (t.block_size() > 0) {
    EigResult eig = dense_sym_eig(block_matrix(t));
    if (!eig.values.empty() && eig.values.back() < -tol - eig.residual) return false;
  }
  if (!t.tail().is_zero()) {
    TailBounds tb = tail_bounds(t.tail(), t.block_size(), std::max(tol, 1e-13));
    if (alpha + tb.inf_lo < -tol) return false;
  }
  return true;
}

/// Positive square root of a positive operator: scalar sqrt(alpha), dense
/// block square root, sqrt-shift tail nodes with envelope rule
/// |sqrt(a+x) - sqrt(a)| <= |x|/sqrt(a) for a > 0 and term-wise sqrt when
/// alpha = 0 (requires a settled nonnegative tail sign).
inline StructuredOperator sqrt_positive(const StructuredOperator& t, double tol = kDefaultTol) {
  if (!is_positive(t, tol)) throw not_positive("sqrt_positive requires a positive operator");
  const double alpha = std::max(0.0, t.scalar().real());
  const double root = std::sqrt(alpha);
  DenseMatrix sqrt_block(0);
  if (t.block_size() > 0) {
    EigResult eig = dense_sym_eig(block_matrix(t));
    sqrt_block = detail::spectral_function(eig, [](double l) { return std::sqrt(std::max(0.0, l)); });
  }
  TailRule tail;
  if (!t.tail().is_zero()) {
    const TailRule& d = t.tail();
    if (alpha == 0.0 && d.sign.kind != SignKind::EventuallyNonneg &&
        d.sign.kind != SignKind::IdenticallyZero)
      throw sign_undecidable("sqrt of a zero-scalar tail needs a settled nonnegative sign");
    tail.entry = std::make_shared<SqrtShiftExpr>(alpha, d.entry);
    tail.is_real = true;
    tail.sign = d.sign;
    tail.envelope = alpha > 0.0 ? env_scale(1.0 / root, d.envelope) : env_sqrt(d.envelope);
  }
  return make_operator(root, t.block_size(), detail::deviation_block(sqrt_block, root),
                       std::move(tail));
}

/// Unique positive/negative parts of a self-adjoint operator:
/// T = T+ - T-, T+ T- = 0, both positive.
inline std::pair<StructuredOperator, StructuredOperator> pos_neg_parts(
    const StructuredOperator& t_in, double tol = kDefaultTol) {
  if (!is_self_adjoint(t_in, tol)) throw not_self_adjoint("pos_neg_parts requires self-adjoint input");
  const double alpha = t_in.scalar().real();

  StructuredOperator t = t_in;
  SignKind tail_side;  // which part receives the tail rule
  if (!t.tail().is_zero()) {
    if (alpha != 0.0) {
      const std::int64_t idx = env_below_index(t.tail().envelope, std::abs(alpha));
      t = promote(t, std::max(t.block_size(), idx - 1));
      tail_side = alpha > 0.0 ? SignKind::EventuallyNonneg : SignKind::EventuallyNonpos;
    } else {
      const SignTag tag = t.tail().sign;
      if (tag.kind == SignKind::Complex)
        throw sign_undecidable("pos_neg_parts: tail sign of a zero-scalar operator is undecidable");
      t = promote(t, std::max(t.block_size(), tag.from - 1));
      tail_side = tag.kind;
    }
  } else {
    tail_side = SignKind::IdenticallyZero;
  }

  const double ap = std::max(alpha, 0.0);
  const double am = std::max(-alpha, 0.0);
  DenseMatrix plus_block(0), minus_block(0);
  if (t.block_size() > 0) {
    EigResult eig = dense_sym_eig(block_matrix(t));
    plus_block = detail::spectral_function(eig, [](double l) { return std::max(l, 0.0); });
    minus_block = detail::spectral_function(eig, [](double l) { return std::max(-l, 0.0); });
  }
  TailRule plus_tail = TailRule::zero(), minus_tail = TailRule::zero();
  if (tail_side == SignKind::EventuallyNonneg) {
    plus_tail = t.tail();
  } else if (tail_side == SignKind::EventuallyNonpos) {
    minus_tail = tail_scale(-1.0, t.tail());
  }
  auto t_plus = make_operator(ap, t.block_size(), detail::deviation_block(plus_block, ap),
                              std::move(plus_tail));
  auto t_minus = make_operator(am, t.block_size(), detail::deviation_block(minus_block, am),
                               std::move(minus_tail));
  return {std::move(t_plus), std::move(t_minus)};
}

// ---------------------------------------------------------------------------
// polar decomposition / inversion
// ---------------------------------------------------------------------------

struct PolarPair {
  StructuredOperator v;        // partial isometry
  StructuredOperator modulus;  // |T|, positive
};

/// T = V |T| with N(V) = N(T). Requires alpha != 0, or a settled real tail
/// sign when alpha = 0 (otherwise the phase sequence does not converge and V
/// leaves the structured class).
inline PolarPair polar(const StructuredOperator& t_in, double tol = kDefaultTol) {
  const cplx alpha = t_in.scalar();
  const double aa = std::abs(alpha);

  StructuredOperator t = t_in;
  cplx v_scalar;
  TailRule v_tail = TailRule::zero();
  if (aa != 0.0) {
    v_scalar = alpha / aa;
    if (!t.tail().is_zero()) {
      const std::int64_t idx = env_below_index(t.tail().envelope, aa);
      t = promote(t, std::max(t.block_size(), idx - 1));
      if (alpha.imag() == 0.0 && t.tail().is_real) {
        // sign(alpha + d) = sign(alpha) beyond the promote point: zero tail
      } else {
        v_tail.entry = std::make_shared<PhaseShiftExpr>(alpha, t.tail().entry);
        v_tail.envelope = env_scale(2.0 / aa, t.tail().envelope);
        v_tail.envelope.valid_from = std::max(v_tail.envelope.valid_from, idx);
        v_tail.is_real = false;
        v_tail.sign = {SignKind::Complex, 1};
      }
    }
  } else {
    const SignTag tag = t.tail().sign;
    if (!t.tail().is_real || tag.kind == SignKind::Complex)
      throw unsupported_polar("polar with zero scalar requires a settled real tail sign");
    t = promote(t, std::max(t.block_size(), tag.from - 1));
    switch (tag.kind) {
      case SignKind::EventuallyNonneg:
        v_scalar = 1.0;
        break;
      case SignKind::EventuallyNonpos:
        v_scalar = -1.0;
        break;
      default:  // IdenticallyZero: T is block-only beyond the promote point
        v_scalar = 0.0;
        break;
    }
  }

  // block: V_A = A |A|^+ computed through the eigenbasis of A*A (unique,
  // independent of basis choices inside degenerate eigenspaces)
  const std::int64_t nb = t.block_size();
  DenseMatrix v_block(0), mod_block(0);
  if (nb > 0) {
    DenseMatrix a = block_matrix(t);
    EigResult eig = dense_sym_eig(a.adjoint() * a);
    const double top = eig.values.empty() ? 0.0 : std::sqrt(std::max(0.0, eig.values.front()));
    const double cut = std::max(tol, 1e-12) * std::max(1.0, top);
    mod_block = detail::spectral_function(eig, [](double l) { return std::sqrt(std::max(0.0, l)); });
    DenseMatrix pinv = detail::spectral_function(eig, [cut](double l) {
      const double s = std::sqrt(std::max(0.0, l));
      return s > cut ? 1.0 / s : 0.0;
    });
    v_block = a * pinv;
  }

  // |T| tail mirrors modulus(); reuse it on the promoted operator
  StructuredOperator mod = modulus(t, tol);

  PolarPair out{make_operator(v_scalar, nb, detail::deviation_block(v_block, v_scalar),
                              std::move(v_tail)),
                std::move(mod)};
  return out;
}

/// T^{-1} for operators certifiably bounded below: scalar 1/alpha, dense
/// block inverse, reciprocal-shift tail nodes with envelope
/// env(n) / (|alpha| (|alpha| - env(valid_from))).
inline StructuredOperator invert(const StructuredOperator& t_in, double tol = kDefaultTol) {
  MinModulusReport mm = min_modulus(t_in, tol);
  if (!(mm.value > tol + mm.error_bound))
    throw not_invertible("0 is not certifiably outside the spectrum");
  const cplx alpha = t_in.scalar();
  const double aa = std::abs(alpha);
  // alpha lies in the spectrum, so invertibility forces alpha != 0
  StructuredOperator t = t_in;
  TailRule inv_tail = TailRule::zero();
  if (!t.tail().is_zero()) {
    const std::int64_t idx = env_below_index(t.tail().envelope, aa / 2.0);
    t = promote(t, std::max(t.block_size(), idx - 1));
    const TailRule& d = t.tail();
    inv_tail.entry = std::make_shared<RecipShiftExpr>(alpha, d.entry);
    inv_tail.envelope = env_scale(2.0 / (aa * aa), d.envelope);
    inv_tail.envelope.valid_from = std::max(inv_tail.envelope.valid_from, idx);
    inv_tail.is_real = alpha.imag() == 0.0 && d.is_real;
    inv_tail.sign = {SignKind::Complex, 1};
    if (inv_tail.is_real && d.sign.kind != SignKind::Complex) {
      if (d.sign.kind == SignKind::IdenticallyZero) {
        inv_tail.sign = {SignKind::IdenticallyZero, std::max(d.sign.from, idx)};
      } else {
        // -d / (alpha (alpha + d)): denominator positive for real alpha once
        // |d| < |alpha|, so the sign flips
        const SignKind k = d.sign.kind == SignKind::EventuallyNonneg ? SignKind::EventuallyNonpos
                                                                     : SignKind::EventuallyNonneg;
        inv_tail.sign = {k, std::max(d.sign.from, idx)};
      }
    }
  }
  const std::int64_t nb = t.block_size();
  DenseMatrix inv_block(0);
  if (nb > 0) inv_block = dense_inverse(block_matrix(t));
  const cplx inv_scalar = 1.0 / alpha;
  return make_operator(inv_scalar, nb, detail::deviation_block(inv_block, inv_scalar),
                       std::move(inv_tail));
}

}  // namespace spectrakit
