#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "spectrakit/tail.hpp"

namespace spectrakit {

constexpr double kDefaultTol = 1e-9;

/// Finitely supported vector in l^2, 1-based coordinates.
struct FinVector {
  std::map<std::int64_t, cplx> coords;

  static FinVector basis(std::int64_t n) {
    FinVector v;
    v.coords[n] = 1.0;
    return v;
  }

  cplx at(std::int64_t n) const {
    auto it = coords.find(n);
    return it == coords.end() ? cplx{0.0, 0.0} : it->second;
  }

  void set(std::int64_t n, cplx v) {
    if (v == cplx{0.0, 0.0})
      coords.erase(n);
    else
      coords[n] = v;
  }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& [n, v] : coords) s += std::norm(v);
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }

  /// <*this, other>
  cplx inner(const FinVector& other) const {
    cplx s{0.0, 0.0};
    for (const auto& [n, v] : coords) s += v * std::conj(other.at(n));
    return s;
  }

  FinVector& operator+=(const FinVector& o) {
    for (const auto& [n, v] : o.coords) set(n, at(n) + v);
    return *this;
  }

  FinVector scaled(cplx f) const {
    FinVector out;
    if (f == cplx{0.0, 0.0}) return out;
    for (const auto& [n, v] : coords) out.coords[n] = f * v;
    return out;
  }

  FinVector normalized() const {
    const double m = norm();
    return m == 0.0 ? *this : scaled(1.0 / m);
  }
};

inline FinVector operator+(FinVector a, const FinVector& b) {
  a += b;
  return a;
}
inline FinVector operator-(FinVector a, const FinVector& b) {
  a += b.scaled(-1.0);
  return a;
}

/// Unit vector (within tolerance) together with the value it certifies.
struct Witness {
  FinVector vector;
  cplx value{0.0, 0.0};
};

/// Operator alpha*I + B + D_tail on l^2: a complex scalar, a dense N x N
/// deviation block B acting on coordinates 1..N, and a diagonal tail with
/// entries d_n for n > N carrying a certified decay envelope. The block and
/// tail coordinates reduce the operator exactly.
class StructuredOperator {
 public:
  StructuredOperator() = default;
  StructuredOperator(cplx scalar, std::int64_t n, std::vector<cplx> block, TailRule tail)
      : scalar_(scalar), n_(n), block_(std::move(block)), tail_(std::move(tail)) {}

  cplx scalar() const { return scalar_; }
  std::int64_t block_size() const { return n_; }
  const std::vector<cplx>& block() const { return block_; }
  const TailRule& tail() const { return tail_; }

  cplx block_at(std::int64_t i, std::int64_t j) const { return block_[i * n_ + j]; }  // 0-based

  /// Diagonal entry for a tail coordinate n > block_size: alpha + d_n.
  cplx diag_entry(std::int64_t n) const { return scalar_ + tail_.at(n); }

  /// Matrix element <T e_j, e_i>, 1-based.
  cplx entry(std::int64_t i, std::int64_t j) const {
    if (i <= n_ && j <= n_) {
      cplx v = block_at(i - 1, j - 1);
      if (i == j) v += scalar_;
      return v;
    }
    if (i == j) return diag_entry(i);
    return {0.0, 0.0};
  }

 private:
  cplx scalar_{0.0, 0.0};
  std::int64_t n_ = 0;
  std::vector<cplx> block_;  // row-major deviation B (action is alpha*I + B)
  TailRule tail_;
};

inline StructuredOperator make_operator(cplx scalar, std::int64_t n, std::vector<cplx> block,
                                        TailRule tail);

/// Extends the block by folding tail diagonal entries into it; the operator's
/// action on every basis vector is unchanged.
inline StructuredOperator promote(const StructuredOperator& t, std::int64_t n_new) {
  if (n_new <= t.block_size()) return t;
  const std::int64_t n0 = t.block_size();
  std::vector<cplx> b(static_cast<std::size_t>(n_new) * n_new, cplx{0.0, 0.0});
  for (std::int64_t i = 0; i < n0; ++i)
    for (std::int64_t j = 0; j < n0; ++j) b[i * n_new + j] = t.block_at(i, j);
  for (std::int64_t k = n0 + 1; k <= n_new; ++k) b[(k - 1) * n_new + (k - 1)] = t.tail().at(k);
  return StructuredOperator(t.scalar(), n_new, std::move(b), t.tail());
}

inline StructuredOperator make_operator(cplx scalar, std::int64_t n, std::vector<cplx> block,
                                        TailRule tail) {
  if (n < 0 || block.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw precondition_error("block must be square and match block_size");
  tail.envelope.validate();
  StructuredOperator t(scalar, n, std::move(block), std::move(tail));
  // envelope validity must start inside the tail range
  if (t.tail().envelope.valid_from > n + 1) return promote(t, t.tail().envelope.valid_from - 1);
  return t;
}

inline StructuredOperator identity_op() { return make_operator(1.0, 0, {}, TailRule::zero()); }
inline StructuredOperator zero_op() { return make_operator(0.0, 0, {}, TailRule::zero()); }
inline StructuredOperator scalar_op(cplx a) { return make_operator(a, 0, {}, TailRule::zero()); }

/// diag tail operator with entries given by a term sum (block empty).
inline StructuredOperator diag_op(TermList terms) {
  return make_operator(0.0, 0, {}, TailRule::from_terms(std::move(terms)));
}

/// Rank-one operator u (x) v : x -> <x, v> u, embedded in a finite block.
inline StructuredOperator outer_op(const FinVector& u, const FinVector& v) {
  std::int64_t n = 0;
  for (const auto& [k, _] : u.coords) n = std::max(n, k);
  for (const auto& [k, _] : v.coords) n = std::max(n, k);
  std::vector<cplx> b(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
  for (const auto& [i, ui] : u.coords)
    for (const auto& [j, vj] : v.coords) b[(i - 1) * n + (j - 1)] = ui * std::conj(vj);
  return make_operator(0.0, n, std::move(b), TailRule::zero());
}

inline std::pair<StructuredOperator, StructuredOperator> align(const StructuredOperator& a,
                                                               const StructuredOperator& b) {
  const std::int64_t n = std::max(a.block_size(), b.block_size());
  return {promote(a, n), promote(b, n)};
}

inline StructuredOperator add(const StructuredOperator& t1, const StructuredOperator& t2) {
  auto [a, b] = align(t1, t2);
  const std::int64_t n = a.block_size();
  std::vector<cplx> blk(a.block());
  for (std::size_t i = 0; i < blk.size(); ++i) blk[i] += b.block()[i];
  return make_operator(a.scalar() + b.scalar(), n, std::move(blk),
                       tail_add(a.tail(), b.tail()));
}

inline StructuredOperator scale(cplx f, const StructuredOperator& t) {
  std::vector<cplx> blk(t.block());
  for (auto& v : blk) v *= f;
  return make_operator(f * t.scalar(), t.block_size(), std::move(blk), tail_scale(f, t.tail()));
}

inline StructuredOperator sub(const StructuredOperator& a, const StructuredOperator& b) {
  return add(a, scale(-1.0, b));
}

inline StructuredOperator multiply(const StructuredOperator& t1, const StructuredOperator& t2) {
  auto [a, b] = align(t1, t2);
  const std::int64_t n = a.block_size();
  const cplx a1 = a.scalar(), a2 = b.scalar();
  std::vector<cplx> blk(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      cplx v = a1 * b.block_at(i, j) + a2 * a.block_at(i, j);
      for (std::int64_t k = 0; k < n; ++k) v += a.block_at(i, k) * b.block_at(k, j);
      blk[i * n + j] = v;
    }
  TailRule tail = tail_add(tail_add(tail_scale(a1, b.tail()), tail_scale(a2, a.tail())),
                           tail_mul(a.tail(), b.tail()));
  return make_operator(a1 * a2, n, std::move(blk), std::move(tail));
}

inline StructuredOperator adjoint(const StructuredOperator& t) {
  const std::int64_t n = t.block_size();
  std::vector<cplx> blk(static_cast<std::size_t>(n) * n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) blk[i * n + j] = std::conj(t.block_at(j, i));
  return make_operator(std::conj(t.scalar()), n, std::move(blk), tail_conj(t.tail()));
}

/// T*T as a structured operator, with the tail entry wrapped to be exactly
/// real and the block Hermitian-symmetrized (both are mathematical
/// identities for a Gram operator).
inline StructuredOperator gram(const StructuredOperator& t) {
  StructuredOperator p = multiply(adjoint(t), t);
  const std::int64_t n = p.block_size();
  std::vector<cplx> blk(p.block());
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j <= i; ++j) {
      const cplx v = 0.5 * (blk[i * n + j] + std::conj(blk[j * n + i]));
      blk[i * n + j] = v;
      blk[j * n + i] = std::conj(v);
    }
  return StructuredOperator(cplx{std::norm(t.scalar()), 0.0}, n, std::move(blk),
                            tail_re(p.tail()));
}

inline FinVector apply(const StructuredOperator& t, const FinVector& x) {
  FinVector y;
  const std::int64_t n = t.block_size();
  bool block_touched = false;
  for (const auto& [k, v] : x.coords) {
    if (k <= n)
      block_touched = true;
    else
      y.set(k, t.diag_entry(k) * v);
  }
  if (block_touched) {
    for (std::int64_t i = 1; i <= n; ++i) {
      cplx s = t.scalar() * x.at(i);
      for (const auto& [k, v] : x.coords)
        if (k <= n) s += t.block_at(i - 1, k - 1) * v;
      y.set(i, s);
    }
  }
  return y;
}

/// Smallest index N* >= block_size with env(n) < eps strictly for all
/// n > N* (monotone doubling plus binary search on the envelope).
inline std::int64_t tail_cutoff(const StructuredOperator& t, double eps) {
  if (!(eps > 0.0)) throw precondition_error("tail_cutoff requires eps > 0");
  const auto& env = t.tail().envelope;
  if (t.tail().is_zero() || env.is_zero()) return t.block_size();
  // smallest n >= valid_from with env(n) < eps; env is monotone there
  const std::int64_t n0 = env.valid_from;
  if (env.at(n0) < eps) return t.block_size();
  std::int64_t lo = n0, hi = 2 * n0;
  while (!(env.at(hi) < eps)) {
    lo = hi;
    hi *= 2;
    if (hi > (std::int64_t{1} << 50)) throw convergence_error("tail_cutoff: envelope decays too slowly");
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (env.at(mid) < eps)
      hi = mid;
    else
      lo = mid;
  }
  return std::max(t.block_size(), hi - 1);
}

}  // namespace spectrakit
