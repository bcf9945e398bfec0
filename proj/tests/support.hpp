#pragma once

#include <random>

#include "spectrakit.hpp"

namespace testgen {

using namespace spectrakit;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::int64_t pick(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline cplx random_cplx(Rng& rng, double mag) {
  return {uniform(rng, -mag, mag), uniform(rng, -mag, mag)};
}

/// 1-3 geometric/polynomial decay terms, real coefficients.
inline TermList random_terms(Rng& rng, double cmax = 1.0, bool complex_coeffs = false) {
  TermList terms;
  const std::int64_t k = pick(rng, 1, 3);
  for (std::int64_t i = 0; i < k; ++i) {
    const cplx c = complex_coeffs ? random_cplx(rng, cmax) : cplx{uniform(rng, -cmax, cmax), 0.0};
    terms.push_back({c, uniform(rng, 0.3, 0.9), static_cast<double>(pick(rng, 0, 2))});
  }
  return terms;
}

inline std::vector<cplx> random_block(Rng& rng, std::int64_t n, double mag = 1.0) {
  std::vector<cplx> b(static_cast<std::size_t>(n) * n);
  for (auto& v : b) v = random_cplx(rng, mag);
  return b;
}

inline std::vector<cplx> random_hermitian_block(Rng& rng, std::int64_t n, double mag = 1.0) {
  std::vector<cplx> b(static_cast<std::size_t>(n) * n);
  for (std::int64_t i = 0; i < n; ++i) {
    b[i * n + i] = {uniform(rng, -mag, mag), 0.0};
    for (std::int64_t j = 0; j < i; ++j) {
      const cplx v = random_cplx(rng, mag);
      b[i * n + j] = v;
      b[j * n + i] = std::conj(v);
    }
  }
  return b;
}

inline StructuredOperator random_operator(Rng& rng, std::int64_t n = 3) {
  return make_operator(random_cplx(rng, 1.0), n, random_block(rng, n),
                       TailRule::from_terms(random_terms(rng)));
}

inline StructuredOperator random_self_adjoint(Rng& rng, std::int64_t n = 3) {
  return make_operator(cplx{uniform(rng, -1.0, 1.0), 0.0}, n, random_hermitian_block(rng, n),
                       TailRule::from_terms(random_terms(rng)));
}

/// Random unitary columns via Gram-Schmidt on a random complex matrix.
inline DenseMatrix random_unitary(Rng& rng, std::int64_t n) {
  DenseMatrix u(n);
  for (std::int64_t k = 0; k < n; ++k) {
    std::vector<cplx> col(n);
    for (auto& v : col) v = random_cplx(rng, 1.0);
    for (std::int64_t prev = 0; prev < k; ++prev) {
      cplx proj{0, 0};
      for (std::int64_t i = 0; i < n; ++i) proj += col[i] * std::conj(u.at(i, prev));
      for (std::int64_t i = 0; i < n; ++i) col[i] -= proj * u.at(i, prev);
    }
    double nm = 0.0;
    for (const auto& v : col) nm += std::norm(v);
    nm = std::sqrt(nm);
    for (std::int64_t i = 0; i < n; ++i) u.at(i, k) = col[i] / nm;
  }
  return u;
}

/// Deviation block U diag(values) U^* - scalar I.
inline std::vector<cplx> conjugated_diag_block(const DenseMatrix& u, const std::vector<cplx>& values,
                                               cplx scalar) {
  const std::int64_t n = u.size();
  std::vector<cplx> b(static_cast<std::size_t>(n) * n, cplx{0, 0});
  for (std::int64_t k = 0; k < n; ++k)
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) b[i * n + j] += values[k] * u.at(i, k) * std::conj(u.at(j, k));
  for (std::int64_t i = 0; i < n; ++i) b[i * n + i] -= scalar;
  return b;
}

/// Positive contraction: spectrum inside [0, 1].
inline StructuredOperator random_positive_contraction(Rng& rng, std::int64_t n = 4) {
  const double s = uniform(rng, 0.2, 0.8);
  DenseMatrix u = random_unitary(rng, n);
  std::vector<cplx> eigs(n);
  for (auto& v : eigs) v = {uniform(rng, 0.0, 1.0), 0.0};
  const double cmax = std::min(s, 1.0 - s) * 0.9;
  TermList terms{{cplx{uniform(rng, -cmax, cmax), 0.0}, uniform(rng, 0.3, 0.8), 0.0}};
  return make_operator(s, n, conjugated_diag_block(u, eigs, s), TailRule::from_terms(terms));
}

}  // namespace testgen
