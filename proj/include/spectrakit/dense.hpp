#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "spectrakit/operator.hpp"

namespace spectrakit {

/// Dense complex matrix, row-major. Finite sections of structured operators
/// and the independent brute-force side of every cross-check.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::int64_t n) : n_(n), a_(static_cast<std::size_t>(n) * n, cplx{0, 0}) {}
  DenseMatrix(std::int64_t n, std::vector<cplx> entries) : n_(n), a_(std::move(entries)) {}

  std::int64_t size() const { return n_; }
  cplx& at(std::int64_t i, std::int64_t j) { return a_[i * n_ + j]; }
  cplx at(std::int64_t i, std::int64_t j) const { return a_[i * n_ + j]; }
  const std::vector<cplx>& data() const { return a_; }

  static DenseMatrix identity(std::int64_t n) {
    DenseMatrix m(n);
    for (std::int64_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  DenseMatrix adjoint() const {
    DenseMatrix m(n_);
    for (std::int64_t i = 0; i < n_; ++i)
      for (std::int64_t j = 0; j < n_; ++j) m.at(i, j) = std::conj(at(j, i));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
  }

  double hermitian_defect() const {
    double s = 0.0;
    for (std::int64_t i = 0; i < n_; ++i)
      for (std::int64_t j = 0; j < n_; ++j) s += std::norm(at(i, j) - std::conj(at(j, i)));
    return std::sqrt(s);
  }

 private:
  std::int64_t n_ = 0;
  std::vector<cplx> a_;
};

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  const std::int64_t n = a.size();
  DenseMatrix c(n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t k = 0; k < n; ++k) {
      const cplx aik = a.at(i, k);
      if (aik == cplx{0, 0}) continue;
      for (std::int64_t j = 0; j < n; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

inline DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.size());
  for (std::int64_t i = 0; i < a.size(); ++i)
    for (std::int64_t j = 0; j < a.size(); ++j) c.at(i, j) = a.at(i, j) + b.at(i, j);
  return c;
}

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.size());
  for (std::int64_t i = 0; i < a.size(); ++i)
    for (std::int64_t j = 0; j < a.size(); ++j) c.at(i, j) = a.at(i, j) - b.at(i, j);
  return c;
}

/// Exact M x M finite section <T e_j, e_i>.
inline DenseMatrix truncate(const StructuredOperator& t, std::int64_t m) {
  if (m < 1) throw precondition_error("truncate requires M >= 1");
  DenseMatrix out(m);
  const std::int64_t nb = std::min(m, t.block_size());
  for (std::int64_t i = 0; i < nb; ++i)
    for (std::int64_t j = 0; j < nb; ++j) out.at(i, j) = t.block_at(i, j);
  for (std::int64_t i = 0; i < m; ++i) out.at(i, i) += t.scalar();
  for (std::int64_t k = t.block_size() + 1; k <= m; ++k) out.at(k - 1, k - 1) += t.tail().at(k);
  return out;
}

struct EigResult {
  std::vector<double> values;  // descending
  DenseMatrix vectors;         // columns, orthonormal
  double residual = 0.0;       // final off-diagonal Frobenius norm
};

/// Cyclic Jacobi for complex Hermitian matrices. Off-diagonal threshold
/// 1e-12 (relative to the Frobenius norm), sweep cap 60.
inline EigResult dense_sym_eig(const DenseMatrix& m_in, double tol = 1e-12) {
  const std::int64_t n = m_in.size();
  if (m_in.hermitian_defect() > 1e-10 * std::max(1.0, m_in.frobenius()))
    throw not_hermitian("dense_sym_eig input is not Hermitian");
  DenseMatrix a = m_in;
  // enforce exact Hermitian symmetry
  for (std::int64_t i = 0; i < n; ++i) {
    a.at(i, i) = cplx{a.at(i, i).real(), 0.0};
    for (std::int64_t j = 0; j < i; ++j) {
      const cplx v = 0.5 * (a.at(i, j) + std::conj(a.at(j, i)));
      a.at(i, j) = v;
      a.at(j, i) = std::conj(v);
    }
  }
  DenseMatrix q = DenseMatrix::identity(n);
  const double scale = std::max(1.0, a.frobenius());
  const double thresh = 1e-12 * scale;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a.at(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  const int max_sweeps = 60;
  while (off_norm() > std::max(thresh, tol * scale) && sweep < max_sweeps) {
    ++sweep;
    for (std::int64_t p = 0; p < n - 1; ++p) {
      for (std::int64_t qq = p + 1; qq < n; ++qq) {
        const cplx apq = a.at(p, qq);
        if (std::abs(apq) <= thresh * 1e-3) continue;
        // phase rotation making the pivot real, then a real Jacobi rotation
        const double mod = std::abs(apq);
        const cplx w = std::conj(apq) / mod;  // w * apq = |apq|
        const double app = a.at(p, p).real();
        const double aqq = a.at(qq, qq).real();
        const double theta = (aqq - app) / (2.0 * mod);
        const double tt = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tt * tt + 1.0);
        const double s = tt * c;
        // G = diag(1, w) * [[c, s], [-s, c]] on coordinates (p, q); A <- G^* A G
        const cplx g00 = c, g01 = s, g10 = -s * w, g11 = c * w;
        for (std::int64_t i = 0; i < n; ++i) {  // columns: A <- A G
          const cplx aip = a.at(i, p), aiq = a.at(i, qq);
          a.at(i, p) = aip * g00 + aiq * g10;
          a.at(i, qq) = aip * g01 + aiq * g11;
        }
        for (std::int64_t j = 0; j < n; ++j) {  // rows: A <- G^* A
          const cplx apj = a.at(p, j), aqj = a.at(qq, j);
          a.at(p, j) = std::conj(g00) * apj + std::conj(g10) * aqj;
          a.at(qq, j) = std::conj(g01) * apj + std::conj(g11) * aqj;
        }
        for (std::int64_t i = 0; i < n; ++i) {
          const cplx qip = q.at(i, p), qiq = q.at(i, qq);
          q.at(i, p) = qip * g00 + qiq * g10;
          q.at(i, qq) = qip * g01 + qiq * g11;
        }
        a.at(p, qq) = 0.0;
        a.at(qq, p) = 0.0;
      }
    }
  }
  const double resid = off_norm();
  if (resid > std::max(thresh, tol * scale) && sweep >= max_sweeps)
    throw no_convergence("Jacobi sweep cap reached");

  EigResult out;
  out.residual = resid;
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (std::int64_t i = 0; i < n; ++i) diag[i] = a.at(i, i).real();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int64_t x, std::int64_t y) { return diag[x] > diag[y]; });
  out.values.resize(n);
  out.vectors = DenseMatrix(n);
  for (std::int64_t k = 0; k < n; ++k) {
    out.values[k] = diag[order[k]];
    for (std::int64_t i = 0; i < n; ++i) out.vectors.at(i, k) = q.at(i, order[k]);
  }
  return out;
}

/// Operator norm: sqrt of the top eigenvalue of M^* M.
inline double dense_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  EigResult e = dense_sym_eig(m.adjoint() * m);
  return std::sqrt(std::max(0.0, e.values.empty() ? 0.0 : e.values.front()));
}

struct Svd {
  std::vector<double> singular;  // descending
  DenseMatrix u;                 // columns for singular values above cutoff; zero otherwise
  DenseMatrix v;                 // right singular vectors (columns)
};

/// SVD via the eigendecomposition of M^* M with left vectors from
/// back-substitution, re-orthonormalized by modified Gram-Schmidt.
inline Svd dense_svd(const DenseMatrix& m, double tol = 1e-12) {
  const std::int64_t n = m.size();
  EigResult e = dense_sym_eig(m.adjoint() * m);
  Svd out;
  out.v = e.vectors;
  out.u = DenseMatrix(n);
  out.singular.resize(n);
  const double scale = std::max(1.0, std::sqrt(std::max(0.0, e.values.empty() ? 0.0 : e.values[0])));
  for (std::int64_t k = 0; k < n; ++k) {
    const double s = std::sqrt(std::max(0.0, e.values[k]));
    out.singular[k] = s;
    if (s > tol * scale) {
      // u_k = M v_k / s, then orthogonalize against previous columns
      std::vector<cplx> col(n, cplx{0, 0});
      for (std::int64_t i = 0; i < n; ++i) {
        cplx acc{0, 0};
        for (std::int64_t j = 0; j < n; ++j) acc += m.at(i, j) * e.vectors.at(j, k);
        col[i] = acc / s;
      }
      for (std::int64_t prev = 0; prev < k; ++prev) {
        cplx proj{0, 0};
        for (std::int64_t i = 0; i < n; ++i) proj += col[i] * std::conj(out.u.at(i, prev));
        for (std::int64_t i = 0; i < n; ++i) col[i] -= proj * out.u.at(i, prev);
      }
      double nm = 0.0;
      for (const auto& v : col) nm += std::norm(v);
      nm = std::sqrt(nm);
      if (nm > 0.0)
        for (std::int64_t i = 0; i < n; ++i) out.u.at(i, k) = col[i] / nm;
    }
  }
  return out;
}

/// Orthonormal basis of the kernel: eigenvectors of M^* M with ||Mv|| <= tol.
inline std::vector<std::vector<cplx>> dense_kernel(const DenseMatrix& m, double tol) {
  const std::int64_t n = m.size();
  EigResult e = dense_sym_eig(m.adjoint() * m);
  std::vector<std::vector<cplx>> out;
  // threshold in the squared domain: computed eigenvalues of M*M carry an
  // absolute error up to the iteration residual, which dominates tol^2
  const double scale = e.values.empty() ? 1.0 : std::max(1.0, std::abs(e.values.front()));
  const double thresh =
      tol * tol * scale + e.residual +
      64.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
  for (std::int64_t k = 0; k < n; ++k) {
    if (e.values[k] <= thresh) {
      std::vector<cplx> v(n);
      for (std::int64_t i = 0; i < n; ++i) v[i] = e.vectors.at(i, k);
      out.push_back(std::move(v));
    }
  }
  return out;
}

/// LU inverse with partial pivoting (internal utility, not an oracle surface).
inline DenseMatrix dense_inverse(const DenseMatrix& m_in) {
  const std::int64_t n = m_in.size();
  DenseMatrix a = m_in;
  DenseMatrix inv = DenseMatrix::identity(n);
  for (std::int64_t col = 0; col < n; ++col) {
    std::int64_t piv = col;
    for (std::int64_t i = col + 1; i < n; ++i)
      if (std::abs(a.at(i, col)) > std::abs(a.at(piv, col))) piv = i;
    if (std::abs(a.at(piv, col)) == 0.0) throw not_invertible("singular dense block");
    if (piv != col)
      for (std::int64_t j = 0; j < n; ++j) {
        std::swap(a.at(piv, j), a.at(col, j));
        std::swap(inv.at(piv, j), inv.at(col, j));
      }
    const cplx d = a.at(col, col);
    for (std::int64_t j = 0; j < n; ++j) {
      a.at(col, j) /= d;
      inv.at(col, j) /= d;
    }
    for (std::int64_t i = 0; i < n; ++i) {
      if (i == col) continue;
      const cplx f = a.at(i, col);
      if (f == cplx{0, 0}) continue;
      for (std::int64_t j = 0; j < n; ++j) {
        a.at(i, j) -= f * a.at(col, j);
        inv.at(i, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

/// Dense block alpha*I + B of a structured operator.
inline DenseMatrix block_matrix(const StructuredOperator& t) {
  const std::int64_t n = t.block_size();
  DenseMatrix m(n);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) m.at(i, j) = t.block_at(i, j);
    m.at(i, i) += t.scalar();
  }
  return m;
}

}  // namespace spectrakit
