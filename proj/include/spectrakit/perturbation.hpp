#pragma once

#include "spectrakit/an.hpp"

namespace spectrakit {

/// Orthogonal spectral projections of a positive contraction L for the
/// intervals [0, cut] and (cut, 1] with cut = 1 - alpha/2.
struct SliceProjections {
  StructuredOperator p_gamma;
  StructuredOperator p_rho;
};

inline SliceProjections slice_projections(const StructuredOperator& l_in, double alpha,
                                          double tol = kDefaultTol) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw precondition_error("alpha must lie in (0, 2)");
  if (!is_positive(l_in, tol)) throw not_positive("slice_projections requires a positive operator");
  if (operator_norm(l_in, tol).value > 1.0 + 10.0 * tol)
    throw precondition_failed("slice_projections requires a contraction");
  const double cut = 1.0 - alpha / 2.0;

  // promote until every remaining tail entry certifiably sits on one side of
  // cut + tol (the gamma-ward tie band)
  StructuredOperator l = l_in;
  bool tail_in_rho = false;
  const double s = l.scalar().real();
  if (!l.tail().is_zero()) {
    std::int64_t settle;
    if (s > cut + tol) {
      tail_in_rho = true;
      settle = env_below_index(l.tail().envelope, s - cut - tol);
    } else if (s < cut + tol) {
      settle = env_below_index(l.tail().envelope, cut + tol - s);
    } else {
      // essential point exactly on the tie boundary: the entry side is the
      // sign side of the tail
      const SignTag tag = l.tail().sign;
      if (tag.kind == SignKind::Complex)
        throw precondition_failed("tail entries straddle the slicing cut undecidably");
      tail_in_rho = tag.kind == SignKind::EventuallyNonneg;
      settle = tag.from;
    }
    l = promote(l, std::max(l.block_size(), settle - 1));
  } else {
    tail_in_rho = s > cut + tol;
  }

  const std::int64_t nb = l.block_size();
  const double g_scalar = tail_in_rho ? 0.0 : 1.0;
  const double r_scalar = 1.0 - g_scalar;
  DenseMatrix rho_block(nb);
  if (nb > 0) {
    EigResult eig = dense_sym_eig(block_matrix(l));
    rho_block = detail::spectral_function(eig, [&](double v) { return v > cut + tol ? 1.0 : 0.0; });
  }
  std::vector<cplx> rb(static_cast<std::size_t>(nb) * nb), gb(rb.size());
  for (std::int64_t i = 0; i < nb; ++i)
    for (std::int64_t j = 0; j < nb; ++j) {
      const cplx r = rho_block.at(i, j);
      rb[i * nb + j] = r - (i == j ? cplx{r_scalar, 0.0} : cplx{0.0, 0.0});
      gb[i * nb + j] = (i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0}) - r -
                       (i == j ? cplx{g_scalar, 0.0} : cplx{0.0, 0.0});
    }
  SliceProjections out{make_operator(g_scalar, nb, std::move(gb), TailRule::zero()),
                       make_operator(r_scalar, nb, std::move(rb), TailRule::zero())};
  return out;
}

/// J = L P_gamma + P_rho: identity on the top spectral slice, L elsewhere.
/// ||J - L|| <= alpha/2 and ||J|| = 1 whenever the top slice is nonempty.
struct FlattenResult {
  StructuredOperator j;
  bool empty_top = false;  // P_rho = 0, so ||J|| < 1; reported, not fatal
};

inline FlattenResult flatten_top(const StructuredOperator& l, double alpha,
                                 double tol = kDefaultTol) {
  SliceProjections sp = slice_projections(l, alpha, tol);
  FlattenResult out;
  out.j = add(multiply(l, sp.p_gamma), sp.p_rho);
  const double rho_mass = operator_norm(sp.p_rho, tol).value;
  out.empty_top = rho_mass <= 0.5;  // projection norm is 0 or 1
  const double drift = operator_norm(sub(out.j, l), tol).value;
  if (drift > alpha / 2.0 + 10.0 * tol)
    throw precondition_failed("flattened operator drifted beyond alpha/2");
  if (!out.empty_top) {
    const double jn = operator_norm(out.j, tol).value;
    if (std::abs(jn - 1.0) > 10.0 * tol)
      throw precondition_failed("flattened operator failed to reach norm one");
  }
  return out;
}

/// Norm-attaining perturbation certificate: Z within alpha of S (normalized),
/// same norm, attaining it at eta with <Z eta, eta> = beta.
struct PerturbationCertificate {
  StructuredOperator z;
  Witness eta;
  double norm_preserved = 0.0;
  double distance = 0.0;
  cplx beta_achieved{0.0, 0.0};
};

/// Rank-one far-tail correction realizing the flatten-and-rotate perturbation
/// for the structured class: pick n* with env(n*) < alpha/2 and replace the
/// diagonal entry there by beta.
inline PerturbationCertificate attainify(const StructuredOperator& s_in, double alpha,
                                         std::optional<cplx> beta_opt, double tol = kDefaultTol) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw precondition_error("alpha must lie in (0, 2)");
  NormReport ns = operator_norm(s_in, tol);
  if (!(ns.value > 0.0)) throw precondition_failed("attainify requires a nonzero operator");
  StructuredOperator s = scale(1.0 / ns.value, s_in);
  const cplx sc = s.scalar();
  const cplx beta = beta_opt.value_or(sc);

  const double chk = std::max(tol, 1e-8);

  // trivial path: S already attains its norm at a witness with the right beta
  AttainReport ar = is_norm_attaining(s, tol);
  if (ar.verdict == Attainment::Yes) {
    const FinVector eta = ar.witness->vector;
    const cplx got = apply(s, eta).inner(eta);
    if (std::abs(got - beta) <= chk) {
      PerturbationCertificate out;
      out.z = s;
      out.eta = {eta, got};
      out.norm_preserved = 1.0;
      out.distance = 0.0;
      out.beta_achieved = got;
      return out;
    }
  }

  // the essential numerical range of this class is the singleton {scalar}
  if (std::abs(beta - sc) > chk)
    throw beta_outside_essential_range("beta must equal the scalar part of the normalized input");
  if (std::abs(std::abs(sc) - 1.0) > chk)
    throw no_witness_found("norm does not live at the essential point; no far-tail correction applies");
  if (s.tail().is_zero())
    throw no_witness_found("no tail coordinates available for the correction");

  const std::int64_t idx0 =
      std::max(env_below_index(s.tail().envelope, alpha / 2.0), s.block_size() + 1);
  for (std::int64_t n_star = idx0; n_star < idx0 + 16; ++n_star) {
    const cplx d = s.tail().at(n_star);
    StructuredOperator z = promote(s, n_star);
    std::vector<cplx> blk = z.block();
    blk[(n_star - 1) * n_star + (n_star - 1)] = beta - z.scalar();  // diagonal becomes beta
    z = make_operator(z.scalar(), n_star, std::move(blk), z.tail());

    const double distance = std::abs(beta - (sc + d));  // ||S - Z|| exactly (rank-one diagonal)
    if (!(distance < alpha)) continue;
    NormReport nz = operator_norm(z, tol);
    if (std::abs(nz.value - 1.0) > chk) continue;
    const FinVector eta = FinVector::basis(n_star);
    const cplx got = apply(z, eta).inner(eta);
    if (std::abs(got - beta) > chk) continue;
    if (apply(z, eta).norm() < nz.value - chk) continue;

    PerturbationCertificate out;
    out.z = std::move(z);
    out.eta = {eta, got};
    out.norm_preserved = nz.value;
    out.distance = distance;
    out.beta_achieved = got;
    return out;
  }
  throw no_witness_found("no admissible far-tail index passed the certificate checks");
}

}  // namespace spectrakit
