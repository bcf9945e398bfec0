#pragma once

#include "spectrakit/an.hpp"

namespace spectrakit {

struct MaximizerReport {
  StructuredOperator x;  // finite-block contraction / partial isometry
  double achieved = 0.0;
  double target = 0.0;
  std::vector<Witness> witnesses;
};

namespace detail {

/// Orthonormal candidates spanning the maximizing vectors of ||T x||: the top
/// eigenspace of T*T with any attained tail coordinate folded into the block.
inline std::vector<FinVector> norm_candidates(const StructuredOperator& t, double nrm, double tol) {
  StructuredOperator tp = t;
  {
    StructuredOperator g = gram(t);
    if (!g.tail().is_zero()) {
      const double eps = std::max(tol, 1e-13) * std::max(1.0, nrm * nrm);
      TailBounds tb = tail_bounds(g.tail(), g.block_size(), eps);
      if (tb.sup_att == TailAttain::Attained &&
          g.scalar().real() + tb.sup_lo >= nrm * nrm - 10.0 * eps)
        tp = promote(t, tb.sup_idx);
    }
  }
  std::vector<FinVector> out;
  if (tp.block_size() == 0) {
    // scalar operator: every unit vector maximizes
    out.push_back(FinVector::basis(1));
    return out;
  }
  EigResult eig = dense_sym_eig(block_matrix(gram(tp)));
  const double band = eig.residual + std::max(tol, 1e-9) * std::max(1.0, nrm * nrm);
  for (std::int64_t k = 0; k < tp.block_size() && out.size() < 8; ++k)
    if (eig.values[k] >= nrm * nrm - band) out.push_back(witness_from_column(eig.vectors, k));
  if (out.empty()) out.push_back(witness_from_column(eig.vectors, 0));
  return out;
}

/// Minimize |c^2 fuu + s^2 fvv + c s (e^{i theta} fvu + e^{-i theta} fuv) + c0|
/// over t in [0, pi/2], theta in [0, 2 pi): coarse grid plus shrinking refine.
struct FormMin {
  double t = 0.0, theta = 0.0;
  cplx value{0.0, 0.0};
};

inline FormMin minimize_form(cplx fuu, cplx fvv, cplx fuv, cplx fvu, cplx c0) {
  auto eval = [&](double t, double theta) {
    const double c = std::cos(t), s = std::sin(t);
    const cplx ph = std::polar(1.0, theta);
    return c * c * fuu + s * s * fvv + c * s * (ph * fvu + std::conj(ph) * fuv) + c0;
  };
  FormMin best;
  best.value = eval(0.0, 0.0);
  constexpr int kT = 33, kTh = 48;
  for (int i = 0; i <= kT; ++i)
    for (int j = 0; j < kTh; ++j) {
      const double t = (M_PI / 2.0) * i / kT;
      const double theta = (2.0 * M_PI) * j / kTh;
      const cplx v = eval(t, theta);
      if (std::abs(v) < std::abs(best.value)) best = {t, theta, v};
    }
  double step_t = (M_PI / 2.0) / kT, step_th = (2.0 * M_PI) / kTh;
  for (int iter = 0; iter < 80; ++iter) {
    FormMin round = best;
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        const double t = std::clamp(best.t + di * step_t, 0.0, M_PI / 2.0);
        const double theta = best.theta + dj * step_th;
        const cplx v = eval(t, theta);
        if (std::abs(v) < std::abs(round.value)) round = {t, theta, v};
      }
    if (std::abs(round.value) >= std::abs(best.value)) {
      step_t *= 0.5;
      step_th *= 0.5;
    } else {
      best = round;
    }
  }
  return best;
}

/// Search the candidate span for a unit vector making <T zeta, zeta> + c0
/// as small as possible; combines single candidates and all two-candidate
/// circles.
inline std::pair<FinVector, cplx> search_form_zero(const StructuredOperator& t,
                                                   const std::vector<FinVector>& cands, cplx c0) {
  std::vector<FinVector> images;
  images.reserve(cands.size());
  for (const auto& c : cands) images.push_back(apply(t, c));

  FinVector best_vec = cands.front().normalized();
  cplx best_val = images.front().inner(cands.front()) + c0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const cplx v = images[i].inner(cands[i]) + c0;
    if (std::abs(v) < std::abs(best_val)) {
      best_val = v;
      best_vec = cands[i].normalized();
    }
  }
  for (std::size_t i = 0; i < cands.size(); ++i)
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      const cplx fuu = images[i].inner(cands[i]);
      const cplx fvv = images[j].inner(cands[j]);
      const cplx fuv = images[i].inner(cands[j]);  // <T u, v>
      const cplx fvu = images[j].inner(cands[i]);  // <T v, u>
      FormMin fm = minimize_form(fuu, fvv, fuv, fvu, c0);
      if (std::abs(fm.value) < std::abs(best_val)) {
        best_val = fm.value;
        FinVector z = cands[i].scaled(std::cos(fm.t)) +
                      cands[j].scaled(std::sin(fm.t) * std::polar(1.0, fm.theta));
        best_vec = z.normalized();
      }
    }
  return {std::move(best_vec), best_val};
}

}  // namespace detail

/// Commutator maximizer for a single hyponormal norm-attaining operator E:
/// with a maximizing unit zeta orthogonal to E zeta, the map
/// X = zeta (x) zeta - (E zeta)(x)(E zeta)/||E zeta||^2 gives
/// ||E X - X E|| = 2 ||E||.
inline MaximizerReport maximizer_single(const StructuredOperator& e, double tol = kDefaultTol) {
  if (!classify(e, tol).hyponormal)
    throw precondition_failed("maximizer_single requires a hyponormal operator");
  AttainReport ar = is_norm_attaining(e, tol);
  if (ar.verdict != Attainment::Yes)
    throw norm_not_attained("maximizer_single requires an attained norm");
  const double nrm = ar.norm_value;

  auto cands = detail::norm_candidates(e, nrm, tol);
  auto [zeta, form] = detail::search_form_zero(e, cands, cplx{0.0, 0.0});
  if (std::abs(form) > std::max(tol, 1e-9) * std::max(1.0, nrm))
    throw precondition_failed("no maximizing vector orthogonal to its image");

  FinVector ez = apply(e, zeta);
  const double ez2 = ez.norm_sq();
  StructuredOperator x = outer_op(zeta, zeta);
  if (ez2 > tol * tol) x = sub(x, scale(1.0 / ez2, outer_op(ez, ez)));

  MaximizerReport out;
  out.target = 2.0 * nrm;
  out.achieved = operator_norm(sub(multiply(e, x), multiply(x, e)), tol).value;
  out.witnesses.push_back({zeta, form});
  out.x = std::move(x);
  return out;
}

/// Generalized commutator maximizer: with maximizing units zeta (for S) and
/// eta (for T) satisfying <S zeta, zeta>/||S|| = -<T eta, eta>/||T||, a
/// partial isometry X achieves ||S X - X T|| = ||S|| + ||T||.
inline MaximizerReport maximizer_pair(const StructuredOperator& s, const StructuredOperator& t,
                                      double tol = kDefaultTol) {
  if (!classify(s, tol).hyponormal || !classify(t, tol).hyponormal)
    throw precondition_failed("maximizer_pair requires hyponormal operators");
  AttainReport as = is_norm_attaining(s, tol);
  AttainReport at = is_norm_attaining(t, tol);
  if (as.verdict != Attainment::Yes || at.verdict != Attainment::Yes)
    throw norm_not_attained("maximizer_pair requires attained norms");
  const double ns = as.norm_value, nt = at.norm_value;

  auto s_cands = detail::norm_candidates(s, ns, tol);
  auto t_cands = detail::norm_candidates(t, nt, tol);
  const double phase_tol = std::max(tol, 1e-9);

  // pick (zeta, eta) minimizing the phase mismatch; for each eta candidate the
  // zeta side is a quadratic-form search
  FinVector zeta, eta;
  double best_gap = std::numeric_limits<double>::infinity();
  cplx s_form{0.0, 0.0}, t_form{0.0, 0.0};
  for (const auto& ec : t_cands) {
    const FinVector en = ec.normalized();
    const cplx ft = apply(t, en).inner(en);
    const cplx c0 = nt > 0.0 && ns > 0.0 ? (ft / nt) * ns : cplx{0.0, 0.0};
    auto [zc, val] = detail::search_form_zero(s, s_cands, c0);
    const double gap = ns > 0.0 ? std::abs(val) / ns : std::abs(ft) / std::max(nt, 1.0);
    if (gap < best_gap) {
      best_gap = gap;
      zeta = zc;
      eta = en;
      t_form = ft;
      s_form = val - c0;
    }
  }
  if (best_gap > phase_tol)
    throw phase_condition_failed("no witness pair satisfies the phase condition");

  // dependent case: T eta parallel to eta
  FinVector teta = apply(t, eta);
  const cplx mu_full = teta.inner(eta);
  FinVector resid = teta - eta.scaled(mu_full);
  StructuredOperator x = outer_op(zeta, eta);
  const double dep_tol = std::max(tol, 1e-9) * std::max(1.0, nt);
  if (resid.norm() > dep_tol) {
    // independent case on the orthonormal pair {eta, h}
    const double tau = resid.norm() / std::max(nt, 1e-300);
    FinVector h = resid.normalized();
    const cplx mu = nt > 0.0 ? mu_full / nt : cplx{0.0, 0.0};
    FinVector szeta = apply(s, zeta);
    FinVector top = szeta.scaled(ns > 0.0 ? -1.0 / ns : 0.0) - zeta.scaled(mu);
    x = add(x, outer_op(top.scaled(1.0 / tau), h));
  }

  MaximizerReport out;
  out.target = ns + nt;
  out.achieved = operator_norm(sub(multiply(s, x), multiply(x, t)), tol).value;
  out.witnesses.push_back({zeta, s_form});
  out.witnesses.push_back({eta, t_form});
  out.x = std::move(x);
  return out;
}

/// Sandwich maximizer: X = zeta (x) (T eta)/||T eta|| gives
/// ||S X T|| = ||S|| ||T|| for norm-attaining S, T.
inline MaximizerReport maximizer_sandwich(const StructuredOperator& s, const StructuredOperator& t,
                                          double tol = kDefaultTol) {
  AttainReport as = is_norm_attaining(s, tol);
  AttainReport at = is_norm_attaining(t, tol);
  if (as.verdict != Attainment::Yes || at.verdict != Attainment::Yes)
    throw norm_not_attained("maximizer_sandwich requires attained norms");
  const FinVector zeta = as.witness->vector;
  const FinVector eta = at.witness->vector;

  FinVector teta = apply(t, eta);
  const double tn = teta.norm();
  StructuredOperator x = tn > tol ? outer_op(zeta, teta.scaled(1.0 / tn)) : outer_op(zeta, eta);

  MaximizerReport out;
  out.target = as.norm_value * at.norm_value;
  out.achieved = operator_norm(multiply(multiply(s, x), t), tol).value;
  out.witnesses.push_back({zeta, cplx{as.norm_value, 0.0}});
  out.witnesses.push_back({eta, cplx{at.norm_value, 0.0}});
  out.x = std::move(x);
  return out;
}

}  // namespace spectrakit
