#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "nuchord/algebra.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/expr.hpp"
#include "nuchord/factorization.hpp"
#include "nuchord/index_ops.hpp"
#include "nuchord/metric.hpp"
#include "nuchord/scan.hpp"

namespace nuchord {

/// Closed-loop transfer matrix H(p, c) in its factored form: every entry is
/// a numerator expression over the common denominator d_p d_c - n_p n_c.
struct ClosedLoopMatrix {
  std::array<std::array<BoundaryExpr, 2>, 2> numerators;
  BoundaryExpr denominator;

  static ClosedLoopMatrix from_cfs(const CoprimeFactorization& p, const CoprimeFactorization& c) {
    detail::require_same_instance(p, c);
    const BoundaryExpr np(p.n), dp(p.d), nc(c.n), dc(c.d);
    const std::array<std::array<BoundaryExpr, 2>, 2> nums = {
        {{{-(np * nc), np * dc}}, {{-(dp * nc), dp * dc}}}};
    ClosedLoopMatrix m{nums, dp * dc - np * nc};
    // 1 - pc must not vanish identically
    bool nonzero = false;
    const Domain dom = p.instance.element_domain();
    for (int i = 0; i < 64 && !nonzero; ++i) {
      const double theta = -kPi + 2.0 * kPi * (i + 0.5) / 64.0;
      nonzero = std::abs(m.denominator.eval(BoundaryPoint{theta, dom})) > 1e-12;
    }
    if (!nonzero) throw DegenerateDenominator("1 - p c vanishes identically");
    return m;
  }

  Complex entry(int i, int j, const BoundaryPoint& point) const {
    return numerators[i][j].eval(point) / denominator.eval(point);
  }

  /// Euclidean operator norm of the 2x2 evaluation: largest singular value,
  /// computed from the Gram matrix in closed form.
  double operator_norm(const BoundaryPoint& point) const {
    const Complex den = denominator.eval(point);
    Complex m[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] = numerators[i][j].eval(point) / den;
    const double tr = std::norm(m[0][0]) + std::norm(m[0][1]) + std::norm(m[1][0]) +
                      std::norm(m[1][1]);
    const double det = std::norm(m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    const double disc = std::max(0.0, tr * tr - 4.0 * det);
    return std::sqrt(0.5 * (tr + std::sqrt(disc)));
  }
};

/// Abstract Nyquist test: c stabilizes p iff g = n_p n_c - d_p d_c is
/// invertible in S with identity index.
inline bool stabilizes(const CoprimeFactorization& p, const CoprimeFactorization& c) {
  detail::require_same_instance(p, c);
  const BoundaryExpr g = BoundaryExpr(p.n) * BoundaryExpr(c.n) -
                         BoundaryExpr(p.d) * BoundaryExpr(c.d);
  const auto rep = is_invertible(g, p.instance);
  if (!rep.invertible) return false;
  try {
    return index_is_identity(index_of(g, p.instance), p.instance);
  } catch (const APNotInvertible&) {
    return false;
  }
}

struct MarginDiagnostics {
  double achieved_tol = 0.0;
  std::size_t grid_points = 0;
  BoundaryPoint where;
};

/// Stability margin as a boundary infimum:
/// inf |n_p n_c - d_p d_c| / (sqrt(|n_p|^2+|d_p|^2) sqrt(|n_c|^2+|d_c|^2)),
/// and 0 when c does not stabilize p.
inline double margin(const CoprimeFactorization& p, const CoprimeFactorization& c,
                     MarginDiagnostics* diag = nullptr) {
  detail::require_same_instance(p, c);
  if (!stabilizes(p, c)) return 0.0;
  const bool osc = detail::oscillatory_pair(p, c);
  const ScanOptions opt =
      scan_options_for(p.instance, osc, std::max(1.0, detail::max_delay_of(p, c)));
  const auto res = scan_extrema(
      [&](const BoundaryPoint& pt) {
        const Complex np = p.n.evaluate(pt), dp = p.d.evaluate(pt);
        const Complex nc = c.n.evaluate(pt), dc = c.d.evaluate(pt);
        return std::abs(np * nc - dp * dc) /
               (std::sqrt(std::norm(np) + std::norm(dp)) *
                std::sqrt(std::norm(nc) + std::norm(dc)));
      },
      opt);
  if (diag) *diag = {res.achieved_tol, res.grid_points, res.min.where};
  return res.min.value;
}

/// Same margin through 1 / ||H(p, c)||: the closed loop is rank one, so the
/// pointwise operator norm is the product of the two factor norms over
/// |d_p d_c - n_p n_c|. Kept as an independent route; must agree with
/// margin() within 1e-7.
inline double margin_via_norm(const CoprimeFactorization& p, const CoprimeFactorization& c) {
  if (!stabilizes(p, c)) throw NotStabilizing("margin_via_norm needs a stabilizing pair");
  const ClosedLoopMatrix h = ClosedLoopMatrix::from_cfs(p, c);
  const bool osc = detail::oscillatory_pair(p, c);
  const ScanOptions opt =
      scan_options_for(p.instance, osc, std::max(1.0, detail::max_delay_of(p, c)));
  const auto res =
      scan_extrema([&](const BoundaryPoint& pt) { return h.operator_norm(pt); }, opt);
  return 1.0 / res.max.value;
}

/// Robust-stabilization certificate: nominal margin, distance to the
/// perturbed plant, and the lower bound mu_nominal - distance on the
/// perturbed margin.
struct Certificate {
  double mu_nominal = 0.0;
  double distance = 0.0;
  double lower_bound = 0.0;
  bool stabilized = false;  // certified: lower_bound > 0
  std::optional<double> mu_perturbed;
  MetricResult metric;
  double mu_achieved_tol = 0.0;
};

inline Certificate certify_robust(const CoprimeFactorization& p0, const CoprimeFactorization& c,
                                  const CoprimeFactorization& p, bool direct_mu = false) {
  Certificate cert;
  MarginDiagnostics diag;
  cert.mu_nominal = margin(p0, c, &diag);
  cert.mu_achieved_tol = diag.achieved_tol;
  cert.metric = d_cr(p, p0);
  cert.distance = cert.metric.value;
  cert.lower_bound = cert.mu_nominal - cert.distance;
  cert.stabilized = cert.lower_bound > 0.0;
  if (direct_mu) cert.mu_perturbed = margin(p, c);
  return cert;
}

inline Certificate certify_robust(const Fraction& p0, const Fraction& c, const Fraction& p,
                                  const AlgebraInstance& inst, bool direct_mu = false) {
  return certify_robust(ensure_cf(p0, inst), ensure_cf(c, inst), ensure_cf(p, inst), direct_mu);
}

/// Every plant within this d_cr-distance of p0 is stabilized by c.
inline double robustness_radius(const CoprimeFactorization& p0, const CoprimeFactorization& c) {
  return margin(p0, c);
}

}  // namespace nuchord
