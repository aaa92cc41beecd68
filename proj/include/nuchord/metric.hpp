#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "nuchord/algebra.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/expr.hpp"
#include "nuchord/factorization.hpp"
#include "nuchord/index_ops.hpp"
#include "nuchord/scan.hpp"

namespace nuchord {

enum class MetricBranch { KappaSup, IndexConditionFailed };

struct ConditionRecord {
  InvertibilityReport invertibility;
  std::optional<IndexValue> index;
  bool holds = false;
  std::string note;
};

struct GridReport {
  std::size_t final_grid = 0;
  double achieved_tol = 0.0;
  bool branch_ambiguous = false;  // invertibility verdict sat near the threshold
};

struct MetricResult {
  double value = 0.0;
  MetricBranch branch = MetricBranch::KappaSup;
  ConditionRecord condition;
  GridReport grid;
};

namespace detail {
inline void require_same_instance(const CoprimeFactorization& a, const CoprimeFactorization& b) {
  if (a.instance.kind() != b.instance.kind())
    throw DomainMismatch("factorizations live on different instances");
}
inline double max_delay_of(const CoprimeFactorization& a, const CoprimeFactorization& b) {
  return std::max({a.n.max_delay(), a.d.max_delay(), b.n.max_delay(), b.d.max_delay()});
}
inline bool oscillatory_pair(const CoprimeFactorization& a, const CoprimeFactorization& b) {
  return a.instance.kind() == InstanceKind::HalfPlaneC0AP &&
         (a.n.has_delay() || a.d.has_delay() || b.n.has_delay() || b.d.has_delay());
}
}  // namespace detail

/// Chordal pointwise distance of two factored plants at a boundary point:
/// |n1 d2 - n2 d1| / (sqrt(|n1|^2+|d1|^2) sqrt(|n2|^2+|d2|^2)), in [0, 1].
inline double kappa_at(const CoprimeFactorization& cf1, const CoprimeFactorization& cf2,
                       const BoundaryPoint& point) {
  const Complex n1 = cf1.n.evaluate(point), d1 = cf1.d.evaluate(point);
  const Complex n2 = cf2.n.evaluate(point), d2 = cf2.d.evaluate(point);
  const double g1 = std::sqrt(std::norm(n1) + std::norm(d1));
  const double g2 = std::sqrt(std::norm(n2) + std::norm(d2));
  const double floor = cf1.instance.tolerances().invertibility_tol;
  if (g1 <= floor || g2 <= floor)
    throw DegenerateDenominator("factor pair vanishes at a boundary point");
  return std::abs(n1 * d2 - n2 * d1) / (g1 * g2);
}

inline SampledCurve kappa(const CoprimeFactorization& cf1, const CoprimeFactorization& cf2,
                          std::span<const double> thetas) {
  detail::require_same_instance(cf1, cf2);
  const Domain domain = cf1.instance.element_domain();
  std::vector<Complex> values(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i)
    values[i] = kappa_at(cf1, cf2, BoundaryPoint{thetas[i], domain});
  return SampledCurve(std::vector<double>(thetas.begin(), thetas.end()), std::move(values));
}

/// The branch condition of the refined metric: f = n1* n2 + d1* d2 must be
/// invertible in S with identity index. For C0+AP the split of f is derived
/// term-algebraically from the factor elements, never fitted numerically.
inline ConditionRecord index_condition(const CoprimeFactorization& cf1,
                                       const CoprimeFactorization& cf2) {
  detail::require_same_instance(cf1, cf2);
  const BoundaryExpr f = conj(BoundaryExpr(cf1.n)) * BoundaryExpr(cf2.n) +
                         conj(BoundaryExpr(cf1.d)) * BoundaryExpr(cf2.d);
  ConditionRecord rec;
  rec.invertibility = is_invertible(f, cf1.instance);
  if (!rec.invertibility.invertible) {
    rec.note = "n1* n2 + d1* d2 not invertible in S";
    return rec;
  }
  try {
    rec.index = index_of(f, cf1.instance);
  } catch (const APNotInvertible&) {
    rec.note = "AP part of n1* n2 + d1* d2 not invertible";
    return rec;
  }
  rec.holds = index_is_identity(*rec.index, cf1.instance);
  if (!rec.holds) rec.note = "index " + rec.index->str() + " is not the identity";
  return rec;
}

/// Refined chordal metric: sup of kappa when the index condition holds,
/// 1 otherwise.
inline MetricResult d_cr(const CoprimeFactorization& cf1, const CoprimeFactorization& cf2) {
  detail::require_same_instance(cf1, cf2);
  MetricResult out;
  out.condition = index_condition(cf1, cf2);
  out.grid.branch_ambiguous = out.condition.invertibility.near_threshold;
  if (!out.condition.holds) {
    out.value = 1.0;
    out.branch = MetricBranch::IndexConditionFailed;
    out.grid.final_grid = out.condition.invertibility.grid_points;
    out.grid.achieved_tol = out.condition.invertibility.achieved_tol;
    return out;
  }
  const bool osc = detail::oscillatory_pair(cf1, cf2);
  const ScanOptions opt = scan_options_for(cf1.instance, osc,
                                           std::max(1.0, detail::max_delay_of(cf1, cf2)));
  const auto res = scan_extrema(
      [&](const BoundaryPoint& p) { return kappa_at(cf1, cf2, p); }, opt);
  out.value = res.max.value;
  out.branch = MetricBranch::KappaSup;
  out.grid.final_grid = res.grid_points;
  out.grid.achieved_tol = res.achieved_tol;
  return out;
}

inline MetricResult d_cr(const Fraction& p1, const Fraction& p2, const AlgebraInstance& inst) {
  return d_cr(ensure_cf(p1, inst), ensure_cf(p2, inst));
}

/// The nu-metric entry point for normalized factorizations; identical
/// computation, kept as a named oracle for the equivalence tests.
inline MetricResult d_nu(const NormalizedCF& ncf1, const NormalizedCF& ncf2) {
  if (ncf1.normalization_residual > 1e-8 || ncf2.normalization_residual > 1e-8)
    throw NotNormalized("normalization residual exceeds 1e-8");
  return d_cr(static_cast<const CoprimeFactorization&>(ncf1),
              static_cast<const CoprimeFactorization&>(ncf2));
}

}  // namespace nuchord
