#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nuchord/algebra.hpp"
#include "nuchord/axis_terms.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/expr.hpp"
#include "nuchord/scan.hpp"
#include "nuchord/winding.hpp"

namespace nuchord {

/// Element of the index group G: an integer for the circle and
/// annulus-limit instances, a (mean motion, winding) pair for C0+AP.
struct IndexValue {
  enum class Kind { Integer, RealInteger };
  Kind kind = Kind::Integer;
  double w_av = 0.0;
  int w = 0;
  double w_av_tol = 0.0;  // achieved mean-motion agreement, reported with the value

  static IndexValue integer(int w) { return {Kind::Integer, 0.0, w, 0.0}; }
  static IndexValue real_integer(double w_av, int w, double w_av_tol = 0.0) {
    return {Kind::RealInteger, w_av, w, w_av_tol};
  }

  std::string str() const {
    if (kind == Kind::Integer) return std::to_string(w);
    return "(" + std::to_string(w_av) + ", " + std::to_string(w) + ")";
  }
};

struct InvertibilityReport {
  bool invertible = false;
  double min_modulus = 0.0;
  double sup_modulus = 0.0;
  BoundaryPoint witness_point;  // where the minimum estimate is attained
  double threshold = 0.0;       // invertibility_tol * sup_modulus
  bool near_threshold = false;  // the verdict is grid-tolerance sensitive
  double achieved_tol = 0.0;
  std::size_t grid_points = 0;
};

/// Numerical membership test for inv S: adaptive infimum of the modulus over
/// the boundary (window-limited for C0+AP), compared against a relative
/// threshold.
inline InvertibilityReport is_invertible(const BoundaryExpr& expr, const AlgebraInstance& inst) {
  InvertibilityReport rep;
  if (inst.kind() == InstanceKind::AnnulusLimit) {
    // invertibility in the limit algebra lives on the late annuli: take the
    // scheduled circles, tracking the global minimum
    rep.min_modulus = std::numeric_limits<double>::infinity();
    for (double r : inst.annulus_radii()) {
      ScanOptions opt = scan_options_for(inst, false);
      auto res = scan_extrema(
          [&](const BoundaryPoint& p) { return std::abs(expr.eval_at(std::polar(r, p.theta))); },
          opt);
      if (res.min.value < rep.min_modulus) {
        rep.min_modulus = res.min.value;
        rep.witness_point = res.min.where;
      }
      rep.sup_modulus = std::max(rep.sup_modulus, res.max.value);
      rep.achieved_tol = std::max(rep.achieved_tol, res.achieved_tol);
      rep.grid_points += res.grid_points;
    }
  } else {
    auto res = modulus_extrema(expr, inst);
    rep.min_modulus = res.min.value;
    rep.sup_modulus = res.max.value;
    rep.witness_point = res.min.where;
    rep.achieved_tol = res.achieved_tol;
    rep.grid_points = res.grid_points;
  }
  rep.threshold = inst.tolerances().invertibility_tol * rep.sup_modulus;
  rep.invertible = rep.min_modulus > rep.threshold;
  rep.near_threshold =
      rep.threshold > 0.0 && rep.min_modulus > 0.5 * rep.threshold && rep.min_modulus < 2.0 * rep.threshold;
  return rep;
}

inline InvertibilityReport is_invertible(const StableElement& elem, const AlgebraInstance& inst) {
  return is_invertible(BoundaryExpr(elem), inst);
}

/// iota for the circle instance: the winding number of the boundary curve.
inline IndexValue index_circle(const BoundaryExpr& expr, const AlgebraInstance& inst) {
  if (inst.kind() != InstanceKind::Circle) throw VariantMismatch("index_circle needs Circle");
  const std::function<Complex(double)> fn = [&](double theta) {
    return expr.eval(BoundaryPoint{theta, Domain::Circle});
  };
  try {
    return IndexValue::integer(winding_of_boundary_function(fn));
  } catch (const CurveThroughZero& e) {
    throw NotInvertible(e.what());
  }
}

namespace detail {

// Continuously unwrapped arg(f(b)) - arg(f(a)) along a segment of the real
// line, bisecting any step whose principal increment exceeds pi/2.
inline double unwrapped_phase_increment(const std::function<Complex(double)>& f, double a,
                                        double b, std::size_t initial_steps, int max_depth = 48) {
  struct Seg {
    double x0, x1;
    Complex v0, v1;
    int depth;
  };
  std::vector<Seg> stack;
  const double h = (b - a) / static_cast<double>(initial_steps);
  Complex prev = f(a);
  for (std::size_t i = 0; i < initial_steps; ++i) {
    const double x1 = i + 1 == initial_steps ? b : a + h * static_cast<double>(i + 1);
    const Complex v1 = f(x1);
    stack.push_back({a + h * static_cast<double>(i), x1, prev, v1, 0});
    prev = v1;
  }
  double total = 0.0;
  while (!stack.empty()) {
    const Seg seg = stack.back();
    stack.pop_back();
    if (std::abs(seg.v0) == 0.0 || std::abs(seg.v1) == 0.0)
      throw APNotInvertible("zero encountered while unwrapping the argument");
    const double step = std::arg(seg.v1 / seg.v0);
    if (std::abs(step) <= 0.5 * kPi) {
      total += step;
      continue;
    }
    if (seg.depth >= max_depth) {
      if (std::abs(step) >= kPi * (1.0 - 1e-12))
        throw NonResolvableWinding("phase step of pi while unwrapping");
      total += step;
      continue;
    }
    const double xm = 0.5 * (seg.x0 + seg.x1);
    const Complex vm = f(xm);
    stack.push_back({seg.x0, xm, seg.v0, vm, seg.depth + 1});
    stack.push_back({xm, seg.x1, vm, seg.v1, seg.depth + 1});
  }
  return total;
}

inline void require_ap_invertible(const APFunction& ap, const AlgebraInstance& inst) {
  if (ap.is_zero()) throw APNotInvertible("AP part vanishes");
  if (ap.modes().size() == 1) return;  // |c e^{-i w t}| = |c| > 0 everywhere
  ScanOptions opt = scan_options_for(inst, /*oscillatory=*/true,
                                     std::max(1.0, ap.max_abs_freq()));
  opt.tol = std::max(opt.tol, 1e-6 * ap.coeff_l1());  // coarse gate, values only
  const auto res = scan_extrema(
      [&](const BoundaryPoint& p) { return std::abs(ap.eval(p.omega())); }, opt);
  if (res.min.value <= inst.tolerances().invertibility_tol * res.max.value)
    throw APNotInvertible("AP part not bounded away from zero on the window");
}

}  // namespace detail

/// Average winding number (mean motion) of an invertible AP function:
/// the limit of (arg f(X) - arg f(-X)) / (2X), iterated over doubling
/// windows until two successive estimates agree within 1e-6.
inline double mean_motion(const APFunction& ap, const AlgebraInstance& inst,
                          double* achieved_tol = nullptr) {
  detail::require_ap_invertible(ap, inst);
  const std::function<Complex(double)> f = [&](double x) { return ap.eval(x); };
  constexpr double agreement = 1e-6;
  double window = inst.ap_window();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 0; iter < 10; ++iter) {
    const std::size_t steps = std::max<std::size_t>(
        4096, static_cast<std::size_t>(2.0 * window * ap.max_abs_freq() / 0.4));
    const double slope =
        detail::unwrapped_phase_increment(f, -window, window, steps) / (2.0 * window);
    if (iter > 0 && std::abs(slope - prev) <= agreement) {
      if (achieved_tol) *achieved_tol = std::abs(slope - prev);
      return slope;
    }
    prev = slope;
    window *= 2.0;
  }
  throw NoConvergence("mean motion estimates did not stabilize");
}

/// iota for the C0+AP instance: (w_av(f_AP), w(1 + f_AP^{-1} f_0)). The
/// winding curve is f/f_AP pointwise; it tends to 1 at +-infinity and closes
/// through the compactification point with value 1. The curve is oriented so
/// that a rational symbol winds by its right-half-plane zeros-minus-poles
/// count (the Nyquist convention of the argument-principle oracle).
inline IndexValue index_c0ap(const BoundaryExpr& expr, const AlgebraInstance& inst) {
  if (inst.kind() != InstanceKind::HalfPlaneC0AP)
    throw VariantMismatch("index_c0ap needs HalfPlaneC0AP");
  const AxisTermFunction terms = expr.axis_terms();
  const APFunction ap = terms.ap_part();
  double w_av_tol = 0.0;
  const double w_av = mean_motion(ap, inst, &w_av_tol);
  const std::function<Complex(double)> fn = [&](double theta) -> Complex {
    if (theta == kPi) return 1.0;
    const double omega = std::tan(0.5 * theta);
    return terms.eval(omega) / ap.eval(omega);
  };
  try {
    return IndexValue::real_integer(w_av, -winding_of_boundary_function(fn), w_av_tol);
  } catch (const CurveThroughZero& e) {
    throw NotInvertible(e.what());
  }
}

/// iota for the annulus-limit instance: winding numbers on the scheduled
/// circles |z| = r, accepted once the last three agree.
inline IndexValue index_annulus_limit(const BoundaryExpr& expr, const AlgebraInstance& inst) {
  if (inst.kind() != InstanceKind::AnnulusLimit)
    throw VariantMismatch("index_annulus_limit needs AnnulusLimit");
  std::vector<int> windings;
  for (double r : inst.annulus_radii()) {
    const std::function<Complex(double)> fn = [&, r](double theta) {
      return expr.eval_at(std::polar(r, theta));
    };
    try {
      windings.push_back(winding_of_boundary_function(fn));
    } catch (const CurveThroughZero&) {
      throw NotInvertibleOnCircle("not invertible on |z| = " + std::to_string(r));
    }
  }
  const std::size_t n = windings.size();
  if (windings[n - 1] != windings[n - 2] || windings[n - 2] != windings[n - 3])
    throw IndexNotStabilized("winding numbers disagree on the last three radii");
  return IndexValue::integer(windings[n - 1]);
}

inline IndexValue index_of(const BoundaryExpr& expr, const AlgebraInstance& inst) {
  if (auto dom = expr.domain(); dom && *dom != inst.element_domain())
    throw DomainMismatch("expression domain differs from the instance boundary");
  switch (inst.kind()) {
    case InstanceKind::Circle: return index_circle(expr, inst);
    case InstanceKind::HalfPlaneC0AP: return index_c0ap(expr, inst);
    case InstanceKind::AnnulusLimit: return index_annulus_limit(expr, inst);
  }
  throw Error("unreachable");
}

inline IndexValue index_of(const StableElement& elem, const AlgebraInstance& inst) {
  return index_of(BoundaryExpr(elem), inst);
}

/// Identity test against the group identity: Integer(0), or a RealInteger
/// with |w_av| <= 1e-6 and w = 0 (the mean motion is a numeric limit, so an
/// exact zero cannot be asserted).
inline bool index_is_identity(const IndexValue& idx, const AlgebraInstance& inst) {
  const bool wants_pair = inst.kind() == InstanceKind::HalfPlaneC0AP;
  if (wants_pair != (idx.kind == IndexValue::Kind::RealInteger))
    throw VariantMismatch("index variant does not match the instance");
  if (idx.kind == IndexValue::Kind::Integer) return idx.w == 0;
  return std::abs(idx.w_av) <= 1e-6 && idx.w == 0;
}

}  // namespace nuchord
