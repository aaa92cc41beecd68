#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "nuchord/errors.hpp"
#include "nuchord/poly.hpp"

namespace nuchord {

inline constexpr double kPi = std::numbers::pi;

enum class InstanceKind { Circle, HalfPlaneC0AP, AnnulusLimit };
enum class Domain { Circle, HalfPlane };

struct Tolerances {
  double invertibility_tol = 1e-9;  // relative to the sup of the expression
  double sup_tol = 1e-9;
};

/// Which stable ring / boundary algebra a computation runs over, plus the
/// numerical knobs it needs. Immutable after construction.
class AlgebraInstance {
 public:
  static AlgebraInstance circle(Tolerances tol = {}) {
    return AlgebraInstance(InstanceKind::Circle, tol, {}, 1e4, 4.0);
  }
  static AlgebraInstance halfplane_c0ap(Tolerances tol = {}, double ap_window = 1e4,
                                        double ap_grid_density = 4.0) {
    return AlgebraInstance(InstanceKind::HalfPlaneC0AP, tol, {}, ap_window, ap_grid_density);
  }
  static AlgebraInstance annulus_limit(std::vector<double> radii = {0.9, 0.99, 0.999, 0.9999,
                                                                    0.99999},
                                       Tolerances tol = {}) {
    return AlgebraInstance(InstanceKind::AnnulusLimit, tol, std::move(radii), 1e4, 4.0);
  }

  InstanceKind kind() const { return kind_; }
  const Tolerances& tolerances() const { return tol_; }
  const std::vector<double>& annulus_radii() const { return radii_; }
  double ap_window() const { return ap_window_; }
  double ap_grid_density() const { return ap_grid_density_; }
  std::size_t initial_grid() const { return initial_grid_; }
  std::size_t max_grid() const { return max_grid_; }

  AlgebraInstance with_grid_budget(std::size_t initial, std::size_t max) const {
    AlgebraInstance out = *this;
    out.initial_grid_ = std::max<std::size_t>(64, initial);
    out.max_grid_ = std::max(out.initial_grid_, max);
    return out;
  }
  AlgebraInstance with_tolerances(Tolerances tol) const {
    AlgebraInstance out = *this;
    if (tol.invertibility_tol <= 0.0 || tol.sup_tol <= 0.0)
      throw Error("tolerances must be positive");
    out.tol_ = tol;
    return out;
  }

  Domain element_domain() const {
    return kind_ == InstanceKind::HalfPlaneC0AP ? Domain::HalfPlane : Domain::Circle;
  }

 private:
  AlgebraInstance(InstanceKind kind, Tolerances tol, std::vector<double> radii, double ap_window,
                  double ap_grid_density)
      : kind_(kind),
        tol_(tol),
        radii_(std::move(radii)),
        ap_window_(ap_window),
        ap_grid_density_(ap_grid_density) {
    if (tol_.invertibility_tol <= 0.0 || tol_.sup_tol <= 0.0)
      throw Error("tolerances must be positive");
    if (kind_ == InstanceKind::AnnulusLimit) {
      if (radii_.size() < 3) throw Error("annulus radii schedule needs at least 3 entries");
      double prev = 0.0;
      for (double r : radii_) {
        if (!(r > prev && r < 1.0)) throw Error("annulus radii must be increasing and in (0,1)");
        prev = r;
      }
    }
    if (kind_ == InstanceKind::HalfPlaneC0AP && (ap_window_ <= 0.0 || ap_grid_density_ <= 0.0))
      throw Error("ap window and grid density must be positive");
  }

  InstanceKind kind_;
  Tolerances tol_;
  std::vector<double> radii_;
  double ap_window_;
  double ap_grid_density_;
  std::size_t initial_grid_ = std::size_t{1} << 10;
  std::size_t max_grid_ = std::size_t{1} << 20;
};

/// Point of the boundary circle. For half-plane elements theta parameterizes
/// the compactified imaginary axis through omega = tan(theta/2); theta == pi
/// is the point at infinity.
struct BoundaryPoint {
  double theta = 0.0;  // in (-pi, pi]
  Domain domain = Domain::HalfPlane;

  static BoundaryPoint circle(double theta) { return {wrap(theta), Domain::Circle}; }
  static BoundaryPoint halfplane(double theta) { return {wrap(theta), Domain::HalfPlane}; }
  static BoundaryPoint from_omega(double omega) {
    return {2.0 * std::atan(omega), Domain::HalfPlane};
  }
  static BoundaryPoint infinity() { return {kPi, Domain::HalfPlane}; }

  bool at_infinity() const { return domain == Domain::HalfPlane && theta == kPi; }
  double omega() const { return std::tan(0.5 * theta); }
  Complex unit_circle_point() const { return std::polar(1.0, theta); }

  static double wrap(double t) {
    t = std::fmod(t + kPi, 2.0 * kPi);
    if (t <= 0.0) t += 2.0 * kPi;
    return t - kPi;
  }
};

/// Ordered complex samples of a boundary function over a theta grid.
struct SampledCurve {
  std::vector<double> thetas;  // strictly increasing, inside (-pi, pi]
  std::vector<Complex> values;
  bool closed = true;

  SampledCurve(std::vector<double> t, std::vector<Complex> v, bool is_closed = true)
      : thetas(std::move(t)), values(std::move(v)), closed(is_closed) {
    if (thetas.size() != values.size()) throw GridMismatch("theta/value length mismatch");
    if (thetas.size() < 16) throw GridMismatch("curve needs at least 16 samples");
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      if (thetas[i] <= -kPi || thetas[i] > kPi) throw GridMismatch("theta outside (-pi, pi]");
      if (i > 0 && thetas[i] <= thetas[i - 1]) throw GridMismatch("thetas not increasing");
    }
  }

  std::size_t size() const { return thetas.size(); }
};

namespace detail {
inline void require_same_grid(const SampledCurve& a, const SampledCurve& b) {
  if (a.size() != b.size() || a.closed != b.closed) throw GridMismatch("curve grids differ");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.thetas[i] != b.thetas[i]) throw GridMismatch("curve grids differ");
}
}  // namespace detail

inline SampledCurve pointwise_add(const SampledCurve& a, const SampledCurve& b) {
  detail::require_same_grid(a, b);
  std::vector<Complex> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a.values[i] + b.values[i];
  return SampledCurve(a.thetas, std::move(v), a.closed);
}

inline SampledCurve pointwise_mul(const SampledCurve& a, const SampledCurve& b) {
  detail::require_same_grid(a, b);
  std::vector<Complex> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a.values[i] * b.values[i];
  return SampledCurve(a.thetas, std::move(v), a.closed);
}

/// The involution f -> f*: pointwise complex conjugation of boundary values.
inline SampledCurve pointwise_conj(const SampledCurve& a) {
  std::vector<Complex> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = std::conj(a.values[i]);
  return SampledCurve(a.thetas, std::move(v), a.closed);
}

inline SampledCurve pointwise_abs2(const SampledCurve& a) {
  std::vector<Complex> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = std::norm(a.values[i]);
  return SampledCurve(a.thetas, std::move(v), a.closed);
}

}  // namespace nuchord
