#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "nuchord/algebra.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/poly.hpp"
#include "nuchord/stable_element.hpp"

namespace nuchord {

/// Finite Dirichlet sum  sum_k coeff_k e^{-i omega freq_k}.  Frequencies may
/// have either sign once conjugations enter; plant data only produces
/// nonnegative delays.
struct APMode {
  Complex coeff;
  double freq = 0.0;
};

class APFunction {
 public:
  APFunction() = default;
  explicit APFunction(std::vector<APMode> modes) : modes_(std::move(modes)) { compact(); }

  const std::vector<APMode>& modes() const { return modes_; }
  bool is_zero() const { return modes_.empty(); }

  Complex eval(double omega) const {
    Complex acc = 0.0;
    for (const auto& m : modes_) acc += m.coeff * std::polar(1.0, -omega * m.freq);
    return acc;
  }

  double max_abs_freq() const {
    double m = 0.0;
    for (const auto& x : modes_) m = std::max(m, std::abs(x.freq));
    return m;
  }
  double coeff_l1() const {
    double s = 0.0;
    for (const auto& x : modes_) s += std::abs(x.coeff);
    return s;
  }

 private:
  void compact() {
    std::sort(modes_.begin(), modes_.end(),
              [](const APMode& a, const APMode& b) { return a.freq < b.freq; });
    std::vector<APMode> merged;
    for (const auto& m : modes_) {
      if (!merged.empty() && std::abs(merged.back().freq - m.freq) <= 1e-9)
        merged.back().coeff += m.coeff;
      else
        merged.push_back(m);
    }
    double scale = 0.0;
    for (const auto& m : merged) scale = std::max(scale, std::abs(m.coeff));
    std::erase_if(merged, [&](const APMode& m) { return std::abs(m.coeff) <= 1e-13 * scale; });
    modes_ = std::move(merged);
  }

  std::vector<APMode> modes_;
};

/// One summand of a boundary function on the imaginary axis:
/// (num/den)(i omega) * e^{-i omega shift}. Unlike StableElement terms, the
/// rational factor may have poles in either open half-plane (never on the
/// axis) and the shift may be negative; this class is closed under the
/// pointwise involution and products, which stable elements are not.
struct AxisTerm {
  Polynomial num;
  Polynomial den = Polynomial::constant(1.0);
  double shift = 0.0;
};

class AxisTermFunction {
 public:
  AxisTermFunction() = default;
  explicit AxisTermFunction(std::vector<AxisTerm> terms) : terms_(std::move(terms)) {
    std::erase_if(terms_, [](const AxisTerm& t) { return t.num.is_zero(); });
  }

  static AxisTermFunction from_element(const StableElement& elem) {
    if (elem.domain() != Domain::HalfPlane)
      throw DomainMismatch("axis terms require a half-plane element");
    std::vector<AxisTerm> t;
    for (const auto& x : elem.terms())
      if (!x.num.is_zero()) t.push_back({x.num, x.den, x.delay});
    return AxisTermFunction(std::move(t));
  }
  static AxisTermFunction constant(double c) {
    if (c == 0.0) return AxisTermFunction();
    return AxisTermFunction({{Polynomial::constant(c), Polynomial::constant(1.0), 0.0}});
  }

  const std::vector<AxisTerm>& terms() const { return terms_; }

  Complex eval(double omega) const {
    const Complex s(0.0, omega);
    Complex acc = 0.0;
    for (const auto& t : terms_)
      acc += t.num(s) / t.den(s) * std::polar(1.0, -omega * t.shift);
    return acc;
  }

  /// Pointwise conjugate on the axis: conj(r(i w)) = r(-i w) for real
  /// coefficients, and the shift flips sign.
  AxisTermFunction conjugated() const {
    std::vector<AxisTerm> t;
    t.reserve(terms_.size());
    for (const auto& x : terms_) t.push_back({x.num.reflected(), x.den.reflected(), -x.shift});
    return AxisTermFunction(std::move(t));
  }

  AxisTermFunction operator+(const AxisTermFunction& o) const {
    std::vector<AxisTerm> t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return AxisTermFunction(std::move(t));
  }
  AxisTermFunction operator*(const AxisTermFunction& o) const {
    std::vector<AxisTerm> t;
    t.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_)
      for (const auto& b : o.terms_)
        t.push_back({a.num * b.num, a.den * b.den, a.shift + b.shift});
    return AxisTermFunction(std::move(t));
  }
  AxisTermFunction operator-() const {
    std::vector<AxisTerm> t = terms_;
    for (auto& x : t) x.num = x.num * -1.0;
    return AxisTermFunction(std::move(t));
  }

  double max_abs_shift() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.shift));
    return m;
  }
  bool has_nonzero_shift() const {
    for (const auto& t : terms_)
      if (t.shift != 0.0) return true;
    return false;
  }

  /// Almost-periodic component: each term contributes its rational factor's
  /// limit at infinity at the term's shift frequency. The C0 remainder is
  /// this function minus the AP part, evaluated pointwise.
  APFunction ap_part() const {
    std::vector<APMode> modes;
    for (const auto& t : terms_) {
      const Complex c = rational_limit_at_infinity(t.num, t.den);
      if (c != 0.0) modes.push_back({c, t.shift});
    }
    return APFunction(std::move(modes));
  }

 private:
  std::vector<AxisTerm> terms_;
};

/// Split f = f0 + f_AP of a stable half-plane element.
struct C0APDecomposition {
  StableElement c0_part;
  APFunction ap_part;
  double reconstruction_error = 0.0;  // sup over the verification grid
};

inline C0APDecomposition decompose_c0_ap(const StableElement& elem,
                                         double verify_tol = 1e-9) {
  if (elem.domain() != Domain::HalfPlane)
    throw DomainMismatch("C0+AP split requires a half-plane element");
  std::vector<RationalDelayTerm> c0_terms;
  std::vector<APMode> modes;
  for (const auto& t : elem.terms()) {
    const Complex lim = rational_limit_at_infinity(t.num, t.den);
    if (lim != 0.0) {
      modes.push_back({lim, t.delay});
      // strictly proper remainder, still multiplied by its delay factor
      c0_terms.push_back({t.num - t.den * lim.real(), t.den, t.delay});
    } else {
      c0_terms.push_back(t);
    }
  }
  C0APDecomposition out{StableElement(elem.domain(), std::move(c0_terms)),
                        APFunction(std::move(modes))};
  for (const auto& t : out.c0_part.terms())
    if (!t.num.is_zero() && t.num.degree() >= t.den.degree())
      throw Error("C0 part is not strictly proper");
  // reconstruction check on a coarse verification grid
  for (int i = 0; i <= 4096; ++i) {
    const double omega = -1e4 + 2e4 * i / 4096.0;
    const BoundaryPoint p = BoundaryPoint::from_omega(omega);
    const double err =
        std::abs(elem.evaluate(p) - (out.c0_part.evaluate(p) + out.ap_part.eval(p.omega())));
    out.reconstruction_error = std::max(out.reconstruction_error, err);
  }
  if (out.reconstruction_error > verify_tol)
    throw Error("C0+AP reconstruction exceeds tolerance");
  return out;
}

}  // namespace nuchord
