#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "nuchord/algebra.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/poly.hpp"

namespace nuchord {

/// One summand of a stable element: a real-rational factor times a delay
/// factor e^{-s t} (half-plane domain; circle elements carry no delays).
struct RationalDelayTerm {
  Polynomial num;
  Polynomial den = Polynomial::constant(1.0);
  double delay = 0.0;
};

/// Element of the stable ring R: finitely many rational-plus-delay summands,
/// evaluable on the boundary of its domain.
class StableElement {
 public:
  StableElement(Domain domain, std::vector<RationalDelayTerm> terms)
      : domain_(domain), terms_(std::move(terms)) {
    normalize();
    validate();
  }

  static StableElement constant(Domain domain, double c) {
    return StableElement(domain, {{Polynomial::constant(c), Polynomial::constant(1.0), 0.0}});
  }
  static StableElement rational(Domain domain, Polynomial num, Polynomial den) {
    return StableElement(domain, {{std::move(num), std::move(den), 0.0}});
  }

  Domain domain() const { return domain_; }
  const std::vector<RationalDelayTerm>& terms() const { return terms_; }

  bool has_delay() const {
    for (const auto& t : terms_)
      if (t.delay > 0.0 && !t.num.is_zero()) return true;
    return false;
  }
  bool is_zero() const {
    for (const auto& t : terms_)
      if (!t.num.is_zero()) return false;
    return true;
  }
  double max_delay() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, t.delay);
    return m;
  }

  Complex evaluate(const BoundaryPoint& point) const {
    if (point.domain != domain_) throw DomainMismatch("boundary point domain differs");
    if (domain_ == Domain::Circle) {
      const Complex z = point.unit_circle_point();
      Complex acc = 0.0;
      for (const auto& t : terms_) acc += t.num(z) / t.den(z);
      return acc;
    }
    if (point.at_infinity()) {
      if (has_delay())
        throw EvaluationAtInfinityUndefined("delayed term has no limit at infinity");
      Complex acc = 0.0;
      for (const auto& t : terms_) acc += rational_limit_at_infinity(t.num, t.den);
      return acc;
    }
    const double omega = point.omega();
    const Complex s(0.0, omega);
    Complex acc = 0.0;
    for (const auto& t : terms_)
      acc += t.num(s) / t.den(s) * std::polar(1.0, -omega * t.delay);
    return acc;
  }

  /// Circle-domain elements extend holomorphically into the disk; used by the
  /// annulus-limit index, which samples interior circles.
  Complex evaluate_at(Complex z) const {
    if (domain_ != Domain::Circle) throw DomainMismatch("interior evaluation needs circle domain");
    Complex acc = 0.0;
    for (const auto& t : terms_) acc += t.num(z) / t.den(z);
    return acc;
  }

  StableElement operator+(const StableElement& o) const {
    if (domain_ != o.domain_) throw DomainMismatch("mixed-domain sum");
    std::vector<RationalDelayTerm> t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return StableElement(domain_, std::move(t));
  }
  StableElement operator*(const StableElement& o) const {
    if (domain_ != o.domain_) throw DomainMismatch("mixed-domain product");
    std::vector<RationalDelayTerm> t;
    t.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_)
      for (const auto& b : o.terms_)
        t.push_back({a.num * b.num, a.den * b.den, a.delay + b.delay});
    return StableElement(domain_, std::move(t));
  }
  StableElement operator-() const {
    std::vector<RationalDelayTerm> t = terms_;
    for (auto& x : t) x.num = x.num * -1.0;
    return StableElement(domain_, std::move(t));
  }
  StableElement scaled(double k) const {
    std::vector<RationalDelayTerm> t = terms_;
    for (auto& x : t) x.num = x.num * k;
    return StableElement(domain_, std::move(t));
  }

 private:
  void normalize() {
    std::erase_if(terms_, [](const RationalDelayTerm& t) { return t.num.is_zero(); });
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const auto& a, const auto& b) { return a.delay < b.delay; });
    // mirror 0 = t_0 < t_1 <= t_2 ... : the leading delay slot is always 0
    if (terms_.empty() || terms_.front().delay != 0.0)
      terms_.insert(terms_.begin(),
                    {Polynomial(), Polynomial::constant(1.0), 0.0});
  }

  void validate() const {
    for (const auto& t : terms_) {
      if (t.den.is_zero()) throw Error("zero denominator in stable element");
      if (t.delay < 0.0) throw Error("negative delay in stable element");
      if (domain_ == Domain::Circle) {
        if (t.delay != 0.0) throw Error("delays are a half-plane construct");
        for (const Complex& r : t.den.roots())
          if (std::abs(r) <= 1.0 + 1e-12)
            throw Error("circle element denominator has a root in the closed unit disk");
      } else {
        if (!t.num.is_zero() && t.num.degree() > t.den.degree())
          throw Error("half-plane term is not proper");
        for (const Complex& r : t.den.roots())
          if (r.real() >= -1e-12)
            throw Error("half-plane denominator has a root with Re >= 0");
      }
    }
  }

  Domain domain_;
  std::vector<RationalDelayTerm> terms_;
};

inline Complex evaluate(const StableElement& elem, const BoundaryPoint& point) {
  return elem.evaluate(point);
}

inline SampledCurve sample(const StableElement& elem, std::span<const double> thetas,
                           bool closed = true) {
  std::vector<Complex> values(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i)
    values[i] = elem.evaluate({thetas[i], elem.domain()});
  return SampledCurve(std::vector<double>(thetas.begin(), thetas.end()), std::move(values),
                      closed);
}

/// Transplants a delay-free half-plane rational onto the disk through
/// phi(z) = (1+z)/(1-z), which carries the unit circle to the compactified
/// imaginary axis. Boundary values satisfy f(i cot(theta/2)) = g(e^{i theta}).
inline StableElement transplant_to_disk(const StableElement& elem) {
  if (elem.domain() != Domain::HalfPlane || elem.has_delay())
    throw DomainMismatch("conformal transport needs a delay-free half-plane element");
  const Polynomial one_plus = Polynomial({1.0, 1.0});   // 1 + z
  const Polynomial one_minus = Polynomial({1.0, -1.0});  // 1 - z
  std::vector<RationalDelayTerm> out;
  for (const auto& t : elem.terms()) {
    const int k = t.den.degree();
    Polynomial num, den;
    for (int j = 0; j <= k; ++j) {
      const Polynomial basis = one_plus.pow(j) * one_minus.pow(k - j);
      if (j < static_cast<int>(t.num.coeffs().size()))
        num = num + basis * t.num.coeffs()[j];
      if (j < static_cast<int>(t.den.coeffs().size()))
        den = den + basis * t.den.coeffs()[j];
    }
    out.push_back({std::move(num), std::move(den), 0.0});
  }
  return StableElement(Domain::Circle, std::move(out));
}

}  // namespace nuchord
