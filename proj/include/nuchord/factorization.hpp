#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nuchord/algebra.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/expr.hpp"
#include "nuchord/index_ops.hpp"
#include "nuchord/poly.hpp"
#include "nuchord/scan.hpp"
#include "nuchord/stable_element.hpp"

namespace nuchord {

struct BezoutWitness {
  StableElement x;
  StableElement y;
};

/// A pair (n, d) of stable elements with d != 0 and, optionally, witnesses
/// for the identity n x + d y = 1.
struct CoprimeFactorization {
  StableElement n;
  StableElement d;
  std::optional<BezoutWitness> bezout;
  AlgebraInstance instance;

  CoprimeFactorization(StableElement n_, StableElement d_, std::optional<BezoutWitness> bz,
                       AlgebraInstance inst)
      : n(std::move(n_)), d(std::move(d_)), bezout(std::move(bz)), instance(std::move(inst)) {
    if (d.is_zero()) throw Error("denominator element is zero");
    if (n.domain() != instance.element_domain() || d.domain() != instance.element_domain())
      throw DomainMismatch("factor domain differs from the instance");
  }
};

struct NormalizedCF : CoprimeFactorization {
  double normalization_residual = 0.0;
  NormalizedCF(CoprimeFactorization cf, double residual)
      : CoprimeFactorization(std::move(cf)), normalization_residual(residual) {}
};

/// Plant in the field of fractions: either rational data num/den, or an
/// explicitly supplied coprime factorization (required as soon as delays are
/// involved).
class Fraction {
 public:
  static Fraction from_rational(Polynomial num, Polynomial den) {
    if (den.is_zero()) throw Error("plant denominator polynomial is zero");
    Fraction f;
    f.rational_ = std::make_pair(std::move(num), std::move(den));
    return f;
  }
  static Fraction from_cf(CoprimeFactorization cf) {
    Fraction f;
    f.cf_ = std::move(cf);
    return f;
  }
  static Fraction zero() { return from_rational(Polynomial(), Polynomial::constant(1.0)); }

  bool is_rational() const { return rational_.has_value(); }
  const std::pair<Polynomial, Polynomial>& rational() const { return *rational_; }
  const CoprimeFactorization& explicit_cf() const { return *cf_; }

 private:
  Fraction() = default;
  std::optional<std::pair<Polynomial, Polynomial>> rational_;
  std::optional<CoprimeFactorization> cf_;
};

/// Residual sup |n x + d y - 1| of the witness identity.
inline double verify_bezout(const CoprimeFactorization& cf) {
  if (!cf.bezout) throw MissingWitness("coprime factorization carries no Bezout witnesses");
  const BoundaryExpr expr = BoundaryExpr(cf.n) * BoundaryExpr(cf.bezout->x) +
                            BoundaryExpr(cf.d) * BoundaryExpr(cf.bezout->y) +
                            BoundaryExpr::constant(-1.0);
  return sup_modulus(expr, cf.instance);
}

namespace detail {

// Greedy root matching: removes common roots of (num, den) within tol and
// rebuilds real polynomials. Returns the inputs untouched when nothing
// cancels, so exactly given data is never perturbed by reconstruction.
inline std::pair<Polynomial, Polynomial> cancel_common_roots(const Polynomial& num,
                                                             const Polynomial& den,
                                                             double tol = 1e-8) {
  if (num.is_zero()) return {num, den};
  std::vector<Complex> rn = num.roots();
  std::vector<Complex> rd = den.roots();
  std::vector<bool> drop_n(rn.size(), false), drop_d(rd.size(), false);
  bool cancelled = false;
  for (std::size_t i = 0; i < rn.size(); ++i) {
    std::size_t best = rd.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rd.size(); ++j) {
      if (drop_d[j]) continue;
      const double dist = std::abs(rn[i] - rd[j]);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best < rd.size() && best_dist <= tol * (1.0 + std::abs(rn[i]))) {
      drop_n[i] = drop_d[best] = true;
      cancelled = true;
    }
  }
  if (!cancelled) return {num, den};
  std::vector<Complex> keep_n, keep_d;
  for (std::size_t i = 0; i < rn.size(); ++i)
    if (!drop_n[i]) keep_n.push_back(rn[i]);
  for (std::size_t j = 0; j < rd.size(); ++j)
    if (!drop_d[j]) keep_d.push_back(rd[j]);
  return {Polynomial::from_roots(keep_n, num.leading()),
          Polynomial::from_roots(keep_d, den.leading())};
}

// Solves the polynomial identity N P + D Q = T for deg P <= p_max and
// deg Q <= q_max through the Sylvester-type linear system (column-pivoted
// QR). A relative residual above 1e-10 signals a common factor that
// cancellation missed.
inline std::pair<Polynomial, Polynomial> solve_diophantine(const Polynomial& N,
                                                           const Polynomial& D,
                                                           const Polynomial& T, int p_max,
                                                           int q_max) {
  const int rows = std::max({N.degree() + p_max, D.degree() + q_max, T.degree()}) + 1;
  const int cols = (p_max + 1) + (q_max + 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, cols);
  for (int j = 0; j <= p_max; ++j)
    for (int i = 0; i <= N.degree(); ++i)
      if (!N.is_zero()) A(i + j, j) += N.coeffs()[i];
  for (int j = 0; j <= q_max; ++j)
    for (int i = 0; i <= D.degree(); ++i) A(i + j, p_max + 1 + j) += D.coeffs()[i];
  Eigen::VectorXd t = Eigen::VectorXd::Zero(rows);
  for (int i = 0; i <= T.degree(); ++i) t(i) = T.coeffs()[i];

  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(t);
  const double residual = (A * sol - t).norm();
  if (residual > 1e-10 * std::max(1.0, t.norm()))
    throw SolveFailed("Sylvester system is singular; factors share a polynomial factor");
  std::vector<double> pc(sol.data(), sol.data() + p_max + 1);
  std::vector<double> qc(sol.data() + p_max + 1, sol.data() + cols);
  return {Polynomial(std::move(pc)), Polynomial(std::move(qc))};
}

inline bool in_closed_region(Complex z, Domain domain) {
  return domain == Domain::HalfPlane ? z.real() >= -1e-10 : std::abs(z) <= 1.0 + 1e-10;
}

}  // namespace detail

/// Adaptive infimum of sqrt(|n|^2 + |d|^2) over the boundary; for delay-free
/// rational pairs a root oracle additionally rules out common zeros hidden
/// inside the closed region, returning 0 when one exists.
inline double coprimeness_gap(const StableElement& n, const StableElement& d,
                              const AlgebraInstance& inst) {
  if (n.domain() != d.domain()) throw DomainMismatch("gap of mixed-domain pair");
  const bool oscillatory = inst.kind() == InstanceKind::HalfPlaneC0AP &&
                           (n.has_delay() || d.has_delay());
  if (!n.has_delay() && !d.has_delay() && n.terms().size() == 1 && d.terms().size() == 1 &&
      !n.is_zero()) {
    const auto zn = n.terms()[0].num.roots();
    const auto zd = d.terms()[0].num.roots();
    for (const Complex& a : zn)
      for (const Complex& b : zd)
        if (std::abs(a - b) <= 1e-8 * (1.0 + std::abs(a)) &&
            detail::in_closed_region(a, n.domain()))
          return 0.0;
  }
  double freq = 1.0;
  if (oscillatory) freq = std::max({1.0, n.max_delay(), d.max_delay()});
  const ScanOptions opt = scan_options_for(inst, oscillatory, freq);
  const auto res = scan_extrema(
      [&](const BoundaryPoint& p) {
        return std::sqrt(std::norm(n.evaluate(p)) + std::norm(d.evaluate(p)));
      },
      opt);
  return res.min.value;
}

/// Builds a coprime factorization. Rational plants are reduced and lifted to
/// stable factors; explicitly supplied factorizations are validated against
/// the gap and witness invariants.
inline CoprimeFactorization coprime_factorize(const Fraction& p, const AlgebraInstance& inst) {
  if (!p.is_rational()) {
    CoprimeFactorization cf = p.explicit_cf();
    if (cf.instance.kind() != inst.kind())
      throw DomainMismatch("explicit factorization built for another instance");
    const double gap = coprimeness_gap(cf.n, cf.d, inst);
    const BoundaryExpr sq = conj(BoundaryExpr(cf.n)) * BoundaryExpr(cf.n) +
                            conj(BoundaryExpr(cf.d)) * BoundaryExpr(cf.d);
    const double scale = sup_modulus(sq, inst);
    if (gap * gap <= inst.tolerances().invertibility_tol * std::max(1.0, scale))
      throw NotCoprime("explicit factorization has a vanishing coprimeness gap");
    if (cf.bezout && verify_bezout(cf) > 1e-8)
      throw NotCoprime("Bezout witness residual exceeds 1e-8");
    return cf;
  }

  const Domain domain = inst.element_domain();
  auto [N, D] = detail::cancel_common_roots(p.rational().first, p.rational().second);
  if (N.is_zero()) {
    return CoprimeFactorization(
        StableElement::constant(domain, 0.0), StableElement::constant(domain, 1.0),
        BezoutWitness{StableElement::constant(domain, 0.0), StableElement::constant(domain, 1.0)},
        inst);
  }

  if (domain == Domain::HalfPlane) {
    const int k = std::max(N.degree(), D.degree());
    const Polynomial base = Polynomial({1.0, 1.0}).pow(static_cast<unsigned>(k));
    const Polynomial target = Polynomial({1.0, 1.0}).pow(static_cast<unsigned>(2 * k));
    auto [P, Q] = detail::solve_diophantine(N, D, target, k, k);
    CoprimeFactorization cf(StableElement::rational(domain, N, base),
                            StableElement::rational(domain, D, base),
                            BezoutWitness{StableElement::rational(domain, P, base),
                                          StableElement::rational(domain, Q, base)},
                            inst);
    if (verify_bezout(cf) > 1e-8) throw SolveFailed("constructed witnesses fail the identity");
    return cf;
  }

  // circle/annulus: polynomials already lie in the stable ring
  const Polynomial one = Polynomial::constant(1.0);
  std::optional<BezoutWitness> witness;
  if (D.degree() == 0) {
    witness = BezoutWitness{StableElement::constant(domain, 0.0),
                            StableElement::constant(domain, 1.0 / D.coeffs()[0])};
  } else if (N.degree() == 0) {
    witness = BezoutWitness{StableElement::constant(domain, 1.0 / N.coeffs()[0]),
                            StableElement::constant(domain, 0.0)};
  } else {
    auto [P, Q] = detail::solve_diophantine(N, D, one, D.degree() - 1, N.degree() - 1);
    witness = BezoutWitness{StableElement::rational(domain, P, one),
                            StableElement::rational(domain, Q, one)};
  }
  CoprimeFactorization cf(StableElement::rational(domain, N, one),
                          StableElement::rational(domain, D, one), std::move(witness), inst);
  if (verify_bezout(cf) > 1e-8) throw SolveFailed("constructed witnesses fail the identity");
  return cf;
}

inline CoprimeFactorization ensure_cf(const Fraction& p, const AlgebraInstance& inst) {
  return coprime_factorize(p, inst);
}

/// Rescales (n, d) by a unit u of R, producing another coprime factorization
/// of the same plant. Witnesses transfer as (x/u, y/u) when 1/u stays inside
/// the representable class.
inline CoprimeFactorization unit_rescale(const CoprimeFactorization& cf, const StableElement& u) {
  if (u.domain() != cf.n.domain()) throw DomainMismatch("unit domain differs");
  const auto rep = is_invertible(BoundaryExpr(u), cf.instance);
  if (!rep.invertible) throw NotAUnit("rescale factor is not invertible in S");
  if (!index_is_identity(index_of(u, cf.instance), cf.instance))
    throw NotAUnit("rescale factor has nonzero index");

  std::optional<BezoutWitness> witness;
  if (cf.bezout && !u.has_delay() && u.terms().size() == 1) {
    const auto& t = u.terms()[0];
    try {
      const StableElement inv_u = StableElement::rational(u.domain(), t.den, t.num);
      witness = BezoutWitness{cf.bezout->x * inv_u, cf.bezout->y * inv_u};
    } catch (const Error&) {
      witness.reset();  // 1/u not representable; the rescaled pair is still coprime
    }
  }
  return CoprimeFactorization(cf.n * u, cf.d * u, std::move(witness), cf.instance);
}

/// Normalized coprime factorization of a delay-free rational half-plane
/// plant through polynomial spectral factorization: m stable with
/// m(-s) m(s) = N(-s) N(s) + D(-s) D(s), then (N/m, D/m).
inline NormalizedCF normalized_cf_rational(const Fraction& p, const AlgebraInstance& inst) {
  if (!p.is_rational()) throw DomainMismatch("normalized factorization needs rational data");
  if (inst.element_domain() != Domain::HalfPlane)
    throw DomainMismatch("normalized factorization is built on the half-plane");
  auto [N, D] = detail::cancel_common_roots(p.rational().first, p.rational().second);
  if (N.is_zero()) {
    CoprimeFactorization cf(
        StableElement::constant(Domain::HalfPlane, 0.0),
        StableElement::constant(Domain::HalfPlane, 1.0),
        BezoutWitness{StableElement::constant(Domain::HalfPlane, 0.0),
                      StableElement::constant(Domain::HalfPlane, 1.0)},
        inst);
    return NormalizedCF(std::move(cf), 0.0);
  }

  const Polynomial E = N.reflected() * N + D.reflected() * D;
  const int two_k = E.degree();
  if (two_k % 2 != 0) throw SpectralFactorizationFailed("even polynomial has odd degree");
  const int k = two_k / 2;
  std::vector<Complex> lhp;
  for (const Complex& r : E.roots()) {
    if (std::abs(r.real()) <= 1e-8 * (1.0 + std::abs(r)))
      throw SpectralFactorizationFailed("spectral root on the imaginary axis");
    if (r.real() < 0.0) lhp.push_back(r);
  }
  if (static_cast<int>(lhp.size()) != k)
    throw SpectralFactorizationFailed("spectral roots do not split into +- pairs");
  const double gamma_sq = (k % 2 == 0 ? 1.0 : -1.0) * E.leading();
  if (gamma_sq <= 0.0) throw SpectralFactorizationFailed("leading coefficient has the wrong sign");
  const Polynomial m = Polynomial::from_roots(lhp, std::sqrt(gamma_sq));

  const StableElement n = StableElement::rational(Domain::HalfPlane, N, m);
  const StableElement d = StableElement::rational(Domain::HalfPlane, D, m);
  const Polynomial target = m * Polynomial({1.0, 1.0}).pow(static_cast<unsigned>(k));
  auto [P, Q] = detail::solve_diophantine(N, D, target, k, k);
  const Polynomial base = Polynomial({1.0, 1.0}).pow(static_cast<unsigned>(k));
  CoprimeFactorization cf(n, d,
                          BezoutWitness{StableElement::rational(Domain::HalfPlane, P, base),
                                        StableElement::rational(Domain::HalfPlane, Q, base)},
                          inst);

  const BoundaryExpr norm_expr = conj(BoundaryExpr(n)) * BoundaryExpr(n) +
                                 conj(BoundaryExpr(d)) * BoundaryExpr(d) +
                                 BoundaryExpr::constant(-1.0);
  const double residual = sup_modulus(norm_expr, inst);
  if (residual > 1e-8)
    throw SpectralFactorizationFailed("normalization residual exceeds 1e-8");
  return NormalizedCF(std::move(cf), residual);
}

}  // namespace nuchord
