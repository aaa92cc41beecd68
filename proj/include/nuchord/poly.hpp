#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "nuchord/errors.hpp"

namespace nuchord {

using Complex = std::complex<double>;

/// Real-coefficient polynomial, coefficients stored in ascending powers.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  Polynomial(std::initializer_list<double> c) : coeffs_(c) { trim(); }
  explicit Polynomial(std::vector<double> c) : coeffs_(std::move(c)) { trim(); }

  static Polynomial constant(double c) { return Polynomial({c}); }
  static Polynomial variable() { return Polynomial({0.0, 1.0}); }

  // Product of monic linear factors (s - r_k), conjugate roots paired into
  // real quadratics, times `leading`.
  static Polynomial from_roots(std::span<const Complex> roots, double leading) {
    Polynomial p = constant(leading);
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (used[i]) continue;
      const Complex r = roots[i];
      const double imag_tol = 1e-10 * (1.0 + std::abs(r));
      if (std::abs(r.imag()) <= imag_tol) {
        p = p * Polynomial({-r.real(), 1.0});
        used[i] = true;
        continue;
      }
      // find the closest unused conjugate partner
      std::size_t best = roots.size();
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        if (used[j]) continue;
        const double dist = std::abs(roots[j] - std::conj(r));
        if (dist < best_dist) {
          best_dist = dist;
          best = j;
        }
      }
      if (best == roots.size()) throw SolveFailed("unpaired complex root in from_roots");
      used[i] = used[best] = true;
      p = p * Polynomial({std::norm(r), -2.0 * r.real(), 1.0});
    }
    return p;
  }

  const std::vector<double>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double leading() const { return coeffs_.back(); }
  double max_abs_coeff() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  Complex operator()(Complex x) const {
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial operator+(const Polynomial& o) const {
    std::vector<double> c(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] += coeffs_[i];
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) c[i] += o.coeffs_[i];
    return Polynomial(std::move(c));
  }
  Polynomial operator-(const Polynomial& o) const { return *this + (o * -1.0); }
  Polynomial operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return Polynomial();
    std::vector<double> c(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      for (std::size_t j = 0; j < o.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * o.coeffs_[j];
    return Polynomial(std::move(c));
  }
  Polynomial operator*(double k) const {
    std::vector<double> c = coeffs_;
    for (double& x : c) x *= k;
    return Polynomial(std::move(c));
  }

  /// p(-s): flips the sign of odd coefficients.
  Polynomial reflected() const {
    std::vector<double> c = coeffs_;
    for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
    return Polynomial(std::move(c));
  }

  Polynomial pow(unsigned k) const {
    Polynomial acc = constant(1.0);
    for (unsigned i = 0; i < k; ++i) acc = acc * (*this);
    return acc;
  }

  /// Roots via the companion-matrix eigenproblem. Empty for constants.
  std::vector<Complex> roots() const {
    const int n = degree();
    if (n <= 0 || is_zero()) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    const double lead = coeffs_[n];
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeffs_[i] / lead;
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<Complex> out(n);
    for (int i = 0; i < n; ++i) out[i] = solver.eigenvalues()(i);
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
  }

 private:
  void trim() {
    if (coeffs_.empty()) {
      coeffs_ = {0.0};
      return;
    }
    const double tol = 1e-12 * max_abs_coeff();
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= tol) coeffs_.pop_back();
    if (coeffs_.size() == 1 && std::abs(coeffs_[0]) <= 0.0) coeffs_[0] = 0.0;
  }

  std::vector<double> coeffs_;
};

inline Polynomial operator*(double k, const Polynomial& p) { return p * k; }

/// Limit of num/den along the imaginary axis as |s| -> infinity:
/// 0 when strictly proper, ratio of leading coefficients when biproper.
inline Complex rational_limit_at_infinity(const Polynomial& num, const Polynomial& den) {
  if (num.is_zero()) return 0.0;
  if (num.degree() > den.degree()) throw EvaluationAtInfinityUndefined("improper rational part");
  if (num.degree() < den.degree()) return 0.0;
  return num.leading() / den.leading();
}

}  // namespace nuchord
