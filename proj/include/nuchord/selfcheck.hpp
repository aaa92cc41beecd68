#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nuchord/factorization.hpp"
#include "nuchord/metric.hpp"
#include "nuchord/stability.hpp"
#include "nuchord/winding.hpp"

namespace nuchord {

/// Uniform draws built directly on mt19937_64 words, so streams are
/// reproducible across standard libraries.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1);
  }
  bool coin() { return (gen_() & 1) != 0; }
  double signed_uniform(double lo, double hi) { return (coin() ? 1.0 : -1.0) * uniform(lo, hi); }
  Complex box(double half_width) {
    return {uniform(-half_width, half_width), uniform(-half_width, half_width)};
  }

 private:
  std::mt19937_64 gen_;
};

namespace gen {

/// Real polynomial with the requested degree whose roots stay clear of the
/// imaginary axis by at least min_re (either half-plane).
inline Polynomial axis_free_poly(DeterministicRng& rng, int deg, double min_re = 0.1) {
  std::vector<Complex> roots;
  int remaining = deg;
  while (remaining > 0) {
    const double re = (rng.coin() ? 1.0 : -1.0) * rng.uniform(min_re, 2.5);
    if (remaining >= 2 && rng.coin()) {
      const double im = rng.uniform(0.1, 2.5);
      roots.emplace_back(re, im);
      roots.emplace_back(re, -im);
      remaining -= 2;
    } else {
      roots.emplace_back(re, 0.0);
      remaining -= 1;
    }
  }
  return Polynomial::from_roots(roots, rng.signed_uniform(0.5, 2.0));
}

inline double root_separation(const Polynomial& a, const Polynomial& b) {
  double sep = std::numeric_limits<double>::infinity();
  for (const Complex& ra : a.roots())
    for (const Complex& rb : b.roots()) sep = std::min(sep, std::abs(ra - rb));
  return sep;
}

/// Random rational plant of degree <= max_deg with no poles or zeros on the
/// boundary and well-separated numerator/denominator roots.
inline Fraction random_rational_plant(DeterministicRng& rng, int max_deg = 4) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    const Polynomial num = axis_free_poly(rng, rng.uniform_int(0, max_deg));
    const Polynomial den = axis_free_poly(rng, rng.uniform_int(1, max_deg));
    if (root_separation(num, den) < 0.08) continue;
    return Fraction::from_rational(num, den);
  }
  throw Error("plant generation failed to satisfy the separation constraints");
}

/// Coefficientwise perturbation of a rational plant, resampled until the
/// perturbed data keeps clear of the boundary.
inline Fraction perturb_plant(DeterministicRng& rng, const Fraction& base, double eps) {
  const auto& [num, den] = base.rational();
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double scale_n = num.max_abs_coeff(), scale_d = den.max_abs_coeff();
    std::vector<double> nc = num.coeffs(), dc = den.coeffs();
    for (double& c : nc) c += eps * scale_n * rng.uniform(-1.0, 1.0);
    for (double& c : dc) c += eps * scale_d * rng.uniform(-1.0, 1.0);
    const Polynomial pn{std::vector<double>(nc)}, pd{std::vector<double>(dc)};
    if (pd.is_zero()) continue;
    bool ok = true;
    for (const Complex& r : pn.roots()) ok = ok && std::abs(r.real()) > 1e-3;
    for (const Complex& r : pd.roots()) ok = ok && std::abs(r.real()) > 1e-3;
    if (!ok || root_separation(pn, pd) < 1e-3) {
      eps *= 0.7;
      continue;
    }
    return Fraction::from_rational(pn, pd);
  }
  throw Error("perturbation failed to satisfy the boundary constraints");
}

/// Unit of the half-plane stable ring: a biproper quotient of stable
/// polynomials (optionally negated), so it is invertible with identity index.
inline StableElement random_halfplane_unit(DeterministicRng& rng) {
  const int factors = rng.uniform_int(0, 2);
  Polynomial num = Polynomial::constant(rng.signed_uniform(0.5, 2.0));
  Polynomial den = Polynomial::constant(1.0);
  for (int i = 0; i < factors; ++i) {
    num = num * Polynomial({rng.uniform(0.2, 3.0), 1.0});
    den = den * Polynomial({rng.uniform(0.2, 3.0), 1.0});
  }
  return StableElement::rational(Domain::HalfPlane, num, den);
}

/// The controller read off the Bezout witnesses: c = -x/y, with witnesses
/// (-n, d) for its own factorization. Fails when y degenerates.
inline std::optional<CoprimeFactorization> bezout_controller(const CoprimeFactorization& cf) {
  if (!cf.bezout) return std::nullopt;
  if (cf.bezout->y.is_zero()) return std::nullopt;
  try {
    return CoprimeFactorization(-cf.bezout->x, cf.bezout->y,
                                BezoutWitness{-cf.n, cf.d}, cf.instance);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace gen

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  bool pass = false;
  std::string detail;
};

namespace detail_fmt {
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}
}  // namespace detail_fmt


/// |a conj(alpha) + b conj(beta)|^2 complements |a beta - b alpha|^2 inside
/// the product of the squared norms; checked on random quadruples.
inline CheckResult check_complement_identity(std::size_t n = 10000) {
  DeterministicRng rng(0x5eed0001);
  double worst = 0.0;
  std::size_t tested = 0;
  while (tested < n) {
    const Complex a = rng.box(2.0), b = rng.box(2.0);
    const Complex alpha = rng.box(2.0), beta = rng.box(2.0);
    const double q1 = std::norm(a) + std::norm(b);
    const double q2 = std::norm(alpha) + std::norm(beta);
    if (q1 < 1e-2 || q2 < 1e-2) continue;
    ++tested;
    const double lhs = 1.0 - std::norm(a * beta - b * alpha) / (q1 * q2);
    const double rhs = std::norm(a * std::conj(alpha) + b * std::conj(beta)) / (q1 * q2);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {"complement identity", n, worst <= 1e-12,
          "max deviation " + detail_fmt::sci(worst)};
}

/// Winding numbers of random rational boundary curves against the
/// zeros-minus-poles count from companion-matrix roots.
inline CheckResult check_winding_oracle(std::size_t n = 100) {
  DeterministicRng rng(0x5eed0002);
  auto off_circle_roots = [&](int count) {
    std::vector<Complex> roots;
    int remaining = count;
    while (remaining > 0) {
      const double radius = rng.coin() ? rng.uniform(0.08, 0.88) : rng.uniform(1.12, 2.2);
      if (remaining >= 2 && rng.coin()) {
        const double angle = rng.uniform(0.05, kPi - 0.05);
        roots.push_back(std::polar(radius, angle));
        roots.push_back(std::polar(radius, -angle));
        remaining -= 2;
      } else {
        roots.push_back({rng.coin() ? radius : -radius, 0.0});
        remaining -= 1;
      }
    }
    return roots;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto zn = off_circle_roots(rng.uniform_int(0, 5));
    const auto zd = off_circle_roots(rng.uniform_int(0, 5));
    const Polynomial num = Polynomial::from_roots(zn, rng.signed_uniform(0.5, 2.0));
    const Polynomial den = Polynomial::from_roots(zd, rng.signed_uniform(0.5, 2.0));
    int expected = 0;
    for (const Complex& r : zn) expected += std::abs(r) < 1.0 ? 1 : 0;
    for (const Complex& r : zd) expected -= std::abs(r) < 1.0 ? 1 : 0;
    const std::function<Complex(double)> fn = [&](double theta) {
      const Complex z = std::polar(1.0, theta);
      return num(z) / den(z);
    };
    const int w = winding_of_boundary_function(fn);
    if (w != expected)
      return {"winding oracle", n, false,
              "case " + std::to_string(i) + ": got " + std::to_string(w) + " expected " +
                  std::to_string(expected)};
  }
  return {"winding oracle", n, true, "exact integer match"};
}

namespace gen {

/// Triple of plants mixing independent draws with perturbations of the
/// first, so distances land on both metric branches and the triangle
/// inequality is exercised where it is tight.
inline std::array<Fraction, 3> random_plant_triple(DeterministicRng& rng) {
  const Fraction p1 = random_rational_plant(rng);
  const Fraction p2 = rng.coin() ? perturb_plant(rng, p1, rng.uniform(0.01, 0.5))
                                 : random_rational_plant(rng);
  const Fraction p0 = rng.coin() ? perturb_plant(rng, p1, rng.uniform(0.01, 0.5))
                                 : random_rational_plant(rng);
  return {p1, p2, p0};
}

}  // namespace gen

/// Metric axioms on random rational triples: identity at the branch level,
/// symmetry to 1e-9, triangle inequality to 1e-7.
inline CheckResult check_metric_axioms(std::size_t n_triples = 200) {
  DeterministicRng rng(0x5eed0003);
  const AlgebraInstance inst = AlgebraInstance::halfplane_c0ap();
  double worst_sym = 0.0, worst_tri = -1.0;
  for (std::size_t i = 0; i < n_triples; ++i) {
    const auto [p1, p2, p0] = gen::random_plant_triple(rng);
    const auto cf1 = coprime_factorize(p1, inst);
    const auto cf2 = coprime_factorize(p2, inst);
    const auto cf0 = coprime_factorize(p0, inst);
    const auto self = d_cr(cf1, cf1);
    if (self.value != 0.0 || self.branch != MetricBranch::KappaSup)
      return {"metric axioms", n_triples, false, "d(p, p) != 0 at case " + std::to_string(i)};
    const auto d12 = d_cr(cf1, cf2), d21 = d_cr(cf2, cf1);
    if (d12.branch != d21.branch)
      return {"metric axioms", n_triples, false, "branch asymmetry at case " + std::to_string(i)};
    worst_sym = std::max(worst_sym, std::abs(d12.value - d21.value));
    const auto d10 = d_cr(cf1, cf0), d02 = d_cr(cf0, cf2);
    worst_tri = std::max(worst_tri, d12.value - d10.value - d02.value);
  }
  const bool pass = worst_sym <= 1e-9 && worst_tri <= 1e-7;
  return {"metric axioms", n_triples, pass,
          "symmetry dev " + detail_fmt::sci(worst_sym) + ", worst triangle slack " +
              detail_fmt::sci(-worst_tri)};
}

/// Margin robustness on random (plant, Bezout controller, perturbation)
/// triples: mu(p, c) >= mu(p0, c) - d_cr(p, p0) - 1e-7.
inline CheckResult check_margin_robustness(std::size_t n = 100) {
  DeterministicRng rng(0x5eed0004);
  const AlgebraInstance inst = AlgebraInstance::halfplane_c0ap();
  double min_slack = std::numeric_limits<double>::infinity();
  std::size_t done = 0;
  while (done < n) {
    const Fraction p0 = gen::random_rational_plant(rng);
    const auto cf0 = coprime_factorize(p0, inst);
    const auto controller = gen::bezout_controller(cf0);
    if (!controller) continue;
    const double mu0 = margin(cf0, *controller);
    const Fraction p = gen::perturb_plant(rng, p0, rng.uniform(0.01, 0.4));
    const auto cfp = coprime_factorize(p, inst);
    const double dist = d_cr(cfp, cf0).value;
    const double mup = margin(cfp, *controller);
    min_slack = std::min(min_slack, mup - (mu0 - dist));
    ++done;
  }
  return {"margin robustness", n, min_slack >= -1e-7,
          "min slack " + detail_fmt::sci(min_slack)};
}

inline std::vector<CheckResult> run_selftest() {
  return {check_complement_identity(), check_winding_oracle(), check_metric_axioms(),
          check_margin_robustness()};
}

}  // namespace nuchord
