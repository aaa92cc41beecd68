#include <catch2/catch_amalgamated.hpp>

#include "nuchord/nuchord.hpp"
#include "nuchord/selfcheck.hpp"

using namespace nuchord;
using Catch::Approx;

namespace {
const Polynomial kOnePlusS({1.0, 1.0});
const auto kInstHp = AlgebraInstance::halfplane_c0ap();
const auto kInstCircle = AlgebraInstance::circle();

CoprimeFactorization delay_nominal_cf() {
  const auto n = StableElement::rational(Domain::HalfPlane, Polynomial({1.0}), kOnePlusS);
  const StableElement d(Domain::HalfPlane, {{Polynomial({0.0, 1.0}), kOnePlusS, 0.0},
                                            {Polynomial({-1.0}), kOnePlusS, 1.0}});
  const StableElement x(Domain::HalfPlane, {{Polynomial({1.0}), Polynomial({1.0}), 0.0},
                                            {Polynomial({1.0}), Polynomial({1.0}), 1.0}});
  return CoprimeFactorization(n, d,
                              BezoutWitness{x, StableElement::constant(Domain::HalfPlane, 1.0)},
                              kInstHp);
}
}  // namespace

TEST_CASE("verify_bezout") {
  SECTION("zero plant witnesses") {
    CoprimeFactorization cf(StableElement::constant(Domain::HalfPlane, 0.0),
                            StableElement::constant(Domain::HalfPlane, 1.0),
                            BezoutWitness{StableElement::constant(Domain::HalfPlane, 0.0),
                                          StableElement::constant(Domain::HalfPlane, 1.0)},
                            kInstHp);
    CHECK(verify_bezout(cf) <= 1e-12);
  }
  SECTION("delay example witnesses satisfy the identity exactly") {
    CHECK(verify_bezout(delay_nominal_cf()) <= 1e-12);
  }
  SECTION("perturbed witness shows the residual") {
    auto cf = delay_nominal_cf();
    cf.bezout->x = cf.bezout->x + StableElement::constant(Domain::HalfPlane, 0.01);
    // residual = 0.01 * sup |n| = 0.01
    CHECK(verify_bezout(cf) == Approx(0.01).margin(1e-6));
  }
  SECTION("missing witnesses") {
    auto cf = delay_nominal_cf();
    cf.bezout.reset();
    CHECK_THROWS_AS(verify_bezout(cf), MissingWitness);
  }
}

TEST_CASE("coprimeness gap") {
  SECTION("the pair (0, 1)") {
    CHECK(coprimeness_gap(StableElement::constant(Domain::HalfPlane, 0.0),
                          StableElement::constant(Domain::HalfPlane, 1.0), kInstHp) ==
          Approx(1.0).margin(1e-9));
  }
  SECTION("a common circle zero collapses the gap") {
    const auto f = StableElement::rational(Domain::Circle, Polynomial({-0.5, 1.0}),
                                           Polynomial({1.0}));
    CHECK(coprimeness_gap(f, f, kInstCircle) == 0.0);
  }
  SECTION("an interior half-plane common zero is caught by the root oracle") {
    // both vanish at s = 1, yet neither vanishes on the axis
    const auto n = StableElement::rational(Domain::HalfPlane, Polynomial({-1.0, 1.0}), kOnePlusS);
    const auto d = StableElement::rational(
        Domain::HalfPlane, Polynomial({-1.0, 1.0}) * Polynomial({2.0, 1.0}),
        kOnePlusS * kOnePlusS);
    CHECK(coprimeness_gap(n, d, kInstHp) == 0.0);
  }
  SECTION("delay example pair has a positive gap") {
    const auto cf = delay_nominal_cf();
    const double gap = coprimeness_gap(cf.n, cf.d, kInstHp);
    CHECK(gap > 0.1);
    // cross-check against a dense window minimum
    double dense = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 400000; ++j) {
      const double omega = -200.0 + 400.0 * j / 400000.0;
      const auto p = BoundaryPoint::from_omega(omega);
      dense = std::min(dense, std::sqrt(std::norm(cf.n.evaluate(p)) +
                                        std::norm(cf.d.evaluate(p))));
    }
    CHECK(gap <= dense + 1e-6);
  }
}

TEST_CASE("coprime factorization of rational plants") {
  SECTION("1/(s-1) lifts to (1/(s+1), (s-1)/(s+1))") {
    const auto cf = coprime_factorize(
        Fraction::from_rational(Polynomial({1.0}), Polynomial({-1.0, 1.0})), kInstHp);
    const auto p0 = BoundaryPoint::from_omega(0.7);
    CHECK(std::abs(cf.n.evaluate(p0) - Complex(1.0, 0.0) / Complex(1.0, 0.7)) < 1e-12);
    CHECK(std::abs(cf.d.evaluate(p0) - Complex(-1.0, 0.7) / Complex(1.0, 0.7)) < 1e-12);
    REQUIRE(cf.bezout.has_value());
    CHECK(verify_bezout(cf) <= 1e-8);
  }
  SECTION("zero plant") {
    const auto cf = coprime_factorize(Fraction::zero(), kInstHp);
    CHECK(cf.n.is_zero());
    CHECK(std::abs(cf.d.evaluate(BoundaryPoint::from_omega(1.0)) - 1.0) < 1e-14);
    CHECK(verify_bezout(cf) <= 1e-12);
  }
  SECTION("(s-1)/(s-1) cancels to the unit plant") {
    const auto cf = coprime_factorize(
        Fraction::from_rational(Polynomial({-1.0, 1.0}), Polynomial({-1.0, 1.0})), kInstHp);
    for (double omega : {0.0, 0.5, 3.0}) {
      const auto p = BoundaryPoint::from_omega(omega);
      CHECK(std::abs(cf.n.evaluate(p) - cf.d.evaluate(p)) < 1e-12);
    }
    CHECK(verify_bezout(cf) <= 1e-8);
  }
  SECTION("circle plants factor over the disk polynomials") {
    const auto cf = coprime_factorize(
        Fraction::from_rational(Polynomial({1.0}), Polynomial({-0.5, 1.0})), kInstCircle);
    CHECK(verify_bezout(cf) <= 1e-8);
    CHECK(coprimeness_gap(cf.n, cf.d, kInstCircle) > 1e-3);
  }
  SECTION("explicit non-coprime factorizations are rejected") {
    const auto f = StableElement::rational(Domain::Circle, Polynomial({-0.5, 1.0}),
                                           Polynomial({1.0}));
    const Fraction bad = Fraction::from_cf(CoprimeFactorization(f, f, std::nullopt, kInstCircle));
    CHECK_THROWS_AS(coprime_factorize(bad, kInstCircle), NotCoprime);
  }
  SECTION("random plants satisfy the witness and gap invariants") {
    DeterministicRng rng(0xfac001);
    for (int i = 0; i < 100; ++i) {
      const auto cf = coprime_factorize(gen::random_rational_plant(rng), kInstHp);
      REQUIRE(verify_bezout(cf) <= 1e-8);
      REQUIRE(coprimeness_gap(cf.n, cf.d, kInstHp) > 1e-6);
    }
  }
}

TEST_CASE("unit rescaling") {
  const auto cf = coprime_factorize(
      Fraction::from_rational(Polynomial({1.0}), Polynomial({-1.0, 1.0})), kInstHp);
  SECTION("u = 1 keeps the factorization") {
    const auto r = unit_rescale(cf, StableElement::constant(Domain::HalfPlane, 1.0));
    const auto p = BoundaryPoint::from_omega(0.3);
    CHECK(std::abs(r.n.evaluate(p) - cf.n.evaluate(p)) < 1e-14);
    CHECK(verify_bezout(r) <= 1e-8);
  }
  SECTION("(s+2)/(s+1) is a unit and preserves the plant") {
    const auto u = StableElement::rational(Domain::HalfPlane, Polynomial({2.0, 1.0}), kOnePlusS);
    const auto r = unit_rescale(cf, u);
    REQUIRE(r.bezout.has_value());
    CHECK(verify_bezout(r) <= 1e-8);
    for (double omega : {0.0, 0.4, 2.0, 30.0}) {
      const auto p = BoundaryPoint::from_omega(omega);
      CHECK(std::abs(r.n.evaluate(p) * cf.d.evaluate(p) -
                     cf.n.evaluate(p) * r.d.evaluate(p)) < 1e-12);
    }
  }
  SECTION("interior zeros disqualify the unit") {
    const auto u = StableElement::rational(Domain::HalfPlane, Polynomial({-1.0, 1.0}), kOnePlusS);
    CHECK_THROWS_AS(unit_rescale(cf, u), NotAUnit);
  }
  SECTION("strictly proper factors vanish at infinity and are not units") {
    const auto u = StableElement::rational(Domain::HalfPlane, Polynomial({1.0}), kOnePlusS);
    CHECK_THROWS_AS(unit_rescale(cf, u), NotAUnit);
  }
  SECTION("random units keep the plant within 1e-9") {
    DeterministicRng rng(0xfac002);
    for (int i = 0; i < 25; ++i) {
      const auto base = coprime_factorize(gen::random_rational_plant(rng), kInstHp);
      const auto u = gen::random_halfplane_unit(rng);
      const auto r = unit_rescale(base, u);
      double worst = 0.0;
      for (int j = 0; j < 200; ++j) {
        const auto p = BoundaryPoint::from_omega(rng.uniform(-100.0, 100.0));
        worst = std::max(worst, std::abs(r.n.evaluate(p) * base.d.evaluate(p) -
                                         base.n.evaluate(p) * r.d.evaluate(p)));
      }
      REQUIRE(worst <= 1e-9);
    }
  }
}

TEST_CASE("normalized coprime factorization") {
  SECTION("zero plant") {
    const auto ncf = normalized_cf_rational(Fraction::zero(), kInstHp);
    CHECK(ncf.n.is_zero());
    CHECK(ncf.normalization_residual <= 1e-12);
  }
  SECTION("integrator: m = s + 1") {
    const auto ncf = normalized_cf_rational(
        Fraction::from_rational(Polynomial({1.0}), Polynomial({0.0, 1.0})), kInstHp);
    const auto p = BoundaryPoint::from_omega(1.0);
    CHECK(std::abs(ncf.n.evaluate(p) - Complex(1.0, 0.0) / Complex(1.0, 1.0)) < 1e-12);
    CHECK(std::abs(ncf.d.evaluate(p) - Complex(0.0, 1.0) / Complex(1.0, 1.0)) < 1e-12);
    CHECK(ncf.normalization_residual <= 1e-8);
  }
  SECTION("1/(s-1): m = s + sqrt(2)") {
    const auto ncf = normalized_cf_rational(
        Fraction::from_rational(Polynomial({1.0}), Polynomial({-1.0, 1.0})), kInstHp);
    const double sqrt2 = std::sqrt(2.0);
    const auto p0 = BoundaryPoint::from_omega(0.0);
    CHECK(std::abs(ncf.n.evaluate(p0) - Complex(1.0 / sqrt2, 0.0)) < 1e-12);
    CHECK(std::abs(ncf.d.evaluate(p0) - Complex(-1.0 / sqrt2, 0.0)) < 1e-12);
    CHECK(ncf.normalization_residual <= 1e-8);
    REQUIRE(ncf.bezout.has_value());
    CHECK(verify_bezout(ncf) <= 1e-8);
  }
  SECTION("near-axis spectral roots abort") {
    // numerator and denominator nearly share the axis roots +-i
    const Polynomial num({1.0, 0.0, 1.0});
    const Polynomial den = Polynomial({1.0 + 2e-7, 0.0, 1.0}) * Polynomial({1.0, 1.0});
    CHECK_THROWS_AS(
        normalized_cf_rational(Fraction::from_rational(num, den), kInstHp),
        SpectralFactorizationFailed);
  }
  SECTION("random plants normalize within 1e-8") {
    DeterministicRng rng(0xfac003);
    for (int i = 0; i < 30; ++i) {
      const auto ncf = normalized_cf_rational(gen::random_rational_plant(rng), kInstHp);
      REQUIRE(ncf.normalization_residual <= 1e-8);
      REQUIRE(verify_bezout(ncf) <= 1e-8);
    }
  }
}
