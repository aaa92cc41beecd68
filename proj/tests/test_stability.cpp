#include <catch2/catch_amalgamated.hpp>

#include "nuchord/nuchord.hpp"
#include "nuchord/selfcheck.hpp"

using namespace nuchord;
using Catch::Approx;

namespace {
const Polynomial kOnePlusS({1.0, 1.0});
const auto kInst = AlgebraInstance::halfplane_c0ap();

CoprimeFactorization delay_plant_cf(double a) {
  const auto n = StableElement::rational(Domain::HalfPlane, Polynomial({1.0}), kOnePlusS);
  const StableElement d(Domain::HalfPlane, {{Polynomial({0.0, 1.0}), kOnePlusS, 0.0},
                                            {Polynomial({-a}), kOnePlusS, 1.0}});
  return CoprimeFactorization(n, d, std::nullopt, kInst);
}

CoprimeFactorization delay_controller_cf() {
  // c = -(1 + e^{-s})
  const StableElement nc(Domain::HalfPlane, {{Polynomial({-1.0}), Polynomial({1.0}), 0.0},
                                             {Polynomial({-1.0}), Polynomial({1.0}), 1.0}});
  return CoprimeFactorization(nc, StableElement::constant(Domain::HalfPlane, 1.0),
                              BezoutWitness{StableElement::constant(Domain::HalfPlane, 0.0),
                                            StableElement::constant(Domain::HalfPlane, 1.0)},
                              kInst);
}

CoprimeFactorization zero_cf() { return coprime_factorize(Fraction::zero(), kInst); }

// mu^{-1} for the delay pair, polished independently of the margin code path
constexpr double kDelayMuInverse = 3.2240447449152723;
}  // namespace

TEST_CASE("stabilizes") {
  SECTION("zero plant, zero controller") { CHECK(stabilizes(zero_cf(), zero_cf())); }
  SECTION("the delay controller stabilizes the delay plant") {
    CHECK(stabilizes(delay_plant_cf(1.0), delay_controller_cf()));
  }
  SECTION("the zero controller does not stabilize 1/(s-1)") {
    const auto cf = coprime_factorize(
        Fraction::from_rational(Polynomial({1.0}), Polynomial({-1.0, 1.0})), kInst);
    CHECK_FALSE(stabilizes(cf, zero_cf()));
  }
}

TEST_CASE("stability margin") {
  SECTION("zero plant and controller have margin 1") {
    CHECK(margin(zero_cf(), zero_cf()) == Approx(1.0).margin(1e-9));
  }
  SECTION("delay pair margin matches the polished reference") {
    const double mu = margin(delay_plant_cf(1.0), delay_controller_cf());
    CHECK(1.0 / mu == Approx(kDelayMuInverse).margin(1e-6));
    CHECK(1.0 / mu >= 3.20);
    CHECK(1.0 / mu <= 3.25);
    CHECK(1.0 / mu <= 5.0);
    CHECK(mu >= 0.2);
  }
  SECTION("non-stabilizing pairs report 0") {
    const auto cf = coprime_factorize(
        Fraction::from_rational(Polynomial({1.0}), Polynomial({-1.0, 1.0})), kInst);
    CHECK(margin(cf, zero_cf()) == 0.0);
  }
  SECTION("margin is symmetric and bounded by 1") {
    DeterministicRng rng(0x57a001);
    int done = 0;
    while (done < 8) {
      const auto cf = coprime_factorize(gen::random_rational_plant(rng), kInst);
      const auto c = gen::bezout_controller(cf);
      if (!c) continue;
      ++done;
      const double a = margin(cf, *c);
      const double b = margin(*c, cf);
      REQUIRE(std::abs(a - b) <= 1e-9);
      REQUIRE(a >= 0.0);
      REQUIRE(a <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("margin through the closed-loop norm") {
  SECTION("zero pair: H has norm 1") {
    CHECK(margin_via_norm(zero_cf(), zero_cf()) == Approx(1.0).margin(1e-9));
  }
  SECTION("delay pair agrees with the infimum formula") {
    const double a = margin(delay_plant_cf(1.0), delay_controller_cf());
    const double b = margin_via_norm(delay_plant_cf(1.0), delay_controller_cf());
    CHECK(std::abs(a - b) <= 1e-7);
  }
  SECTION("random stabilized pairs agree within 1e-7") {
    DeterministicRng rng(0x57a002);
    int done = 0;
    while (done < 8) {
      const auto cf = coprime_factorize(gen::random_rational_plant(rng), kInst);
      const auto c = gen::bezout_controller(cf);
      if (!c) continue;
      ++done;
      REQUIRE(std::abs(margin(cf, *c) - margin_via_norm(cf, *c)) <= 1e-7);
    }
  }
  SECTION("needs a stabilizing pair") {
    const auto cf = coprime_factorize(
        Fraction::from_rational(Polynomial({1.0}), Polynomial({-1.0, 1.0})), kInst);
    CHECK_THROWS_AS(margin_via_norm(cf, zero_cf()), NotStabilizing);
  }
}

TEST_CASE("closed-loop matrix entries") {
  DeterministicRng rng(0x57a003);
  const auto cf = coprime_factorize(gen::random_rational_plant(rng), kInst);
  const auto c = gen::bezout_controller(cf);
  REQUIRE(c.has_value());
  const auto h = ClosedLoopMatrix::from_cfs(cf, *c);
  for (double omega : {0.0, 0.7, -2.3}) {
    const auto pt = BoundaryPoint::from_omega(omega);
    const Complex p = cf.n.evaluate(pt) / cf.d.evaluate(pt);
    const Complex k = c->n.evaluate(pt) / c->d.evaluate(pt);
    const Complex denom = 1.0 - p * k;
    CHECK(std::abs(h.entry(0, 0, pt) - (-p * k / denom)) < 1e-10);
    CHECK(std::abs(h.entry(0, 1, pt) - (p / denom)) < 1e-10);
    CHECK(std::abs(h.entry(1, 0, pt) - (-k / denom)) < 1e-10);
    CHECK(std::abs(h.entry(1, 1, pt) - (1.0 / denom)) < 1e-10);
    // the operator norm dominates every entry
    const double norm = h.operator_norm(pt);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(norm + 1e-12 >= std::abs(h.entry(i, j, pt)));
  }
}

TEST_CASE("robustness certificates") {
  SECTION("p = p0 keeps the whole margin") {
    const auto p0 = delay_plant_cf(1.0);
    const auto cert = certify_robust(p0, delay_controller_cf(), p0, /*direct_mu=*/true);
    CHECK(cert.distance == 0.0);
    CHECK(cert.lower_bound == Approx(cert.mu_nominal));
    CHECK(cert.stabilized);
    REQUIRE(cert.mu_perturbed.has_value());
    CHECK(*cert.mu_perturbed >= cert.lower_bound - 1e-7);
  }
  SECTION("the delay example certifies a = 1.2") {
    const auto cert = certify_robust(delay_plant_cf(1.0), delay_controller_cf(),
                                     delay_plant_cf(1.2), /*direct_mu=*/true);
    CHECK(cert.distance == Approx(0.0905357460).margin(1e-6));
    CHECK(cert.distance < 0.2);
    CHECK(cert.mu_nominal >= 0.2);
    CHECK(cert.lower_bound > 0.0);
    CHECK(cert.stabilized);
    CHECK(*cert.mu_perturbed >= cert.lower_bound - 1e-7);
  }
  SECTION("outside the analysis window the verdict follows the numbers") {
    const auto cert = certify_robust(delay_plant_cf(1.0), delay_controller_cf(),
                                     delay_plant_cf(2.5), /*direct_mu=*/false);
    CHECK(cert.stabilized == (cert.lower_bound > 0.0));
  }
}

TEST_CASE("robustness radius") {
  SECTION("zero pair") { CHECK(robustness_radius(zero_cf(), zero_cf()) == Approx(1.0)); }
  SECTION("delay pair radius clears 1/5") {
    CHECK(robustness_radius(delay_plant_cf(1.0), delay_controller_cf()) >= 0.2);
  }
  SECTION("non-stabilizing pairs have radius 0") {
    const auto cf = coprime_factorize(
        Fraction::from_rational(Polynomial({1.0}), Polynomial({-1.0, 1.0})), kInst);
    CHECK(robustness_radius(cf, zero_cf()) == 0.0);
  }
}

TEST_CASE("margins on the circle and annulus instances") {
  for (const auto& inst : {AlgebraInstance::circle(), AlgebraInstance::annulus_limit()}) {
    // unstable disk plant (z + 2)/(z - 0.5) with its Bezout controller
    const auto cf = coprime_factorize(
        Fraction::from_rational(Polynomial({2.0, 1.0}), Polynomial({-0.5, 1.0})), inst);
    const auto c = gen::bezout_controller(cf);
    REQUIRE(c.has_value());
    CHECK(stabilizes(cf, *c));
    const double mu = margin(cf, *c);
    CHECK(mu > 0.0);
    CHECK(mu <= 1.0 + 1e-12);
    CHECK(std::abs(mu - margin_via_norm(cf, *c)) <= 1e-7);
    // the zero controller leaves the unstable pole: winding blocks it
    const auto zero = coprime_factorize(Fraction::zero(), inst);
    CHECK_FALSE(stabilizes(cf, zero));
    CHECK(margin(cf, zero) == 0.0);
    const auto cert = certify_robust(cf, *c, cf);
    CHECK(cert.stabilized);
    CHECK(cert.lower_bound == Approx(mu));
  }
}

TEST_CASE("margin robustness on a reduced sample") {
  const auto result = check_margin_robustness(15);
  INFO(result.detail);
  CHECK(result.pass);
}
