#include <catch2/catch_amalgamated.hpp>

#include "nuchord/nuchord.hpp"
#include "nuchord/selfcheck.hpp"

using namespace nuchord;
using Catch::Approx;

namespace {
const Polynomial kOnePlusS({1.0, 1.0});

// general member of C(T): rational symbol whose poles may sit anywhere off
// the unit circle, which a stable element cannot represent
BoundaryExpr circle_rational(Polynomial num, Polynomial den = Polynomial({1.0})) {
  auto at = [num, den](Complex z) { return num(z) / den(z); };
  auto eval = [at](const BoundaryPoint& p) { return at(std::polar(1.0, p.theta)); };
  return BoundaryExpr::function(eval, at);
}

StableElement delay_denominator(double a) {
  return StableElement(Domain::HalfPlane, {{Polynomial({0.0, 1.0}), kOnePlusS, 0.0},
                                           {Polynomial({-a}), kOnePlusS, 1.0}});
}
}  // namespace

TEST_CASE("winding numbers of sampled curves") {
  SECTION("z^3 winds three times") {
    const std::function<Complex(double)> fn = [](double theta) {
      return std::polar(1.0, 3.0 * theta);
    };
    CHECK(winding_of_boundary_function(fn) == 3);
  }
  SECTION("constants do not wind") {
    const std::function<Complex(double)> fn = [](double) { return Complex(5.0, 0.0); };
    CHECK(winding_of_boundary_function(fn) == 0);
  }
  SECTION("(z - 0.5)/(1 - 0.3 z) winds once") {
    const std::function<Complex(double)> fn = [](double theta) {
      const Complex z = std::polar(1.0, theta);
      return (z - 0.5) / (1.0 - 0.3 * z);
    };
    CHECK(winding_of_boundary_function(fn) == 1);  // one zero, no poles inside
  }
  SECTION("curve through zero is rejected") {
    const std::function<Complex(double)> fn = [](double theta) {
      return std::polar(1.0, theta) - 1.0;
    };
    CHECK_THROWS_AS(winding_of_boundary_function(fn), CurveThroughZero);
  }
  SECTION("refinement resolves coarse grids on fast curves") {
    const std::function<Complex(double)> fn = [](double theta) {
      return std::polar(1.0, 9.0 * theta);
    };
    CHECK(winding_of_boundary_function(fn, 16) == 9);
  }
  SECTION("antipodal samples without a callback are not resolvable") {
    std::vector<double> thetas(16);
    std::vector<Complex> values(16);
    for (int i = 0; i < 16; ++i) {
      thetas[i] = -kPi + 2.0 * kPi * (i + 1.0) / 16.0;
      values[i] = i % 2 == 0 ? Complex(1.0, 0.0) : Complex(-1.0, 0.0);
    }
    const SampledCurve curve(thetas, values);
    CHECK_THROWS_AS(winding_number(curve), NonResolvableWinding);
  }
  SECTION("winding oracle on random rational curves") {
    const auto result = check_winding_oracle(40);
    INFO(result.detail);
    CHECK(result.pass);
  }
}

TEST_CASE("circle index") {
  const auto inst = AlgebraInstance::circle();
  CHECK(index_circle(BoundaryExpr::constant(1.0), inst).w == 0);
  CHECK(index_circle(circle_rational(Polynomial({0.0, 1.0})), inst).w == 1);
  // (z-2)(z-0.5) / ((z+3)(z+0.25)): one zero and one pole inside
  const Polynomial num = Polynomial({-2.0, 1.0}) * Polynomial({-0.5, 1.0});
  const Polynomial den = Polynomial({3.0, 1.0}) * Polynomial({0.25, 1.0});
  CHECK(index_circle(circle_rational(num, den), inst).w == 0);
}

TEST_CASE("mean motion") {
  const auto inst = AlgebraInstance::halfplane_c0ap();
  SECTION("single exponential has slope -t") {
    const APFunction ap({{Complex(0.4, 0.3), 1.7}});
    CHECK(mean_motion(ap, inst) == Approx(-1.7).margin(1e-12));
  }
  SECTION("nonzero constants have slope 0") {
    const APFunction ap({{Complex(-2.0, 0.5), 0.0}});
    CHECK(mean_motion(ap, inst) == Approx(0.0).margin(1e-12));
  }
  SECTION("dominant constant pins the slope to 0") {
    const APFunction ap({{Complex(2.0, 0.0), 0.0}, {Complex(1.0, 0.0), 1.0}});
    CHECK(std::abs(mean_motion(ap, inst)) <= 1e-5);
  }
  SECTION("dominant exponential pins the slope to its delay") {
    const APFunction ap({{Complex(0.3, 0.0), 0.0}, {Complex(1.0, 0.0), 2.0}});
    CHECK(mean_motion(ap, inst) == Approx(-2.0).margin(1e-5));
  }
  SECTION("AP functions reaching zero are rejected") {
    const APFunction ap({{Complex(1.0, 0.0), 0.0}, {Complex(1.0, 0.0), 1.0}});
    CHECK_THROWS_AS(mean_motion(ap, inst), APNotInvertible);
  }
}

TEST_CASE("C0+AP index") {
  const auto inst = AlgebraInstance::halfplane_c0ap();
  SECTION("identity element") {
    const auto idx = index_c0ap(BoundaryExpr(StableElement::constant(Domain::HalfPlane, 1.0)),
                                inst);
    CHECK(idx.w_av == Approx(0.0).margin(1e-9));
    CHECK(idx.w == 0);
    CHECK(index_is_identity(idx, inst));
  }
  SECTION("branch expression of the delay example is the identity") {
    const auto n1 = StableElement::rational(Domain::HalfPlane, Polynomial({1.0}), kOnePlusS);
    const auto d1 = delay_denominator(1.0);
    const auto na = n1;
    const auto da = delay_denominator(1.2);
    const BoundaryExpr f = conj(BoundaryExpr(n1)) * BoundaryExpr(na) +
                           conj(BoundaryExpr(d1)) * BoundaryExpr(da);
    // the AP part collapses to the constant 1
    const auto ap = f.axis_terms().ap_part();
    REQUIRE(ap.modes().size() == 1);
    CHECK(ap.modes()[0].freq == 0.0);
    CHECK(std::abs(ap.modes()[0].coeff - Complex(1.0, 0.0)) < 1e-12);
    const auto idx = index_c0ap(f, inst);
    CHECK(idx.w_av == Approx(0.0).margin(1e-6));
    CHECK(idx.w == 0);
    CHECK(index_is_identity(idx, inst));
  }
  SECTION("pure delay has mean motion -1") {
    const StableElement pure_delay(Domain::HalfPlane,
                                   {{Polynomial({1.0}), Polynomial({1.0}), 1.0}});
    const auto idx = index_c0ap(BoundaryExpr(pure_delay), inst);
    CHECK(idx.w_av == Approx(-1.0).margin(1e-9));
    CHECK(idx.w == 0);
    CHECK_FALSE(index_is_identity(idx, inst));
  }
  SECTION("unstable pole pushes the winding component to 1") {
    // f = (s-1)/(s+1): the branch expression for plants 0 and 1/(s-1)
    const auto f = StableElement::rational(Domain::HalfPlane, Polynomial({-1.0, 1.0}), kOnePlusS);
    const auto idx = index_c0ap(BoundaryExpr(f), inst);
    CHECK(idx.w_av == Approx(0.0).margin(1e-9));
    CHECK(idx.w == 1);
    CHECK_FALSE(index_is_identity(idx, inst));
  }
}

TEST_CASE("annulus-limit index") {
  SECTION("constants and z") {
    const auto inst = AlgebraInstance::annulus_limit();
    CHECK(index_annulus_limit(BoundaryExpr::constant(1.0), inst).w == 0);
    CHECK(index_annulus_limit(circle_rational(Polynomial({0.0, 1.0})), inst).w == 1);
  }
  SECTION("near-boundary zero needs a schedule beyond it") {
    // f = (z - 0.999)/(1 - 0.999 z) * z^2
    const Polynomial num = Polynomial({-0.999, 1.0}) * Polynomial({0.0, 0.0, 1.0});
    const Polynomial den = Polynomial({1.0, -0.999});
    const auto f = circle_rational(num, den);
    const auto tight = AlgebraInstance::annulus_limit({0.9995, 0.9997, 0.9999, 0.99995, 0.99999});
    CHECK(index_annulus_limit(f, tight).w == 3);
    // the default schedule walks straight through the zero at 0.999
    CHECK_THROWS_AS(index_annulus_limit(f, AlgebraInstance::annulus_limit()),
                    NotInvertibleOnCircle);
  }
  SECTION("windings that keep moving are flagged") {
    const auto f = circle_rational(Polynomial({-0.99995, 1.0}));
    CHECK_THROWS_AS(index_annulus_limit(f, AlgebraInstance::annulus_limit()),
                    IndexNotStabilized);
  }
}

TEST_CASE("invertibility reports") {
  SECTION("constant one") {
    const auto rep = is_invertible(BoundaryExpr::constant(1.0), AlgebraInstance::circle());
    CHECK(rep.invertible);
    CHECK(rep.min_modulus == Approx(1.0).margin(1e-9));
  }
  SECTION("z - 1 vanishes on the circle") {
    const auto rep = is_invertible(circle_rational(Polynomial({-1.0, 1.0})),
                                   AlgebraInstance::circle());
    CHECK_FALSE(rep.invertible);
    CHECK(rep.min_modulus < 1e-7);
  }
  SECTION("delay example branch expression is bounded below") {
    const auto inst = AlgebraInstance::halfplane_c0ap();
    const auto n1 = StableElement::rational(Domain::HalfPlane, Polynomial({1.0}), kOnePlusS);
    const BoundaryExpr f = conj(BoundaryExpr(n1)) * BoundaryExpr(n1) +
                           conj(BoundaryExpr(delay_denominator(1.0))) *
                               BoundaryExpr(delay_denominator(1.2));
    const auto rep = is_invertible(f, inst);
    CHECK(rep.invertible);
    CHECK(rep.min_modulus == Approx(0.600107331).margin(1e-4));
  }
}

TEST_CASE("identity test on index values") {
  const auto circle = AlgebraInstance::circle();
  const auto c0ap = AlgebraInstance::halfplane_c0ap();
  CHECK(index_is_identity(IndexValue::integer(0), circle));
  CHECK_FALSE(index_is_identity(IndexValue::integer(2), circle));
  CHECK_FALSE(index_is_identity(IndexValue::real_integer(-1.0, 0), c0ap));
  CHECK(index_is_identity(IndexValue::real_integer(4e-7, 0), c0ap));
  CHECK_THROWS_AS(index_is_identity(IndexValue::integer(0), c0ap), VariantMismatch);
  CHECK_THROWS_AS(index_is_identity(IndexValue::real_integer(0.0, 0), circle), VariantMismatch);
}

TEST_CASE("index laws") {
  DeterministicRng rng(0x1d0001);
  const auto inst = AlgebraInstance::circle();

  auto random_invertible = [&]() {
    // rational with roots off the unit circle; winding = inside zero count
    const int nz = rng.uniform_int(0, 3), np = rng.uniform_int(0, 3);
    std::vector<Complex> zeros, poles;
    auto draw = [&](int count, std::vector<Complex>& out) {
      int remaining = count;
      while (remaining > 0) {
        const double r = rng.coin() ? rng.uniform(0.1, 0.85) : rng.uniform(1.15, 2.0);
        if (remaining >= 2 && rng.coin()) {
          const double t = rng.uniform(0.1, kPi - 0.1);
          out.push_back(std::polar(r, t));
          out.push_back(std::polar(r, -t));
          remaining -= 2;
        } else {
          out.push_back({rng.coin() ? r : -r, 0.0});
          remaining -= 1;
        }
      }
    };
    draw(nz, zeros);
    draw(np, poles);
    return std::make_pair(Polynomial::from_roots(zeros, rng.signed_uniform(0.5, 2.0)),
                          Polynomial::from_roots(poles, 1.0));
  };

  SECTION("(I1) additivity on the circle") {
    for (int i = 0; i < 20; ++i) {
      const auto [nf, df] = random_invertible();
      const auto [ng, dg] = random_invertible();
      const BoundaryExpr f = circle_rational(nf, df);
      const BoundaryExpr g = circle_rational(ng, dg);
      CHECK(index_circle(f * g, inst).w ==
            index_circle(f, inst).w + index_circle(g, inst).w);
    }
  }
  SECTION("(I1) additivity of the mean motion on exponentials") {
    const auto c0ap = AlgebraInstance::halfplane_c0ap();
    const StableElement e1(Domain::HalfPlane, {{Polynomial({2.0}), Polynomial({1.0}), 1.5}});
    const StableElement e2(Domain::HalfPlane, {{Polynomial({-0.7}), Polynomial({1.0}), 0.5}});
    const auto i1 = index_c0ap(BoundaryExpr(e1), c0ap);
    const auto i2 = index_c0ap(BoundaryExpr(e2), c0ap);
    const auto i12 = index_c0ap(BoundaryExpr(e1) * BoundaryExpr(e2), c0ap);
    CHECK(i12.w_av == Approx(i1.w_av + i2.w_av).margin(1e-9));
    CHECK(i12.w == i1.w + i2.w);
  }
  SECTION("(I2) the involution flips the index") {
    for (int i = 0; i < 10; ++i) {
      const auto [nf, df] = random_invertible();
      const BoundaryExpr f = circle_rational(nf, df);
      CHECK(index_circle(conj(f), inst).w == -index_circle(f, inst).w);
    }
    const auto c0ap = AlgebraInstance::halfplane_c0ap();
    const StableElement e(Domain::HalfPlane, {{Polynomial({2.0}), Polynomial({1.0}), 1.5}});
    const auto fwd = index_c0ap(BoundaryExpr(e), c0ap);
    const auto bwd = index_c0ap(conj(BoundaryExpr(e)), c0ap);
    CHECK(bwd.w_av == Approx(-fwd.w_av).margin(1e-9));
    CHECK(bwd.w == -fwd.w);
  }
  SECTION("(I5) positive elements have identity index") {
    for (int i = 0; i < 10; ++i) {
      const auto [nf, df] = random_invertible();
      const BoundaryExpr f = circle_rational(nf, df);
      const BoundaryExpr positive = conj(f) * f + BoundaryExpr::constant(0.05);
      CHECK(index_is_identity(index_circle(positive, inst), inst));
    }
  }
  SECTION("homotopy invariance under dominated perturbations") {
    for (int i = 0; i < 10; ++i) {
      const auto [nf, df] = random_invertible();
      const BoundaryExpr f = circle_rational(nf, df);
      const auto rep = is_invertible(f, inst);
      if (!rep.invertible) continue;
      // g scaled so that sup|g| < inf|f|
      const auto [ng, dg] = random_invertible();
      const BoundaryExpr g_raw = circle_rational(ng, dg);
      const double sup_g = sup_modulus(g_raw, inst);
      const BoundaryExpr g = BoundaryExpr::constant(0.8 * rep.min_modulus / sup_g) * g_raw;
      const int base = index_circle(f, inst).w;
      for (double t : {0.25, 0.5, 0.75, 1.0}) {
        const BoundaryExpr h = f + BoundaryExpr::constant(t) * g;
        CHECK(index_circle(h, inst).w == base);
      }
    }
  }
}
