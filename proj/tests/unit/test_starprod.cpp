#include <doctest.h>

#include <cmath>

#include "csq/error.hpp"
#include "csq/quantize.hpp"
#include "csq/starprod.hpp"
#include "oracles.hpp"

using namespace csq;
using starprod::CoeffMatrix;
using starprod::GaussRational;
using starprod::Rational;
using starprod::SpherePoly;

TEST_SUITE("starprod") {
  TEST_CASE("gaussian rationals") {
    const GaussRational a(Rational(1, 3), Rational(-2)), b(Rational(3, 4), Rational(1, 2));
    const GaussRational p = a * b;
    CHECK(p.re == Rational(1, 4) + Rational(1));
    CHECK(p.im == Rational(1, 6) - Rational(3, 2));
    CHECK((a / Rational(2)).re == Rational(1, 6));
    CHECK(GaussRational::i_unit() * GaussRational::i_unit() == GaussRational(-1));
  }

  TEST_CASE("x3 at level 1") {
    const auto c = starprod::poly_to_coeff(SpherePoly::coordinate(3), 1);
    CHECK(c.raw(0, 0) == GaussRational(-1));
    CHECK(c.raw(1, 1) == GaussRational(1));
    CHECK(c.raw(0, 1).is_zero());
  }

  TEST_CASE("poly and coefficient round trip") {
    const SpherePoly x1 = SpherePoly::coordinate(1), x2 = SpherePoly::coordinate(2),
                     x3 = SpherePoly::coordinate(3);
    const SpherePoly p = x1 * x2 + x3 * GaussRational(Rational(2, 7)) +
                         SpherePoly::constant(GaussRational(Rational(0), Rational(1)));
    for (int n : {2, 3, 5}) {
      const auto c = starprod::poly_to_coeff(p, n);
      CHECK(starprod::poly_to_coeff(starprod::coeff_to_poly(c), n) == c);
      for (cplx z : {cplx{0.3, 0.2}, cplx{-2.0, 1.0}}) {
        const auto u = oracle::unit_from_z(z);
        const cplx ref = u[0] * u[1] + 2.0 / 7.0 * u[2] + cplx{0, 1};
        CHECK(std::abs(c.evaluate(models::ChartPoint::main(z)) - ref) < 1e-14);
        CHECK(std::abs(p.evaluate(u) - ref) < 1e-14);
      }
    }
    CHECK_THROWS_AS(starprod::poly_to_coeff(x1 * x2, 1), ConfigError);
    // x1^2 + x2^2 + x3^2 = 1 lives at level 0 despite degree 2
    CHECK(starprod::poly_to_coeff(x1 * x1 + x2 * x2 + x3 * x3, 1) == CoeffMatrix::identity(1));
  }

  TEST_CASE("star product is the symbol of the operator product") {
    const int n = 3;
    const SpherePoly x1 = SpherePoly::coordinate(1), x3 = SpherePoly::coordinate(3);
    const auto a = starprod::poly_to_coeff(x1 * x3, n);
    const auto b = starprod::poly_to_coeff(x1 + x3 * x3, n);
    const auto ab = starprod::star(a, b);
    // rho_x(A B) with A, B the operators whose symbols are a, b
    const auto A = a.to_matrix(), B = b.to_matrix();
    for (cplx z : {cplx{0.1, 0.3}, cplx{1.4, -0.6}}) {
      const auto x = models::ChartPoint::main(z);
      const auto v = quantize::coherent_vector(n, x);
      CHECK(std::abs(a.evaluate(x) - v.dot(A * v)) < 1e-13);
      CHECK(std::abs(ab.evaluate(x) - v.dot(A * B * v)) < 1e-13);
    }
    const auto c = starprod::poly_to_coeff(x3, n);
    CHECK(starprod::star(starprod::star(a, b), c) == starprod::star(a, starprod::star(b, c)));
    CHECK(starprod::star(CoeffMatrix::identity(n), a) == a);
    CHECK(starprod::star(a, b).adjoint() == starprod::star(b.adjoint(), a.adjoint()));
    CHECK_THROWS_AS(starprod::star(a, CoeffMatrix::identity(2)), ConfigError);
  }

  TEST_CASE("bracket constants") {
    const auto c = starprod::calibrate_brackets();
    CHECK(c.kappa == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.gamma == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("sphere samples are unit vectors") {
    for (const auto& v : starprod::sphere_samples(40)) CHECK(std::abs(oracle::dot(v, v) - 1.0) < 1e-15);
  }
}
