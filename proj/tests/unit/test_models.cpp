#include <doctest.h>

#include <cmath>

#include "csq/error.hpp"
#include "csq/models.hpp"
#include "oracles.hpp"

using namespace csq;
using models::ChartPoint;
using models::ModelSpace;

TEST_SUITE("models") {
  TEST_CASE("dilog matches gsl") {
    CHECK(models::dilog(0.0) == 0.0);
    CHECK(std::abs(models::dilog(-1.0) + kPi * kPi / 12.0) < 1e-15);
    CHECK(std::abs(models::dilog(1.0) - kPi * kPi / 6.0) < 1e-14);
    for (double x : {-1e6, -300.0, -50.0, -7.5, -2.0, -1.0, -0.6, -0.3, -1e-3, 1e-8, 0.2, 0.5, 0.7,
                     0.9, 0.999})
      CHECK(std::abs(models::dilog(x) - oracle::gsl_dilog(x)) <=
            1e-12 * std::max(1.0, std::abs(oracle::gsl_dilog(x))));
  }

  TEST_CASE("podles coefficients against direct quadrature") {
    for (double hbar : {1.0, 0.5}) {
      const auto c = models::podles_coefficients(hbar, 8);
      for (int m = 0; m <= 8; ++m) {
        const double ref = oracle::podles_coefficient(hbar, m);
        CHECK(std::abs(c[m] - ref) <= 1e-10 * ref);
        CHECK(c[m] > 0.0);
      }
    }
    const auto c = models::podles_coefficients(1.0, 12);
    for (int m = 1; m <= 12; ++m) CHECK(c[m] < c[m - 1]);
    CHECK_THROWS_AS(models::podles_coefficients(-1.0, 3), ConfigError);
  }

  TEST_CASE("podles truncation is adaptive") {
    const auto m = ModelSpace::podles(1.0);
    const auto& s = *std::get<models::Podles>(m.params()).series;
    CHECK(s.terms() > 3);
    CHECK(s.truncation_bound <= 1e-13);
  }

  TEST_CASE("sphere kernel modulus") {
    for (int n : {1, 2, 5}) {
      const auto m = ModelSpace::sphere(n);
      const cplx zs[] = {{0.3, -0.2}, {1.5, 0.4}, {-0.1, 2.0}, {0.0, 0.0}};
      for (cplx a : zs)
        for (cplx b : zs) {
          const auto x = ChartPoint::main(a), y = ChartPoint::main(b);
          const double ref =
              oracle::sphere_modulus_sq(n, oracle::unit_from_z(a), oracle::unit_from_z(b));
          CHECK(std::abs(std::norm(models::kernel(m, x, y)) - ref) < 1e-14);
          CHECK(std::abs(models::kernel(m, x, y) - std::conj(models::kernel(m, y, x))) < 1e-15);
        }
      // the same point seen from the other chart
      const cplx z{0.7, 0.2};
      const auto a = ChartPoint::main(z), b = ChartPoint::secondary(1.0 / z);
      CHECK(std::abs(std::abs(models::kernel(m, a, b)) - 1.0) < 1e-14);
    }
  }

  TEST_CASE("unit vectors round-trip") {
    for (cplx z : {cplx{0.2, 0.9}, cplx{-3.0, 1.0}, cplx{0.0, 0.0}}) {
      const auto u = models::to_unit_vector(ChartPoint::main(z));
      const auto ref = oracle::unit_from_z(z);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(u[i] - ref[i]) < 1e-15);
      const auto back = models::to_unit_vector(models::from_unit_vector(u));
      for (int i = 0; i < 3; ++i) CHECK(std::abs(back[i] - u[i]) < 1e-15);
    }
    const auto north = models::from_unit_vector({0, 0, 1});
    CHECK(north.chart == models::ChartId::secondary);
  }

  TEST_CASE("plane and half-plane kernels") {
    const auto p = ModelSpace::plane(0.5);
    const cplx a{0.3, 1.0}, b{-0.4, 0.2};
    CHECK(std::abs(std::norm(models::kernel(p, ChartPoint::main(a), ChartPoint::main(b))) -
                   std::exp(-std::norm(a - b) / 0.5)) < 1e-15);
    const auto h = ModelSpace::half_plane(3);
    const cplx c{0.1, 2.0};
    const double ref = std::pow(4 * a.imag() * c.imag() / std::norm(a - std::conj(c)), 3);
    CHECK(std::abs(std::norm(models::kernel(h, ChartPoint::main(a), ChartPoint::main(c))) - ref) <
          1e-14);
    CHECK_THROWS_AS(ModelSpace::half_plane(1), ConfigError);
    CHECK_THROWS_AS(ModelSpace::half_plane(0), ConfigError);
    CHECK_THROWS(models::kernel(h, ChartPoint::main({0.0, -1.0}), ChartPoint::main(a)));
    CHECK_THROWS_AS(ModelSpace::sphere(0), ConfigError);
  }

  TEST_CASE("quartic leaf reduction") {
    CHECK(std::abs(models::leaf_reduce_quartic(ChartPoint::main(1.0), ChartPoint::main(2.0)).lambda -
                   0.5) < 1e-15);
    CHECK(models::leaf_reduce_quartic(ChartPoint::main(0.4), ChartPoint::main(0.4)).lambda == 0.0);
    const cplx x{0.6, -0.8}, y{1.3, 0.5};
    const auto a = models::leaf_reduce_quartic(ChartPoint::main(x), ChartPoint::main(y));
    CHECK(std::abs(a.jacobian_density - 1.0 / std::pow(std::abs(y), 4)) < 1e-12);
    CHECK(std::abs(models::quartic_target(x, a.lambda) - y) < 1e-13);
    CHECK_THROWS(models::kernel(ModelSpace::quartic_leaf(1.0), ChartPoint::main(0.0),
                                ChartPoint::main(y)));
  }

  TEST_CASE("isometries") {
    const auto s = ModelSpace::sphere(2);
    const auto g = models::su2_rotation({0, 0, 1}, kPi / 2);
    const auto x = models::isometry_act(s, g, ChartPoint::main(1.0));
    const auto u = models::to_unit_vector(x);
    CHECK(std::abs(u[0]) < 1e-15);
    CHECK(std::abs(std::abs(u[1]) - 1.0) < 1e-15);
    const auto h = ModelSpace::half_plane(2);
    CHECK_THROWS_AS(models::isometry_act(h, models::Mobius{2, 0, 0, 1}, ChartPoint::main({0, 1})),
                    ConfigError);
  }
}
