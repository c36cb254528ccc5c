#include <doctest.h>

#include <cmath>

#include "csq/axioms.hpp"
#include "csq/chern.hpp"
#include "csq/error.hpp"
#include "csq/pathint.hpp"
#include "oracles.hpp"

using namespace csq;
using models::ChartPoint;
using models::ModelSpace;

TEST_SUITE("axioms") {
  TEST_CASE("plane calibration is 2") {
    const auto m = ModelSpace::plane(0.7);
    const auto s = axioms::make_samples(m, 6);
    const auto c = axioms::calibrate_measure(m, s.points);
    // int exp(-|w|^2 / hbar) dA / (2 pi hbar) = 1/2
    CHECK(std::abs(c.constant - 2.0) < 1e-9);
    CHECK(c.spread < 1e-9);
  }

  TEST_CASE("half-plane calibration against direct quadrature") {
    for (int k : {3, 4, 6}) {
      const auto m = ModelSpace::half_plane(k);
      const auto s = axioms::make_samples(m, 6);
      const auto c = axioms::calibrate_measure(m, s.points);
      CHECK(std::abs(c.constant * oracle::half_plane_mass(k) - 1.0) < 1e-7);
    }
  }

  TEST_CASE("sphere calibration is 1") {
    for (int n : {1, 4}) {
      const auto m = ModelSpace::sphere(n);
      const auto c = axioms::calibrate_measure(m, axioms::make_samples(m, 5).points);
      const double mass = (n + 1.0) / (4.0 * kPi) *
                          oracle::sphere_integral([&](const oracle::Vec3& y) {
                            return oracle::sphere_modulus_sq(n, {0.0, 0.6, 0.8}, y);
                          });
      CHECK(std::abs(mass - 1.0) < 1e-12);
      CHECK(std::abs(c.constant - 1.0) < 1e-9);
    }
  }

  TEST_CASE("samples are deterministic") {
    const auto m = ModelSpace::sphere(2);
    const auto a = axioms::make_samples(m, 8, 3), b = axioms::make_samples(m, 8, 3);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);
    CHECK(a.pairs.size() >= 8);
    CHECK(a.triples.size() >= 20);
  }

  TEST_CASE("full suite on the plane") {
    const auto r = axioms::run_axiom_suite(ModelSpace::plane(1.0));
    CHECK(r.pass);
    CHECK(std::abs(r.calibration - 2.0) < 1e-8);
  }
}

TEST_SUITE("chern") {
  TEST_CASE("degree equals level") {
    for (int n : {1, 2, 4}) {
      const auto m = ModelSpace::sphere(n);
      const auto mesh = numerics::icosphere(2);
      const auto r = chern::chern_number(m, mesh);
      CHECK(r.chern == n);
      CHECK(r.residual < 1e-9);
      CHECK(chern::chern_number(m, mesh.reversed()).chern == -n);
    }
  }

  TEST_CASE("coarse meshes are refused") {
    CHECK_THROWS_AS(chern::chern_number(ModelSpace::sphere(40), numerics::icosphere(0)), DomainError);
    const auto [r, level] =
        chern::chern_number_refined(ModelSpace::sphere(40), 0, numerics::Winding::inward);
    CHECK(r.chern == 40);
    CHECK(level > 0);
  }

  TEST_CASE("three-point function is a unit cocycle") {
    const auto m = ModelSpace::sphere(3);
    const ChartPoint a = ChartPoint::main({0.1, 0.2}), b = ChartPoint::main({0.5, -0.3}),
                     c = ChartPoint::main({-0.4, 0.6}), d = ChartPoint::secondary({0.2, 0.2});
    CHECK(std::abs(chern::cocycle_defect(m, {a, b, c, d}) - 1.0) < 1e-13);
    CHECK(std::abs(chern::delta(m, a, b, c) * chern::delta(m, a, c, b) -
                   std::norm(chern::delta(m, a, b, c))) < 1e-14);
  }
}

TEST_SUITE("pathint") {
  TEST_CASE("latitude holonomy") {
    for (int n : {1, 2, 3}) {
      const auto m = ModelSpace::sphere(n);
      for (double r : {0.4, 0.7, 1.3}) {
        const cplx h = pathint::connection_holonomy_oracle(m, pathint::PathSpec::latitude(r));
        CHECK(std::abs(h - std::polar(1.0, oracle::latitude_phase(n, r))) < 1e-9);
      }
    }
  }

  TEST_CASE("plane circle holonomy") {
    const double hbar = 0.8, r = 0.6;
    const auto m = ModelSpace::plane(hbar);
    const cplx h = pathint::connection_holonomy_oracle(m, pathint::PathSpec::circle({0.3, -0.2}, r));
    CHECK(std::abs(h - std::polar(1.0, -2.0 * kPi * r * r / hbar)) < 1e-9);
  }

  TEST_CASE("sliced products") {
    const auto m = ModelSpace::sphere(2);
    const auto path = pathint::PathSpec::latitude(0.7);
    const auto s = pathint::sliced_product(m, path, numerics::Partition::uniform(64));
    const auto r = pathint::sliced_product(m, path.reversed(), numerics::Partition::uniform(64));
    CHECK(std::abs(r.product - std::conj(s.product)) < 1e-14);
    CHECK(s.modulus_deficiency > 0.0);
    const auto back = pathint::sliced_product(
        m, pathint::PathSpec::back_and_forth({0.1, 0.0}, {0.5, 0.4}), numerics::Partition::uniform(32));
    CHECK(std::abs(std::arg(back.product)) < 1e-12);
    const auto rows = pathint::holonomy_convergence(m, path, {16, 32, 64, 128});
    CHECK(pathint::empirical_order(rows) == doctest::Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("cylinder functions") {
    const auto m = ModelSpace::sphere(2);
    const ChartPoint x = ChartPoint::main({0.2, 0.1}), y = ChartPoint::main({-0.3, 0.5});
    const auto r = pathint::cylinder_consistency(
        m, x, y, {{0.5, quantize::coordinate(3)}},
        {numerics::Partition::uniform(2), numerics::Partition::uniform(6)});
    CHECK(r.discrepancy < 1e-10);
    // <v_y, Q v_x> with no insertions is K(x, y)
    const auto e = pathint::cylinder_consistency(m, x, y, {}, {numerics::Partition::uniform(3)});
    CHECK(std::abs(e.matrix_kernel - models::kernel(m, x, y)) < 1e-15);
    CHECK(e.discrepancy < 1e-12);
    CHECK_THROWS_AS(pathint::cylinder_consistency(m, x, y, {{0.3, quantize::coordinate(1)}},
                                                  {numerics::Partition::uniform(2)}),
                    ConfigError);
  }
}
