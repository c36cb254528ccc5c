#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "csq/error.hpp"
#include "csq/quantize.hpp"
#include "oracles.hpp"

using namespace csq;
using models::ChartPoint;
using models::ModelSpace;
using quantize::Matrix;

namespace {

std::vector<double> sorted_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  std::sort(v.begin(), v.end());
  return v;
}

quantize::ChartFunction one = [](const ChartPoint&) { return cplx{1.0, 0.0}; };

}  // namespace

TEST_SUITE("quantize") {
  TEST_CASE("coherent vectors reproduce the kernel") {
    const int n = 4;
    const auto m = ModelSpace::sphere(n);
    const ChartPoint x = ChartPoint::main({0.4, -0.7}), y = ChartPoint::secondary({0.2, 0.1});
    const auto vx = quantize::coherent_vector(n, x), vy = quantize::coherent_vector(n, y);
    CHECK(std::abs(vx.norm() - 1.0) < 1e-15);
    CHECK(std::abs(vx.dot(vy) - models::kernel(m, y, x)) < 1e-15);
  }

  TEST_CASE("toeplitz spectrum of x3") {
    // Q_{x3} is 2/(n+2) times the J3 generator: eigenvalues (2k - n)/(n + 2).
    for (int n : {1, 2, 5}) {
      const auto m = ModelSpace::sphere(n);
      const auto q = quantize::build_Q(m, quantize::coordinate(3), "x3");
      CHECK(q.is_hermitian(1e-12));
      const auto ev = sorted_eigenvalues(q.entries);
      for (int k = 0; k <= n; ++k) CHECK(std::abs(ev[k] - (2.0 * k - n) / (n + 2.0)) < 1e-10);
    }
  }

  TEST_CASE("toeplitz of 1 is the identity") {
    const auto m = ModelSpace::sphere(3);
    const auto q = quantize::build_Q(m, one, "1");
    CHECK(quantize::max_abs(q.entries - Matrix::Identity(4, 4)) < 1e-10);
    const auto r = quantize::resolution_of_identity(m);
    CHECK(r.residual < 1e-10);
    CHECK(std::abs(r.volume - 4.0) < 1e-10);
  }

  TEST_CASE("berezin transform of harmonics") {
    const int n = 6;
    const auto m = ModelSpace::sphere(n);
    const auto f = [](const ChartPoint& x) {
      const auto u = models::to_unit_vector(x);
      return cplx{u[0] * u[0] - 1.0 / 3.0, 0.0};
    };
    const auto rho = quantize::covariant_symbol(quantize::build_Q(m, f, "x1^2 - 1/3"));
    const auto rho3 = quantize::covariant_symbol(quantize::build_Q(m, quantize::coordinate(3), "x3"));
    for (cplx z : {cplx{0.3, 0.1}, cplx{-1.2, 0.8}}) {
      const auto u = oracle::unit_from_z(z);
      const auto x = ChartPoint::main(z);
      CHECK(std::abs(rho(x).real() - oracle::berezin_eigenvalue(n, 2) * (u[0] * u[0] - 1.0 / 3.0)) <
            1e-10);
      CHECK(std::abs(rho3(x).real() - oracle::berezin_eigenvalue(n, 1) * u[2]) < 1e-10);
    }
  }

  TEST_CASE("symbol pairing is the adjoint of Q") {
    const auto m = ModelSpace::sphere(2);
    Matrix a(3, 3);
    a << 1.0, cplx{0, 2}, 0.5, 0.0, -1.0, 3.0, cplx{1, 1}, 0.0, 2.0;
    const auto A = quantize::QuantOperator::external(a, "A");
    const auto f = quantize::coordinate(1);
    const auto q = quantize::build_Q(m, f, "x1");
    CHECK(std::abs(quantize::symbol_pairing(m, A, f) - quantize::hs_inner(a, q.entries)) < 1e-10);
  }

  TEST_CASE("coherent projections") {
    const auto m = ModelSpace::sphere(3);
    const auto q = quantize::coherent_projection(m, ChartPoint::main({0.5, 0.5}));
    CHECK(quantize::max_abs(q.entries * q.entries - q.entries) < 1e-15);
    CHECK(std::abs(q.entries.trace() - 1.0) < 1e-15);
    CHECK(q.tag == quantize::OperatorTag::coherent_projection);
    const auto v = quantize::range_vector(q);
    CHECK(std::abs(v.norm() - 1.0) < 1e-15);
  }

  TEST_CASE("spin matrices") {
    for (int j2 : {1, 2, 3, 4}) {
      const auto s = quantize::spin_matrices(j2);
      const cplx i{0, 1};
      CHECK(quantize::max_abs(s.jx * s.jy - s.jy * s.jx - i * s.jz) < 1e-14);
      const double j = 0.5 * j2;
      const Matrix c = s.jx * s.jx + s.jy * s.jy + s.jz * s.jz;
      CHECK(quantize::max_abs(c - j * (j + 1) * Matrix::Identity(j2 + 1, j2 + 1)) < 1e-13);
    }
  }

  TEST_CASE("positivity of toeplitz operators") {
    const auto m = ModelSpace::sphere(4);
    const auto q = quantize::build_Q(m, [](const ChartPoint& x) {
      const double v = models::to_unit_vector(x)[0];
      return cplx{v * v, 0.0};
    }, "x1^2");
    CHECK(quantize::min_eigenvalue(q) > 0.0);
  }

  TEST_CASE("non-finite symbols are rejected") {
    const auto m = ModelSpace::sphere(1);
    CHECK_THROWS_AS(quantize::build_Q(m, [](const ChartPoint&) { return cplx{NAN, 0.0}; }, "nan"),
                    DomainError);
  }
}
