#pragma once

// 3-point function, van Est curvature, mesh Chern numbers and 1-D Riemann sums.

#include <functional>
#include <optional>
#include <vector>

#include "csq/models.hpp"
#include "csq/numerics.hpp"

namespace csq::chern {

using models::ChartPoint;
using models::ModelSpace;

struct ThreePointSample {
  ChartPoint x, y, z;
  cplx delta;       // K(x,y) K(y,z) K(z,x)
  cplx normalized;  // delta / delta(x, x, z)
  std::optional<cplx> log_value;
};

/// Pairwise weighted modulus below which log[Delta] is refused.
inline constexpr double kLogModulusFloor = 0.1;

cplx delta(const ModelSpace& m, const ChartPoint& x, const ChartPoint& y, const ChartPoint& z);
/// Computes the log only when every pairwise weighted |K| exceeds
/// kLogModulusFloor; with want_log set, anything else throws DomainError.
ThreePointSample three_point(const ModelSpace& m, const ChartPoint& x, const ChartPoint& y,
                             const ChartPoint& z, bool want_log = true);

/// F(u, v) = D(u, v) - D(v, u) with D the mixed second difference of
/// (s, t) -> log[Delta](x, x + s u, x + t v). Directions are chart vectors.
cplx vanest_curvature(const ModelSpace& m, const ChartPoint& x, numerics::Point2 u,
                      numerics::Point2 v, double h);

struct ChernResult {
  long chern = 0;
  double raw = 0.0;       // (1/2pi) sum of face phases
  double residual = 0.0;  // |raw - chern|
  double max_face_phase = 0.0;
  std::size_t faces = 0;
};

/// Throws DomainError("mesh too coarse ...") when a face phase reaches pi - 0.1.
ChernResult chern_number(const ModelSpace& m, const numerics::TriangleMesh& mesh,
                         unsigned threads = 0);

/// Refines the icosphere from `start_level` until every face phase is below
/// pi/2, then returns the result together with the level used.
std::pair<ChernResult, int> chern_number_refined(const ModelSpace& m, int start_level,
                                                 numerics::Winding winding,
                                                 int max_level = 7, unsigned threads = 0);

struct RiemannSum {
  double sum = 0.0;
  double reference = 0.0;  // int_a^b f
  double error = 0.0;      // |sum - reference|
};

/// Sum of F(x_i, x_{i+1}) over the partition mapped affinely onto [a, b].
RiemannSum riemann_sum_1d(const std::function<double(double, double)>& F,
                          const std::function<double(double)>& f,
                          const numerics::Partition& partition, double a, double b);

/// Alternating product of [Delta] over the four faces of (x0, x1, x2, x3).
cplx cocycle_defect(const ModelSpace& m, const std::array<ChartPoint, 4>& q);

}  // namespace csq::chern
