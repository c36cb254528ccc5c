#pragma once

// Time-sliced products of propagator values along paths, the connection
// holonomy they converge to, and finite-partition cylinder integrals.

#include <functional>
#include <string>
#include <vector>

#include "csq/models.hpp"
#include "csq/numerics.hpp"
#include "csq/quantize.hpp"

namespace csq::pathint {

using models::ChartPoint;
using models::ModelSpace;

struct PathSpec {
  std::function<ChartPoint(double)> at;  // t in [0, 1]; closed paths are 1-periodic
  bool closed = false;
  std::string descriptor;
  double scale = 1.0;  // typical chart size, sets the finite-difference step

  ChartPoint operator()(double t) const;
  static PathSpec constant(const ChartPoint& x);
  /// |z - center| = radius traversed once counterclockwise in the main chart.
  static PathSpec circle(cplx center, double radius);
  /// Sphere latitude |z| = r.
  static PathSpec latitude(double r) { return circle({0.0, 0.0}, r); }
  /// Out along a straight segment and back: closed with zero enclosed area.
  static PathSpec back_and_forth(cplx from, cplx to);
  PathSpec reversed() const;
};

struct SlicedTransport {
  std::vector<double> times;
  cplx product{1.0, 0.0};
  double modulus_deficiency = 0.0;  // 1 - |product|
};

/// Ordered product of unitary-frame kernel values K(gamma(t_k), gamma(t_{k+1})).
SlicedTransport sliced_product(const ModelSpace& m, const PathSpec& path,
                               const numerics::Partition& partition);
SlicedTransport sliced_product(const ModelSpace& m, const PathSpec& path,
                               const std::vector<double>& times);

/// exp of the integral of A(t) = d/ds log K(gamma(t), gamma(t+s)) at s = 0,
/// with a 4th-order central difference (step 1e-4 * path.scale) and
/// `steps` panels of 8-point Gauss-Legendre in t.
cplx connection_holonomy_oracle(const ModelSpace& m, const PathSpec& path, int steps = 64);

struct HolonomyRow {
  std::size_t intervals = 0;
  double phase_error = 0.0;   // |arg(sliced / oracle)|
  double modulus_deficiency = 0.0;
  double order = 0.0;         // empirical order against the previous row; 0 for the first
};

std::vector<HolonomyRow> holonomy_convergence(const ModelSpace& m, const PathSpec& path,
                                              const std::vector<std::size_t>& levels,
                                              int oracle_steps = 64);
/// Least-squares slope of -log(phase error) against log(intervals).
double empirical_order(const std::vector<HolonomyRow>& rows);

/// Function insertions at interior times in (0, 1).
struct Insertion {
  double time = 0.5;
  quantize::ChartFunction f;
};

/// Fixed tensor rule on the sphere: Gauss-Legendre in cos(theta), uniform in phi.
struct SphereCubature {
  std::vector<ChartPoint> nodes;
  std::vector<double> weights;  // against calibrated d(mu)
};
SphereCubature sphere_cubature(const ModelSpace& m, int theta_points, int phi_points);

struct CylinderResult {
  cplx matrix_kernel;               // <v_y, Q_{f_m} ... Q_{f_1} v_x>
  std::vector<cplx> iterated;       // one per partition
  double discrepancy = 0.0;         // max pairwise |difference| among all values
};

/// Cylinder integral of the insertions evaluated by matrix products of Q_f and
/// by iterated quadrature over every interior point of each partition (points
/// without an insertion carry the constant 1). Each partition must contain
/// every insertion time.
CylinderResult cylinder_consistency(const ModelSpace& m, const ChartPoint& x,
                                    const ChartPoint& y, const std::vector<Insertion>& fs,
                                    const std::vector<numerics::Partition>& partitions,
                                    const quantize::QuantSettings& s = {});

}  // namespace csq::pathint
