#pragma once

// Numerical verification of the propagator conditions: unit diagonal,
// off-diagonal contraction, conjugate symmetry, idempotence and the L1 bound,
// plus isometry invariance and the constant-1 twisted convolution.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csq/error.hpp"
#include "csq/models.hpp"

namespace csq::axioms {

using models::ChartPoint;
using models::ModelSpace;

/// Calibration spread above the accepted limit.
class CalibrationRejected : public Error {
 public:
  CalibrationRejected(const std::string& what, double spread) : Error(what), spread_(spread) {}
  double spread() const noexcept { return spread_; }

 private:
  double spread_;
};

struct QuadratureSettings {
  double abs_tol = 1e-11;
  double tail_target = 1e-13;
  unsigned threads = 0;
  int max_depth = 14;
};

struct ResidualSet {
  std::vector<double> values;
  double sup = 0.0;
  double mean = 0.0;
  double max_quadrature_error = 0.0;
  double max_tail_bound = 0.0;

  void add(double v);
  void finish();
};

/// |K(x, .)|^2 integrated against the current measure.
models::ModelIntegral<cplx> probability_mass(const ModelSpace& m, const ChartPoint& x,
                                             const QuadratureSettings& q = {});

struct Calibration {
  ModelSpace model;      // calibration applied
  double constant = 1.0; // absolute calibration of the returned model
  double factor = 1.0;   // 1 / mean(I) relative to the input measure
  double spread = 0.0;   // (max I - min I) / mean I
  ResidualSet integrals; // I(x) per sample
};

inline constexpr double kMaxCalibrationSpread = 1e-4;

Calibration calibrate_measure(const ModelSpace& m, const std::vector<ChartPoint>& samples,
                              const QuadratureSettings& q = {});

/// |(K * K)(x, y) - K(x, y)| per pair.
ResidualSet check_idempotent(const ModelSpace& m,
                             const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
                             const QuadratureSettings& q = {});

/// |(K * K * K)(x, y) - K(x, y)| by nested convolution.
ResidualSet check_idempotent_twice(const ModelSpace& m,
                                   const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
                                   const QuadratureSettings& q = {});

struct PointwiseReport {
  ResidualSet diagonal;       // |K(x,x) - 1|, |weighted modulus(x,x) - 1|
  ResidualSet contraction;    // weighted |K(x,y)| for x != y (must stay < 1)
  ResidualSet hermiticity;    // |value(x,y) h(y) - conj(value(y,x)) h(x)| and unitary form
  ResidualSet l1_bound;       // int |K(x, y)| dmu(y) per sample
  bool l1_finite = true;
  std::string l1_note;
};

PointwiseReport check_pointwise_axioms(const ModelSpace& m, const std::vector<ChartPoint>& samples,
                                       const QuadratureSettings& q = {}, bool with_l1 = true);

struct InvarianceResidual {
  ResidualSet normalized_delta;  // |[Delta](gx,gy,gz) - [Delta](x,y,z)|
  ResidualSet modulus_squared;   // ||K(gx,gy)|^2 - |K(x,y)|^2|
};

InvarianceResidual check_isometry_invariance(
    const ModelSpace& m, const models::Isometry& g,
    const std::vector<std::array<ChartPoint, 3>>& triples);

struct TrivializationResidual {
  ResidualSet residuals;
  std::vector<std::size_t> skipped;  // pairs with vanishing K(x, y)
};

/// |int Delta(x, w, y) / |K(x,y)|^2 dmu(w) - 1| per pair.
TrivializationResidual check_cocycle_trivialization(
    const ModelSpace& m, const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
    const QuadratureSettings& q = {}, double min_modulus = 1e-3);

// Sample sets.

struct SampleSet {
  std::string descriptor;
  std::vector<ChartPoint> points;
  std::vector<std::pair<ChartPoint, ChartPoint>> pairs;
  std::vector<std::array<ChartPoint, 3>> triples;
};

/// Halton points over a model-specific region, the chart origin, and
/// near-diagonal pairs at distances 1e-2 and 1e-1.
SampleSet make_samples(const ModelSpace& m, std::size_t count, std::uint64_t seed = 0);

/// Five fixed group elements per model (empty where no isometry action exists).
std::vector<models::Isometry> sample_isometries(const ModelSpace& m);

// Full suite.

struct AxiomCheck {
  std::string name;
  bool pass = false;
  double tolerance = 0.0;
  ResidualSet residuals;
  std::string note;
};

struct AxiomReport {
  std::string model;
  std::string samples;
  double calibration = 1.0;
  double calibration_spread = 0.0;
  std::vector<AxiomCheck> checks;
  bool pass = false;
};

struct SuiteOptions {
  std::size_t samples = 12;
  std::uint64_t seed = 0;
  double pointwise_tol = 1e-10;
  /// <= 0 selects the model default: 1e-8 for the sphere, 1e-6 otherwise.
  double quadrature_tol = 0.0;
  QuadratureSettings quadrature;
  bool with_isometries = true;
};

double default_quadrature_tol(const ModelSpace& m);

AxiomReport run_axiom_suite(const ModelSpace& m, const SuiteOptions& opt = {});

}  // namespace csq::axioms
