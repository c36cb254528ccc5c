#pragma once

// Catalog of quantizable model spaces: charts, measures, metric weights,
// closed-form propagators and isometry actions.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "csq/numerics.hpp"

namespace csq::models {

enum class ChartId { main, secondary };

/// A point in one of a model's charts. Only the sphere uses the secondary
/// chart, with coordinate u = 1/z around the pole z = infinity.
struct ChartPoint {
  cplx z{0.0, 0.0};
  ChartId chart = ChartId::main;

  static ChartPoint main(cplx z) { return {z, ChartId::main}; }
  static ChartPoint secondary(cplx u) { return {u, ChartId::secondary}; }
};

bool operator==(const ChartPoint& a, const ChartPoint& b);

struct SphereLevel {
  int n = 1;
};
struct Plane {
  double hbar = 1.0;
};
struct HalfPlane {
  int k = 2;  // k = 2 / hbar
  double hbar() const { return 2.0 / k; }
};

/// Truncated Bergman series of the Podles sphere: S(w) = sum_{m<=N} c_m w^m.
struct PodlesSeries {
  double hbar = 1.0;
  std::vector<double> log_c;  // log c_0 .. log c_N
  double test_radius = 2.0;   // truncation is certified for |x|, |y| <= test_radius
  double truncation_bound = 0.0;  // relative mass of the omitted terms at test_radius

  int terms() const { return static_cast<int>(log_c.size()); }
  /// log S(t) for real t >= 0 (log-sum-exp over the terms).
  double log_sum(double t) const;
  /// S(w) scaled: returns (log scale, S(w) * exp(-log scale)).
  std::pair<double, cplx> scaled_sum(cplx w) const;
};

struct PodlesOptions {
  int terms = -1;  // < 0: choose adaptively
  double test_radius = 2.0;
  double rel_cutoff = 1e-13;
  int max_terms = 400;
};

struct Podles {
  double hbar = 1.0;
  std::shared_ptr<const PodlesSeries> series;
};

struct QuarticLeaf {
  double hbar = 1.0;
};

enum class ModelKind { sphere, plane, half_plane, podles, quartic_leaf };
std::string_view to_string(ModelKind kind);

class ModelSpace {
 public:
  using Params = std::variant<SphereLevel, Plane, HalfPlane, Podles, QuarticLeaf>;

  static ModelSpace sphere(int n);
  static ModelSpace plane(double hbar);
  /// k = 2/hbar. k = 1 is rejected: |Omega(x, .)|^2 is then not integrable
  /// against the hyperbolic area, so no calibration exists.
  static ModelSpace half_plane(int k);
  static ModelSpace podles(double hbar, const PodlesOptions& options = {});
  static ModelSpace quartic_leaf(double hbar);

  ModelKind kind() const;
  const Params& params() const { return params_; }
  double calibration() const { return calibration_; }
  /// Calibration is applied by value; the original is left untouched.
  ModelSpace with_calibration(double c) const;

  int level() const;  // sphere only
  double hbar() const;
  std::string describe() const;

 private:
  explicit ModelSpace(Params p) : params_(std::move(p)) {}
  Params params_;
  double calibration_ = 1.0;
};

struct PropagatorSample {
  cplx value;      // in the model's holomorphic trivialization
  cplx unitary;    // in the unitary frame: Hermitian, unit diagonal
  double weighted_modulus = 0.0;
};

bool in_chart(const ModelSpace& m, const ChartPoint& x);
void validate(const ModelSpace& m, const ChartPoint& x);

PropagatorSample eval_propagator(const ModelSpace& m, const ChartPoint& x,
                                 const ChartPoint& y);
/// Unitary-frame kernel K(x, y) alone; this is what every integral uses.
cplx kernel(const ModelSpace& m, const ChartPoint& x, const ChartPoint& y);
/// Squared norm of the trivializing frame at x.
double metric_weight(const ModelSpace& m, const ChartPoint& x);
/// Density of calibration * d(mu) against Lebesgue area in the chart.
double measure_density(const ModelSpace& m, const ChartPoint& x);

struct LeafArrow {
  cplx lambda;
  double jacobian_density = 0.0;
};
/// Cotangent coordinate of the arrow from x to y on the quartic leaf.
LeafArrow leaf_reduce_quartic(const ChartPoint& x, const ChartPoint& y);
/// Groupoid form Omega(z, lambda) including its 1/(2 pi hbar) density factor.
cplx quartic_groupoid_propagator(double hbar, cplx z, cplx lambda);
cplx quartic_target(cplx z, cplx lambda);

/// Real dilogarithm Li2(x) for x <= 1.
double dilog(double x);
/// c_m = (2 pi int_0^inf t^m (1+t)^{-1/2} exp(Li2(-t)/hbar) dt)^{-1}, m = 0..N.
std::vector<double> podles_coefficients(double hbar, int N);
std::vector<double> podles_log_coefficients(double hbar, int N);
PodlesSeries build_podles_series(double hbar, const PodlesOptions& options);

// Isometries.
struct PlaneMotion {
  double angle = 0.0;
  cplx translation{0.0, 0.0};
};
struct Mobius {  // real, det 1: z -> (a z + b) / (c z + d)
  double a = 1, b = 0, c = 0, d = 1;
};
struct SU2 {  // z -> (alpha z + beta) / (-conj(beta) z + conj(alpha))
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};
};
using Isometry = std::variant<PlaneMotion, Mobius, SU2>;

ChartPoint isometry_act(const ModelSpace& m, const Isometry& g, const ChartPoint& x);
/// Acting by `first` and then by `second` equals acting by compose(second, first).
Isometry compose(const Isometry& second, const Isometry& first);
Isometry identity_isometry(ModelKind kind);
/// Rotation of the sphere by `angle` about the unit axis.
SU2 su2_rotation(const numerics::Vec3& axis, double angle);

// Sphere embedding x1 + i x2 = 2z / (1+|z|^2), x3 = (|z|^2 - 1)/(|z|^2 + 1).
numerics::Vec3 to_unit_vector(const ChartPoint& x);
ChartPoint from_unit_vector(const numerics::Vec3& p);
/// Unit spinor of a sphere point in its chart's frame: (1, z)/|.| or (u, 1)/|.|.
std::array<cplx, 2> spinor(const ChartPoint& x);

// Integration over a model.

struct IntegrationRequest {
  /// Points the integrand is localized around (the kernel arguments). Needed
  /// for truncated charts (Plane, QuarticLeaf, Podles).
  std::vector<ChartPoint> anchors;
  double abs_tol = 1e-11;
  double tail_target = 1e-13;
  /// Bound on |integrand| / (|K(a, z)| |K(z, b)|)^(kernel_power / 2) for
  /// the anchors a, b.
  double integrand_bound = 1.0;
  double kernel_power = 2.0;
  unsigned threads = 0;
  std::uint64_t shuffle_seed = 0;
  int max_depth = 14;
};

template <class T>
struct ModelIntegral {
  T value;
  double error = 0.0;
  double tail_bound = 0.0;
  std::size_t cells = 0;
};

/// Parameter rectangle plus the map (u, v) -> (point, measure weight). The
/// weight folds in calibration, measure density and the Jacobian.
struct IntegrationPatch {
  numerics::Rect rect;
  std::function<std::pair<ChartPoint, double>(double, double)> map;
  double tail_bound = 0.0;
};

IntegrationPatch integration_patch(const ModelSpace& m, const IntegrationRequest& req);

template <class T, class F, class Norm>
ModelIntegral<T> integrate_over(const ModelSpace& m, F&& integrand,
                                const IntegrationRequest& req, const T& zero, Norm&& norm) {
  const IntegrationPatch patch = integration_patch(m, req);
  auto g = [&](double u, double v) -> T {
    const auto [pt, w] = patch.map(u, v);
    if (w == 0.0) return zero;
    T out = integrand(pt);
    out *= w;
    return out;
  };
  numerics::AdaptiveOptions opt;
  opt.abs_tol = req.abs_tol;
  opt.threads = req.threads;
  opt.shuffle_seed = req.shuffle_seed;
  opt.max_depth = req.max_depth;
  const auto est =
      numerics::integrate_rect(g, patch.rect, numerics::default_rule(), opt, zero, norm);
  return {est.value, est.error, patch.tail_bound, est.cells};
}

template <class F>
ModelIntegral<cplx> integrate_scalar(const ModelSpace& m, F&& integrand,
                                     const IntegrationRequest& req) {
  return integrate_over(m, std::forward<F>(integrand), req, cplx{0.0, 0.0},
                        [](const cplx& z) { return std::abs(z); });
}

}  // namespace csq::models
