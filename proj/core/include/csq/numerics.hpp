#pragma once

// Chart-level quadrature, truncation, finite differences and meshes.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <tuple>
#include <vector>

#include "csq/error.hpp"
#include "csq/parallel.hpp"

namespace csq {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

namespace numerics {

struct Point2 {
  double u = 0.0;
  double v = 0.0;
};

struct GaussLegendre1D {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // sum to 2
};

/// Nodes and weights by Newton iteration on P_n; exact for degree 2n-1.
GaussLegendre1D gauss_legendre(int points);

/// Tensor-product rule on the reference square [-1,1]^2.
struct QuadratureRule {
  std::vector<Point2> nodes;
  std::vector<double> weights;
  int order = 0;  // polynomial exactness degree per axis

  static constexpr double reference_area() { return 4.0; }
  std::size_t size() const { return nodes.size(); }
};

QuadratureRule tensor_gauss_legendre(int points_per_axis);

/// Default base rule: 8-point Gauss-Legendre per axis.
const QuadratureRule& default_rule();

struct Rect {
  double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
  double area() const { return (u1 - u0) * (v1 - v0); }
};

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  int initial_grid = 4;  // initial_grid x initial_grid cells
  int max_depth = 14;
  std::size_t max_cells = std::size_t{1} << 20;
  unsigned threads = 0;  // 0 -> csq::default_threads()
  // Nonzero: shuffle the order in which active cells are evaluated. The
  // result must not depend on it.
  std::uint64_t shuffle_seed = 0;
};

template <class T>
struct Estimate {
  T value;
  double error = 0.0;
  std::size_t cells = 0;
  int depth = 0;
};

namespace detail {

struct CellKey {
  int depth;
  std::int64_t iu;
  std::int64_t iv;
  friend bool operator<(const CellKey& a, const CellKey& b) {
    return std::tie(a.depth, a.iu, a.iv) < std::tie(b.depth, b.iu, b.iv);
  }
};

template <class T, class F>
T apply_rule(F& f, const QuadratureRule& rule, double u0, double u1, double v0,
             double v1, const T& zero) {
  const double hu = 0.5 * (u1 - u0), hv = 0.5 * (v1 - v0);
  const double cu = 0.5 * (u0 + u1), cv = 0.5 * (v0 + v1);
  T acc = zero;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto& p = rule.nodes[i];
    acc += (rule.weights[i] * hu * hv) * f(cu + hu * p.u, cv + hv * p.v);
  }
  return acc;
}

}  // namespace detail

/// Adaptive quad-tree integration of f(u, v) over a rectangle.
///
/// Each active cell is compared against the sum of its four children; a cell
/// is accepted once that two-level difference is below its area share of
/// abs_tol, otherwise the children become active. Accepted contributions are
/// summed in sorted (depth, iu, iv) order, so the result is bit-identical
/// for any thread count or evaluation order. Throws QuadratureFailure when
/// the depth or cell budget runs out while the summed error estimate is
/// still above abs_tol.
template <class T, class F, class Norm>
Estimate<T> integrate_rect(F&& f, const Rect& rect, const QuadratureRule& rule,
                           const AdaptiveOptions& opt, const T& zero,
                           Norm&& norm) {
  struct Active {
    detail::CellKey key;
    T coarse;
  };
  struct Done {
    detail::CellKey key;
    T value;
    double error;
  };
  const int g0 = std::max(1, opt.initial_grid);
  const double total_area = rect.area();
  const unsigned threads = resolve_threads(opt.threads);
  auto cell_rect = [&](const detail::CellKey& k) {
    const double cells = static_cast<double>(g0) * std::ldexp(1.0, k.depth);
    const double du = (rect.u1 - rect.u0) / cells;
    const double dv = (rect.v1 - rect.v0) / cells;
    return Rect{rect.u0 + du * static_cast<double>(k.iu),
                rect.u0 + du * static_cast<double>(k.iu + 1),
                rect.v0 + dv * static_cast<double>(k.iv),
                rect.v0 + dv * static_cast<double>(k.iv + 1)};
  };
  auto eval_cell = [&](const detail::CellKey& k) {
    const Rect r = cell_rect(k);
    return detail::apply_rule(f, rule, r.u0, r.u1, r.v0, r.v1, zero);
  };

  std::vector<Active> active;
  {
    std::vector<detail::CellKey> keys;
    for (int i = 0; i < g0; ++i)
      for (int j = 0; j < g0; ++j) keys.push_back({0, i, j});
    std::vector<T> vals(keys.size(), zero);
    parallel_for(keys.size(), threads, [&](std::size_t i) { vals[i] = eval_cell(keys[i]); });
    for (std::size_t i = 0; i < keys.size(); ++i) active.push_back({keys[i], vals[i]});
  }

  std::vector<Done> done;
  std::mt19937_64 shuffler(opt.shuffle_seed);
  std::size_t cells_used = active.size();
  int depth = 0;
  double pending_error = 0.0;
  double residual_error = 0.0;
  while (!active.empty()) {
    if (opt.shuffle_seed != 0) std::shuffle(active.begin(), active.end(), shuffler);
    std::vector<std::array<T, 4>> kids(active.size(), {zero, zero, zero, zero});
    parallel_for(active.size(), threads, [&](std::size_t i) {
      const auto& k = active[i].key;
      for (int c = 0; c < 4; ++c) {
        const detail::CellKey ck{k.depth + 1, 2 * k.iu + (c & 1), 2 * k.iv + (c >> 1)};
        kids[i][static_cast<std::size_t>(c)] = eval_cell(ck);
      }
    });
    std::vector<Active> next;
    pending_error = 0.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const auto& cell = active[i];
      T fine = kids[i][0];
      fine += kids[i][1];
      fine += kids[i][2];
      fine += kids[i][3];
      T diff = fine;
      diff -= cell.coarse;
      const double err = norm(diff);
      const double share = cell_rect(cell.key).area() / total_area;
      const double floor = 64.0 * 2.220446049250313e-16 * norm(fine);
      if (err <= opt.abs_tol * share || err <= floor) {
        done.push_back({cell.key, std::move(fine), err});
      } else {
        pending_error += err;
        for (int c = 0; c < 4; ++c) {
          const detail::CellKey ck{cell.key.depth + 1, 2 * cell.key.iu + (c & 1),
                                   2 * cell.key.iv + (c >> 1)};
          next.push_back({ck, kids[i][static_cast<std::size_t>(c)]});
        }
      }
    }
    cells_used += 4 * active.size();
    active = std::move(next);
    ++depth;
    if (!active.empty() && (depth >= opt.max_depth || cells_used > opt.max_cells)) {
      // Point singularities (conical zeros of |f|) leave a few cells whose
      // area share is too small for the local test; accept them when the
      // global error budget still holds.
      double done_error = 0.0;
      for (const auto& d : done) done_error += d.error;
      if (done_error + pending_error <= opt.abs_tol) {
        for (auto& a : active) done.push_back({a.key, std::move(a.coarse), 0.0});
        residual_error = pending_error;
        active.clear();
        break;
      }
      T partial = zero;
      for (const auto& d : done) partial += d.value;
      for (const auto& a : active) partial += a.coarse;
      std::ostringstream msg;
      msg << "quadrature failed: " << active.size() << " cells unresolved at depth "
          << depth << " (pending error " << pending_error << ", tolerance " << opt.abs_tol
          << ")";
      throw QuadratureFailure(msg.str(), norm(partial), pending_error);
    }
  }
  std::sort(done.begin(), done.end(),
            [](const Done& a, const Done& b) { return a.key < b.key; });
  Estimate<T> out{zero, residual_error, cells_used, depth};
  for (const auto& d : done) {
    out.value += d.value;
    out.error += d.error;
  }
  return out;
}

/// Scalar convenience overload.
template <class F>
Estimate<cplx> integrate_rect(F&& f, const Rect& rect, const AdaptiveOptions& opt = {}) {
  return integrate_rect(std::forward<F>(f), rect, default_rule(), opt, cplx{0.0, 0.0},
                        [](const cplx& z) { return std::abs(z); });
}

/// 1-D adaptive Gauss-Legendre with the same two-level acceptance rule.
struct Estimate1D {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

Estimate1D integrate_interval(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol = 0.0, int max_depth = 40,
                              int points = 10);

/// Disk-shaped chart region with a certified bound on the omitted mass.
struct TruncatedDomain {
  cplx center{0.0, 0.0};
  double radius = 1.0;
  double tail_bound = 0.0;
};

/// Radius for an integrand bounded by prefactor * exp(-|z - center|^2 / scale)
/// against Lebesgue area, so that the mass outside is <= target. The tail of
/// that majorant outside radius R is prefactor * pi * scale * exp(-R^2 / scale).
TruncatedDomain gaussian_truncation(cplx center, double scale, double prefactor,
                                    double target);
double gaussian_tail_bound(double radius, double scale, double prefactor);

struct ChartIntegral {
  cplx value;
  double error = 0.0;
  double tail_bound = 0.0;
  std::size_t cells = 0;
};

/// Integrates f(z) dA(z) over the disk |z - center| < radius (polar cells).
/// The reported tail_bound is carried over from the domain.
ChartIntegral integrate_chart(const std::function<cplx(cplx)>& f,
                              const TruncatedDomain& domain,
                              const QuadratureRule& rule, double target_tol,
                              const AdaptiveOptions& base = {});

/// Central estimate of d/ds d/dt g(s u, t v) at s = t = 0. Error is O(h^2).
/// Throws DomainError naming the stencil point if in_chart rejects it.
cplx mixed_second_difference(
    const std::function<cplx(Point2, Point2)>& g, Point2 u, Point2 v, double h,
    const std::function<bool(Point2)>& in_chart = nullptr);

/// Ordered time partition 0 = t_0 < ... < t_n = 1.
class Partition {
 public:
  explicit Partition(std::vector<double> times);
  static Partition uniform(std::size_t intervals);

  const std::vector<double>& times() const { return times_; }
  std::size_t intervals() const { return times_.size() - 1; }
  double mesh() const;
  /// Inserts the midpoint of every interval.
  Partition refined() const;
  /// Adds the given times (deduplicated); result is a refinement of *this.
  Partition with_points(const std::vector<double>& extra) const;
  bool contains(double t, double tol = 0.0) const;
  bool refines(const Partition& coarser) const;

 private:
  std::vector<double> times_;
};

using Vec3 = std::array<double, 3>;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  int subdivision_level = 0;

  std::size_t edge_count() const;
  long euler_characteristic() const;
  /// Every directed edge appears once, and its reverse appears once.
  bool is_consistently_oriented() const;
  TriangleMesh reversed() const;
  /// Sum over faces of det(v0, v1, v2); its sign gives the outward (+) or
  /// inward (-) winding of a closed star-shaped mesh around the origin.
  double signed_volume() const;
};

enum class Winding { outward, inward };

/// Icosahedron subdivided `level` times, vertices on the unit sphere.
/// 20 * 4^level faces. The default winding is inward; see README for why the
/// sphere model's symplectic orientation corresponds to that choice.
TriangleMesh icosphere(int level, Winding winding = Winding::inward);

/// Radical-inverse (van der Corput / Halton) coordinate for index >= 1.
double halton(std::uint64_t index, unsigned base);

}  // namespace numerics
}  // namespace csq
