#include "csq/numerics.hpp"

#include <atomic>
#include <map>
#include <set>
#include <utility>

namespace csq {

namespace {
std::atomic<unsigned> g_default_threads{1};
}

unsigned default_threads() noexcept { return g_default_threads.load(); }
void set_default_threads(unsigned threads) noexcept {
  g_default_threads.store(threads == 0 ? 1u : threads);
}

namespace numerics {

GaussLegendre1D gauss_legendre(int points) {
  if (points < 1) throw ConfigError("gauss_legendre: need at least one point");
  const int n = points;
  GaussLegendre1D rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::make_pair(p1, n * (x * p1 - p0) / (x * x - 1.0));  // (P_n, P_n')
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

QuadratureRule tensor_gauss_legendre(int points_per_axis) {
  const auto gl = gauss_legendre(points_per_axis);
  QuadratureRule rule;
  rule.order = 2 * points_per_axis - 1;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      rule.nodes.push_back({gl.nodes[i], gl.nodes[j]});
      rule.weights.push_back(gl.weights[i] * gl.weights[j]);
    }
  return rule;
}

const QuadratureRule& default_rule() {
  static const QuadratureRule rule = tensor_gauss_legendre(8);
  return rule;
}

Estimate1D integrate_interval(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, int max_depth, int points) {
  const auto gl = gauss_legendre(points);
  auto panel = [&](double lo, double hi) {
    const double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * f(c + h * gl.nodes[i]);
    return s * h;
  };
  struct Seg {
    double lo, hi, coarse;
    int depth;
  };
  // scale tracks the largest panel magnitude seen, for rel_tol.
  std::vector<Seg> active{{a, b, panel(a, b), 0}};
  std::vector<std::pair<double, std::pair<double, double>>> accepted;  // (lo, (value, err))
  double scale = std::abs(active.front().coarse);
  const double length = b - a;
  std::size_t used = 1;
  while (!active.empty()) {
    std::vector<Seg> next;
    for (const auto& s : active) {
      const double mid = 0.5 * (s.lo + s.hi);
      const double left = panel(s.lo, mid), right = panel(mid, s.hi);
      used += 2;
      const double fine = left + right;
      const double err = std::abs(fine - s.coarse);
      scale = std::max(scale, std::abs(fine));
      const double tol = std::max(abs_tol, rel_tol * scale) * (s.hi - s.lo) / length;
      if (err <= tol || err <= 64 * 2.220446049250313e-16 * std::abs(fine)) {
        accepted.push_back({s.lo, {fine, err}});
      } else if (s.depth + 1 >= max_depth) {
        std::ostringstream msg;
        msg << "quadrature failed: interval [" << s.lo << ", " << s.hi
            << "] unresolved at depth " << max_depth << " (error " << err << ")";
        throw QuadratureFailure(msg.str(), scale, err);
      } else {
        next.push_back({s.lo, mid, left, s.depth + 1});
        next.push_back({mid, s.hi, right, s.depth + 1});
      }
    }
    active = std::move(next);
  }
  std::sort(accepted.begin(), accepted.end());
  Estimate1D out;
  out.intervals = used;
  for (const auto& [lo, ve] : accepted) {
    out.value += ve.first;
    out.error += ve.second;
  }
  return out;
}

double gaussian_tail_bound(double radius, double scale, double prefactor) {
  return prefactor * kPi * scale * std::exp(-radius * radius / scale);
}

TruncatedDomain gaussian_truncation(cplx center, double scale, double prefactor,
                                    double target) {
  if (!(scale > 0.0) || !(target > 0.0))
    throw ConfigError("gaussian_truncation: scale and target must be positive");
  const double mass = prefactor * kPi * scale;
  double r2 = mass > target ? scale * std::log(mass / target) : 0.0;
  const double radius = std::max(std::sqrt(r2), 1e-3);
  return {center, radius, gaussian_tail_bound(radius, scale, prefactor)};
}

ChartIntegral integrate_chart(const std::function<cplx(cplx)>& f,
                              const TruncatedDomain& domain, const QuadratureRule& rule,
                              double target_tol, const AdaptiveOptions& base) {
  if (!(target_tol > 0.0)) throw ConfigError("integrate_chart: target_tol must be positive");
  if (!(domain.radius > 0.0)) throw ConfigError("integrate_chart: radius must be positive");
  AdaptiveOptions opt = base;
  opt.abs_tol = target_tol;
  const cplx c = domain.center;
  auto polar = [&](double r, double theta) -> cplx {
    return r * f(c + std::polar(r, theta));
  };
  const auto est = integrate_rect(polar, Rect{0.0, domain.radius, 0.0, 2.0 * kPi}, rule, opt,
                                  cplx{0.0, 0.0}, [](const cplx& z) { return std::abs(z); });
  return {est.value, est.error, domain.tail_bound, est.cells};
}

cplx mixed_second_difference(const std::function<cplx(Point2, Point2)>& g, Point2 u,
                             Point2 v, double h, const std::function<bool(Point2)>& in_chart) {
  if (!(h > 0.0)) throw ConfigError("mixed_second_difference: step must be positive");
  auto at = [&](double s, double t) {
    const Point2 a{s * u.u, s * u.v};
    const Point2 b{t * v.u, t * v.v};
    if (in_chart) {
      for (const auto& p : {a, b}) {
        if (!in_chart(p)) {
          std::ostringstream msg;
          msg << "stencil leaves the chart at (" << p.u << ", " << p.v << ")";
          throw DomainError(msg.str());
        }
      }
    }
    return g(a, b);
  };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
}

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw ConfigError("partition needs at least two times");
  if (times_.front() != 0.0 || times_.back() != 1.0)
    throw ConfigError("partition must start at 0 and end at 1");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw ConfigError("partition times must increase strictly");
}

Partition Partition::uniform(std::size_t intervals) {
  if (intervals == 0) throw ConfigError("partition needs at least one interval");
  std::vector<double> t(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    t[i] = static_cast<double>(i) / static_cast<double>(intervals);
  t.back() = 1.0;
  return Partition(std::move(t));
}

double Partition::mesh() const {
  double m = 0.0;
  for (std::size_t i = 1; i < times_.size(); ++i) m = std::max(m, times_[i] - times_[i - 1]);
  return m;
}

Partition Partition::refined() const {
  std::vector<double> t;
  t.reserve(2 * times_.size());
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    t.push_back(times_[i]);
    t.push_back(0.5 * (times_[i] + times_[i + 1]));
  }
  t.push_back(1.0);
  return Partition(std::move(t));
}

Partition Partition::with_points(const std::vector<double>& extra) const {
  std::set<double> all(times_.begin(), times_.end());
  for (double e : extra) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("partition points must lie in (0, 1)");
    all.insert(e);
  }
  return Partition(std::vector<double>(all.begin(), all.end()));
}

bool Partition::contains(double t, double tol) const {
  return std::any_of(times_.begin(), times_.end(),
                     [&](double s) { return std::abs(s - t) <= tol; });
}

bool Partition::refines(const Partition& coarser) const {
  return std::all_of(coarser.times().begin(), coarser.times().end(),
                     [&](double t) { return contains(t); });
}

std::size_t TriangleMesh::edge_count() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& f : faces)
    for (int k = 0; k < 3; ++k) {
      const int a = f[static_cast<std::size_t>(k)], b = f[static_cast<std::size_t>((k + 1) % 3)];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  return edges.size();
}

long TriangleMesh::euler_characteristic() const {
  return static_cast<long>(vertices.size()) - static_cast<long>(edge_count()) +
         static_cast<long>(faces.size());
}

bool TriangleMesh::is_consistently_oriented() const {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : faces)
    for (int k = 0; k < 3; ++k)
      ++directed[{f[static_cast<std::size_t>(k)], f[static_cast<std::size_t>((k + 1) % 3)]}];
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    auto rev = directed.find({edge.second, edge.first});
    if (rev == directed.end() || rev->second != 1) return false;
  }
  return true;
}

TriangleMesh TriangleMesh::reversed() const {
  TriangleMesh out = *this;
  for (auto& f : out.faces) std::swap(f[1], f[2]);
  return out;
}

double TriangleMesh::signed_volume() const {
  double s = 0.0;
  for (const auto& f : faces) {
    const auto& a = vertices[static_cast<std::size_t>(f[0])];
    const auto& b = vertices[static_cast<std::size_t>(f[1])];
    const auto& c = vertices[static_cast<std::size_t>(f[2])];
    s += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
  }
  return s / 6.0;
}

namespace {
Vec3 normalized(Vec3 p) {
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  return {p[0] / r, p[1] / r, p[2] / r};
}
}  // namespace

TriangleMesh icosphere(int level, Winding winding) {
  if (level < 0) throw ConfigError("icosphere level must be >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  for (Vec3 p : {Vec3{-1, t, 0}, Vec3{1, t, 0}, Vec3{-1, -t, 0}, Vec3{1, -t, 0},
                 Vec3{0, -1, t}, Vec3{0, 1, t}, Vec3{0, -1, -t}, Vec3{0, 1, -t},
                 Vec3{t, 0, -1}, Vec3{t, 0, 1}, Vec3{-t, 0, -1}, Vec3{-t, 0, 1}})
    mesh.vertices.push_back(normalized(p));
  // outward winding
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const auto& pa = mesh.vertices[static_cast<std::size_t>(a)];
      const auto& pb = mesh.vertices[static_cast<std::size_t>(b)];
      mesh.vertices.push_back(normalized({pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]}));
      const int id = static_cast<int>(mesh.vertices.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.faces.size() * 4);
    for (const auto& f : mesh.faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(next);
  }
  mesh.subdivision_level = level;
  if (winding == Winding::inward) mesh = mesh.reversed();
  return mesh;
}

double halton(std::uint64_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace numerics
}  // namespace csq
