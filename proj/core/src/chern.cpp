#include "csq/chern.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csq/error.hpp"
#include "csq/parallel.hpp"

namespace csq::chern {

cplx delta(const ModelSpace& m, const ChartPoint& x, const ChartPoint& y, const ChartPoint& z) {
  return models::kernel(m, x, y) * models::kernel(m, y, z) * models::kernel(m, z, x);
}

ThreePointSample three_point(const ModelSpace& m, const ChartPoint& x, const ChartPoint& y,
                             const ChartPoint& z, bool want_log) {
  const cplx kxy = models::kernel(m, x, y);
  const cplx kyz = models::kernel(m, y, z);
  const cplx kzx = models::kernel(m, z, x);
  ThreePointSample s{x, y, z, kxy * kyz * kzx, {}, std::nullopt};
  const double diag = std::norm(kzx);  // delta(x, x, z)
  s.normalized = diag > 0.0 ? s.delta / diag : cplx{0.0, 0.0};
  const double weakest = std::min({std::abs(kxy), std::abs(kyz), std::abs(kzx)});
  if (weakest > kLogModulusFloor) {
    s.log_value = std::log(s.normalized);
  } else if (want_log) {
    std::ostringstream msg;
    msg << "triple too spread: pairwise weighted |Omega| = " << weakest << " <= "
        << kLogModulusFloor;
    throw DomainError(msg.str());
  }
  return s;
}

cplx vanest_curvature(const ModelSpace& m, const ChartPoint& x, numerics::Point2 u,
                      numerics::Point2 v, double h) {
  auto shifted = [&](numerics::Point2 a) {
    return ChartPoint{x.z + cplx{a.u, a.v}, x.chart};
  };
  auto g = [&](numerics::Point2 a, numerics::Point2 b) {
    return *three_point(m, x, shifted(a), shifted(b)).log_value;
  };
  auto ok = [&](numerics::Point2 a) { return models::in_chart(m, shifted(a)); };
  const cplx duv = numerics::mixed_second_difference(g, u, v, h, ok);
  const cplx dvu = numerics::mixed_second_difference(g, v, u, h, ok);
  return duv - dvu;
}

namespace {

numerics::Vec3 midpoint(const numerics::Vec3& a, const numerics::Vec3& b) {
  numerics::Vec3 c{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
  const double r = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
  return {c[0] / r, c[1] / r, c[2] / r};
}

}  // namespace

ChernResult chern_number(const ModelSpace& m, const numerics::TriangleMesh& mesh,
                         unsigned threads) {
  std::vector<ChartPoint> pts;
  pts.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) pts.push_back(models::from_unit_vector(v));
  std::vector<double> phase(mesh.faces.size()), split(mesh.faces.size()), weakest(mesh.faces.size());
  parallel_for(mesh.faces.size(), resolve_threads(threads), [&](std::size_t i) {
    const auto& f = mesh.faces[i];
    const auto& a = pts[static_cast<std::size_t>(f[0])];
    const auto& b = pts[static_cast<std::size_t>(f[1])];
    const auto& c = pts[static_cast<std::size_t>(f[2])];
    phase[i] = std::arg(delta(m, a, b, c));
    weakest[i] = std::min({std::abs(models::kernel(m, a, b)), std::abs(models::kernel(m, b, c)),
                           std::abs(models::kernel(m, c, a))});
    // A resolved face has the same phase as the sum over its four halves.
    const auto& va = mesh.vertices[static_cast<std::size_t>(f[0])];
    const auto& vb = mesh.vertices[static_cast<std::size_t>(f[1])];
    const auto& vc = mesh.vertices[static_cast<std::size_t>(f[2])];
    const ChartPoint ab = models::from_unit_vector(midpoint(va, vb));
    const ChartPoint bc = models::from_unit_vector(midpoint(vb, vc));
    const ChartPoint ca = models::from_unit_vector(midpoint(vc, va));
    split[i] = std::arg(delta(m, a, ab, ca)) + std::arg(delta(m, ab, b, bc)) +
               std::arg(delta(m, ca, bc, c)) + std::arg(delta(m, ab, bc, ca));
  });
  ChernResult r;
  r.faces = mesh.faces.size();
  double sum = 0.0, mismatch = 0.0, floor = 1.0;
  for (std::size_t i = 0; i < phase.size(); ++i) {
    sum += phase[i];
    r.max_face_phase = std::max(r.max_face_phase, std::abs(phase[i]));
    mismatch = std::max(mismatch, std::abs(phase[i] - split[i]));
    floor = std::min(floor, weakest[i]);
  }
  if (r.max_face_phase >= kPi - 0.1 || mismatch > 1e-6 || floor <= kLogModulusFloor) {
    std::ostringstream msg;
    msg << "mesh too coarse for " << m.describe() << " at subdivision level "
        << mesh.subdivision_level << ": max face phase " << r.max_face_phase
        << ", split-face mismatch " << mismatch << ", min edge |Omega| " << floor;
    throw DomainError(msg.str());
  }
  r.raw = sum / (2.0 * kPi);
  r.chern = std::lround(r.raw);
  r.residual = std::abs(r.raw - static_cast<double>(r.chern));
  return r;
}

std::pair<ChernResult, int> chern_number_refined(const ModelSpace& m, int start_level,
                                                 numerics::Winding winding, int max_level,
                                                 unsigned threads) {
  for (int level = std::max(0, start_level); level <= max_level; ++level) {
    try {
      const auto r = chern_number(m, numerics::icosphere(level, winding), threads);
      if (r.max_face_phase < 0.5 * kPi) return {r, level};
    } catch (const DomainError&) {
      // too coarse, refine
    }
  }
  std::ostringstream msg;
  msg << "no icosphere level <= " << max_level << " resolves " << m.describe();
  throw DomainError(msg.str());
}

RiemannSum riemann_sum_1d(const std::function<double(double, double)>& F,
                          const std::function<double(double)>& f,
                          const numerics::Partition& partition, double a, double b) {
  RiemannSum out;
  const auto& t = partition.times();
  auto at = [&](std::size_t i) { return i + 1 == t.size() ? b : a + (b - a) * t[i]; };
  for (std::size_t i = 0; i + 1 < t.size(); ++i) out.sum += F(at(i), at(i + 1));
  out.reference = numerics::integrate_interval(f, a, b, 1e-14, 1e-13).value;
  out.error = std::abs(out.sum - out.reference);
  return out;
}

cplx cocycle_defect(const ModelSpace& m, const std::array<ChartPoint, 4>& q) {
  auto face = [&](int skip) {
    std::array<ChartPoint, 3> p;
    int j = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) p[static_cast<std::size_t>(j++)] = q[static_cast<std::size_t>(i)];
    return three_point(m, p[0], p[1], p[2], false).normalized;
  };
  return face(0) / face(1) * face(2) / face(3);
}

}  // namespace csq::chern
