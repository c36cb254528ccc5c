#include "csq/pathint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csq/error.hpp"
#include "csq/parallel.hpp"

namespace csq::pathint {

ChartPoint PathSpec::operator()(double t) const {
  if (closed) t -= std::floor(t);
  return at(t);
}

PathSpec PathSpec::constant(const ChartPoint& x) {
  return {[x](double) { return x; }, true, "constant", 1.0};
}

PathSpec PathSpec::circle(cplx center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("circle path: radius must be positive");
  std::ostringstream d;
  d << "circle:" << center.real() << "," << center.imag() << "," << radius;
  return {[center, radius](double t) {
            // exact closure at t = 1
            if (t >= 1.0) t = 0.0;
            return ChartPoint::main(center + std::polar(radius, 2.0 * kPi * t));
          },
          true, d.str(), radius};
}

PathSpec PathSpec::back_and_forth(cplx from, cplx to) {
  std::ostringstream d;
  d << "segment-return:" << from << "->" << to;
  return {[from, to](double t) {
            const double s = 1.0 - std::abs(1.0 - 2.0 * t);
            return ChartPoint::main(from + s * (to - from));
          },
          true, d.str(), std::max(std::abs(to - from), 1e-3)};
}

PathSpec PathSpec::reversed() const {
  PathSpec r = *this;
  const auto f = at;
  r.at = [f](double t) { return f(1.0 - t); };
  r.descriptor = descriptor + ":reversed";
  return r;
}

SlicedTransport sliced_product(const ModelSpace& m, const PathSpec& path,
                               const std::vector<double>& times) {
  SlicedTransport out;
  out.times = times;
  ChartPoint prev = path.at(times.front());
  for (std::size_t i = 1; i < times.size(); ++i) {
    const ChartPoint next = path.at(times[i]);
    out.product *= models::kernel(m, prev, next);
    prev = next;
  }
  out.modulus_deficiency = 1.0 - std::abs(out.product);
  return out;
}

SlicedTransport sliced_product(const ModelSpace& m, const PathSpec& path,
                               const numerics::Partition& partition) {
  return sliced_product(m, path, partition.times());
}

cplx connection_holonomy_oracle(const ModelSpace& m, const PathSpec& path, int steps) {
  if (!path.closed) throw ConfigError("connection_holonomy_oracle: path must be closed");
  if (steps < 1) throw ConfigError("connection_holonomy_oracle: steps must be >= 1");
  const double h = 1e-4 * path.scale;
  // Step in t: the path moves about scale * 2 pi per unit t for circles.
  const double dt = h / (2.0 * kPi * path.scale);
  auto A = [&](double t) {
    const ChartPoint x = path(t);
    auto L = [&](double s) { return std::log(models::kernel(m, x, path(t + s))); };
    return (-L(2 * dt) + 8.0 * L(dt) - 8.0 * L(-dt) + L(-2 * dt)) / (12.0 * dt);
  };
  static const numerics::GaussLegendre1D gl = numerics::gauss_legendre(8);
  cplx total{0.0, 0.0};
  for (int p = 0; p < steps; ++p) {
    const double a = static_cast<double>(p) / steps, b = static_cast<double>(p + 1) / steps;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
      total += 0.5 * (b - a) * gl.weights[i] * A(0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i]);
  }
  return std::exp(total);
}

std::vector<HolonomyRow> holonomy_convergence(const ModelSpace& m, const PathSpec& path,
                                              const std::vector<std::size_t>& levels,
                                              int oracle_steps) {
  const cplx oracle = connection_holonomy_oracle(m, path, oracle_steps);
  std::vector<HolonomyRow> rows;
  for (std::size_t n : levels) {
    const auto s = sliced_product(m, path, numerics::Partition::uniform(n));
    HolonomyRow row{n, std::abs(std::arg(s.product * std::conj(oracle))), s.modulus_deficiency,
                    0.0};
    if (!rows.empty() && row.phase_error > 0.0 && rows.back().phase_error > 0.0)
      row.order = std::log(rows.back().phase_error / row.phase_error) /
                  std::log(static_cast<double>(n) / static_cast<double>(rows.back().intervals));
    rows.push_back(row);
  }
  return rows;
}

double empirical_order(const std::vector<HolonomyRow>& rows) {
  if (rows.size() < 2) throw ConfigError("empirical_order: need at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.intervals)), y = -std::log(r.phase_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(rows.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

SphereCubature sphere_cubature(const ModelSpace& m, int theta_points, int phi_points) {
  if (m.kind() != models::ModelKind::sphere)
    throw ConfigError("sphere_cubature: needs a sphere model");
  if (theta_points < 1 || phi_points < 1) throw ConfigError("sphere_cubature: empty rule");
  const auto gl = numerics::gauss_legendre(theta_points);
  // d(mu) = c (n+1) / (4 pi) dA on the unit sphere
  const double total = m.calibration() * (m.level() + 1.0);
  SphereCubature out;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double ct = gl.nodes[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < phi_points; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5) / phi_points;
      out.nodes.push_back(models::from_unit_vector({st * std::cos(phi), st * std::sin(phi), ct}));
      out.weights.push_back(total * gl.weights[i] / (2.0 * phi_points));
    }
  }
  return out;
}

CylinderResult cylinder_consistency(const ModelSpace& m, const ChartPoint& x,
                                    const ChartPoint& y, const std::vector<Insertion>& fs,
                                    const std::vector<numerics::Partition>& partitions,
                                    const quantize::QuantSettings& s) {
  if (m.kind() != models::ModelKind::sphere)
    throw ConfigError("cylinder_consistency: needs a sphere model");
  std::vector<Insertion> ins = fs;
  std::sort(ins.begin(), ins.end(),
            [](const Insertion& a, const Insertion& b) { return a.time < b.time; });
  for (std::size_t i = 0; i < ins.size(); ++i) {
    if (!(ins[i].time > 0.0 && ins[i].time < 1.0))
      throw ConfigError("cylinder_consistency: insertion times must lie in (0, 1)");
    if (i > 0 && ins[i].time == ins[i - 1].time)
      throw ConfigError("cylinder_consistency: two insertions at the same time");
  }
  const int n = m.level();
  CylinderResult out;

  quantize::Vector v = quantize::coherent_vector(n, x);
  for (const auto& f : ins) v = quantize::build_Q(m, f.f, "f", s).entries * v;
  out.matrix_kernel = quantize::coherent_vector(n, y).dot(v);

  const auto rule = sphere_cubature(m, n + 16, 2 * n + 32);
  const std::size_t M = rule.nodes.size();
  Eigen::MatrixXcd K(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  parallel_for(M, resolve_threads(s.threads), [&](std::size_t a) {
    for (std::size_t b = 0; b < M; ++b)
      K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          models::kernel(m, rule.nodes[a], rule.nodes[b]);
  });

  for (const auto& P : partitions) {
    for (const auto& f : ins)
      if (!P.contains(f.time, 1e-14)) {
        std::ostringstream msg;
        msg << "cylinder_consistency: partition lacks insertion time " << f.time;
        throw ConfigError(msg.str());
      }
    const auto& t = P.times();
    // phi(z) = integral over earlier times of the kernel chain ending at z
    Eigen::RowVectorXcd phi(static_cast<Eigen::Index>(M));
    bool first = true;
    std::size_t next = 0;
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
      const quantize::ChartFunction* g = nullptr;
      if (next < ins.size() && std::abs(ins[next].time - t[k]) <= 1e-14) g = &ins[next++].f;
      Eigen::RowVectorXcd w(static_cast<Eigen::Index>(M));
      for (std::size_t a = 0; a < M; ++a)
        w(static_cast<Eigen::Index>(a)) =
            rule.weights[a] * (g ? (*g)(rule.nodes[a]) : cplx{1.0, 0.0});
      if (first) {
        for (std::size_t a = 0; a < M; ++a)
          phi(static_cast<Eigen::Index>(a)) = models::kernel(m, x, rule.nodes[a]);
        first = false;
      } else {
        phi = phi * K;
      }
      phi = phi.cwiseProduct(w);
    }
    cplx value;
    if (first) {
      value = models::kernel(m, x, y);
    } else {
      value = cplx{0.0, 0.0};
      for (std::size_t a = 0; a < M; ++a)
        value += phi(static_cast<Eigen::Index>(a)) * models::kernel(m, rule.nodes[a], y);
    }
    out.iterated.push_back(value);
  }

  std::vector<cplx> all{out.matrix_kernel};
  all.insert(all.end(), out.iterated.begin(), out.iterated.end());
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      out.discrepancy = std::max(out.discrepancy, std::abs(all[i] - all[j]));
  return out;
}

}  // namespace csq::pathint
