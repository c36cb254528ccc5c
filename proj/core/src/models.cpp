#include "csq/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "csq/error.hpp"

namespace csq::models {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

cplx ipow(cplx b, int k) {
  cplx r{1.0, 0.0};
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

// Homogeneous coordinates (p, q) with z = p / q.
std::array<cplx, 2> homogeneous(const ChartPoint& x) {
  if (x.chart == ChartId::main) return {x.z, cplx{1.0, 0.0}};
  return {cplx{1.0, 0.0}, x.z};
}

ChartPoint from_homogeneous(cplx p, cplx q) {
  if (std::abs(p) <= std::abs(q)) return ChartPoint::main(p / q);
  return ChartPoint::secondary(q / p);
}

cplx sphere_value_main(int n, cplx x, cplx y) {
  return ipow((1.0 + std::conj(x) * y) / (1.0 + std::norm(x)), n);
}

cplx plane_kernel(double hbar, cplx x, cplx y) {
  return std::exp(-(std::norm(x) + std::norm(y) - 2.0 * x * std::conj(y)) / (2.0 * hbar));
}

cplx half_plane_kernel(int k, cplx x, cplx y) {
  const cplx b = cplx{0.0, 2.0} * std::sqrt(x.imag() * y.imag()) / (x - std::conj(y));
  return ipow(b, k);
}

cplx podles_kernel(const PodlesSeries& s, cplx x, cplx y) {
  const auto [scale, sum] = s.scaled_sum(std::conj(x) * y);
  const double lx = s.log_sum(std::norm(x)), ly = s.log_sum(std::norm(y));
  return std::exp(scale - 0.5 * (lx + ly)) * sum;
}

cplx quartic_kernel(double hbar, cplx x, cplx y) {
  const LeafArrow a = leaf_reduce_quartic(ChartPoint::main(x), ChartPoint::main(y));
  const cplx l = a.lambda;
  const double x4 = std::norm(x) * std::norm(x);
  return std::exp((-std::norm(l) * x4 + std::conj(l) * x - l * std::conj(x)) / (4.0 * hbar));
}

}  // namespace

bool operator==(const ChartPoint& a, const ChartPoint& b) {
  return a.chart == b.chart && a.z == b.z;
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::sphere: return "sphere";
    case ModelKind::plane: return "plane";
    case ModelKind::half_plane: return "halfplane";
    case ModelKind::podles: return "podles";
    case ModelKind::quartic_leaf: return "quartic";
  }
  return "unknown";
}

ModelSpace ModelSpace::sphere(int n) {
  if (n < 1) throw ConfigError("sphere: level n must be a positive integer");
  return ModelSpace(SphereLevel{n});
}

ModelSpace ModelSpace::plane(double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("plane: hbar must be positive");
  return ModelSpace(Plane{hbar});
}

ModelSpace ModelSpace::half_plane(int k) {
  if (k < 1) throw ConfigError("halfplane: k = 2/hbar must be a positive integer");
  if (k == 1)
    throw ConfigError("halfplane: k = 1 has no normalizable propagator (need k >= 2)");
  return ModelSpace(HalfPlane{k});
}

ModelSpace ModelSpace::podles(double hbar, const PodlesOptions& options) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("podles: hbar must be positive");
  auto series = std::make_shared<const PodlesSeries>(build_podles_series(hbar, options));
  return ModelSpace(Podles{hbar, std::move(series)});
}

ModelSpace ModelSpace::quartic_leaf(double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("quartic: hbar must be positive");
  return ModelSpace(QuarticLeaf{hbar});
}

ModelKind ModelSpace::kind() const {
  return std::visit(overloaded{[](const SphereLevel&) { return ModelKind::sphere; },
                               [](const Plane&) { return ModelKind::plane; },
                               [](const HalfPlane&) { return ModelKind::half_plane; },
                               [](const Podles&) { return ModelKind::podles; },
                               [](const QuarticLeaf&) { return ModelKind::quartic_leaf; }},
                    params_);
}

ModelSpace ModelSpace::with_calibration(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("calibration must be positive");
  ModelSpace out = *this;
  out.calibration_ = c;
  return out;
}

int ModelSpace::level() const {
  if (const auto* s = std::get_if<SphereLevel>(&params_)) return s->n;
  throw ConfigError("level() is only defined for the sphere");
}

double ModelSpace::hbar() const {
  return std::visit(overloaded{[](const SphereLevel& s) { return 1.0 / s.n; },
                               [](const Plane& p) { return p.hbar; },
                               [](const HalfPlane& h) { return h.hbar(); },
                               [](const Podles& p) { return p.hbar; },
                               [](const QuarticLeaf& q) { return q.hbar; }},
                    params_);
}

std::string ModelSpace::describe() const {
  std::ostringstream out;
  out << to_string(kind()) << "(";
  std::visit(overloaded{[&](const SphereLevel& s) { out << "n=" << s.n; },
                        [&](const Plane& p) { out << "hbar=" << p.hbar; },
                        [&](const HalfPlane& h) { out << "k=" << h.k; },
                        [&](const Podles& p) {
                          out << "hbar=" << p.hbar << ", N=" << p.series->terms() - 1;
                        },
                        [&](const QuarticLeaf& q) { out << "hbar=" << q.hbar; }},
             params_);
  out << ")";
  return out.str();
}

bool in_chart(const ModelSpace& m, const ChartPoint& x) {
  if (!std::isfinite(x.z.real()) || !std::isfinite(x.z.imag())) return false;
  switch (m.kind()) {
    case ModelKind::sphere: return true;
    case ModelKind::plane: return x.chart == ChartId::main;
    case ModelKind::half_plane: return x.chart == ChartId::main && x.z.imag() > 0.0;
    case ModelKind::podles:
    case ModelKind::quartic_leaf: return x.chart == ChartId::main && x.z != cplx{0.0, 0.0};
  }
  return false;
}

void validate(const ModelSpace& m, const ChartPoint& x) {
  if (in_chart(m, x)) return;
  std::ostringstream msg;
  msg << "point " << x.z << (x.chart == ChartId::secondary ? " (secondary chart)" : "")
      << " is outside the chart of " << m.describe();
  throw DomainError(msg.str());
}

std::array<cplx, 2> spinor(const ChartPoint& x) {
  const auto [p, q] = homogeneous(x);
  const double norm = std::sqrt(std::norm(p) + std::norm(q));
  return {q / norm, p / norm};
}

numerics::Vec3 to_unit_vector(const ChartPoint& x) {
  const auto [p, q] = homogeneous(x);
  const double s = std::norm(p) + std::norm(q);
  const cplx w = 2.0 * p * std::conj(q) / s;
  return {w.real(), w.imag(), (std::norm(p) - std::norm(q)) / s};
}

ChartPoint from_unit_vector(const numerics::Vec3& v) {
  const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(len > 0.0)) throw DomainError("from_unit_vector: zero vector");
  const double x1 = v[0] / len, x2 = v[1] / len, x3 = v[2] / len;
  if (x3 <= 0.0) return ChartPoint::main(cplx{x1, x2} / (1.0 - x3));
  return ChartPoint::secondary(cplx{x1, -x2} / (1.0 + x3));
}

LeafArrow leaf_reduce_quartic(const ChartPoint& x, const ChartPoint& y) {
  if (x.chart != ChartId::main || y.chart != ChartId::main)
    throw DomainError("quartic leaf: points must be in the main chart");
  if (x.z == cplx{0.0, 0.0} || y.z == cplx{0.0, 0.0})
    throw DomainError("quartic leaf: z = 0 is not on the symplectic leaf");
  const cplx lambda = (y.z - x.z) / (y.z * std::norm(x.z) * std::conj(x.z));
  const double y2 = std::norm(y.z);
  return {lambda, 1.0 / (y2 * y2)};
}

cplx quartic_target(cplx z, cplx lambda) {
  const cplx den = 1.0 - lambda * std::norm(z) * std::conj(z);
  if (den == cplx{0.0, 0.0}) throw DomainError("quartic leaf: arrow target at infinity");
  return z / den;
}

cplx quartic_groupoid_propagator(double hbar, cplx z, cplx lambda) {
  const double z4 = std::norm(z) * std::norm(z);
  return std::exp((-std::norm(lambda) * z4 + std::conj(lambda) * z - lambda * std::conj(z)) /
                  (4.0 * hbar)) /
         (2.0 * kPi * hbar);
}

namespace {

// Rotations tried when a sphere point sits in the secondary chart; the one
// keeping both images farthest from z = infinity is used.
std::array<SU2, 3> reposition_candidates() {
  return {su2_rotation({1.0, 0.0, 0.0}, 0.5 * kPi), su2_rotation({0.0, 1.0, 0.0}, 0.5 * kPi),
          SU2{cplx{0.0, 0.0}, cplx{0.0, 1.0}}};
}

cplx sphere_value(int n, const ChartPoint& x, const ChartPoint& y) {
  if (x.chart == ChartId::main && y.chart == ChartId::main) return sphere_value_main(n, x.z, y.z);
  double best = std::numeric_limits<double>::infinity();
  cplx gx, gy;
  for (const SU2& g : reposition_candidates()) {
    auto image = [&](const ChartPoint& p) {
      const auto [a, b] = homogeneous(p);
      return std::array<cplx, 2>{g.alpha * a + g.beta * b,
                                 -std::conj(g.beta) * a + std::conj(g.alpha) * b};
    };
    const auto hx = image(x), hy = image(y);
    const double worst = std::max(std::abs(hx[0] / hx[1]), std::abs(hy[0] / hy[1]));
    if (worst < best) {
      best = worst;
      gx = hx[0] / hx[1];
      gy = hy[0] / hy[1];
    }
  }
  return sphere_value_main(n, gx, gy);
}

}  // namespace

cplx kernel(const ModelSpace& m, const ChartPoint& x, const ChartPoint& y) {
  validate(m, x);
  validate(m, y);
  if (x == y) return cplx{1.0, 0.0};
  return std::visit(
      overloaded{[&](const SphereLevel& s) {
                   const auto a = spinor(x), b = spinor(y);
                   return ipow(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1], s.n);
                 },
                 [&](const Plane& p) { return plane_kernel(p.hbar, x.z, y.z); },
                 [&](const HalfPlane& h) { return half_plane_kernel(h.k, x.z, y.z); },
                 [&](const Podles& p) { return podles_kernel(*p.series, x.z, y.z); },
                 [&](const QuarticLeaf& q) { return quartic_kernel(q.hbar, x.z, y.z); }},
      m.params());
}

double metric_weight(const ModelSpace& m, const ChartPoint& x) {
  validate(m, x);
  if (const auto* s = std::get_if<SphereLevel>(&m.params()))
    return std::pow(1.0 + std::norm(x.z), -s->n);
  return 1.0;
}

double measure_density(const ModelSpace& m, const ChartPoint& x) {
  validate(m, x);
  const double c = m.calibration();
  const double t = std::norm(x.z);
  return std::visit(
      overloaded{[&](const SphereLevel& s) { return c * (s.n + 1.0) / kPi / ((1.0 + t) * (1.0 + t)); },
                 [&](const Plane& p) { return c / (2.0 * kPi * p.hbar); },
                 [&](const HalfPlane& h) {
                   const double y = x.z.imag();
                   return c * h.k / (4.0 * kPi * y * y);
                 },
                 [&](const Podles& p) {
                   const double l = p.series->log_sum(t) + dilog(-t) / p.hbar;
                   return c * 2.0 * std::exp(l) / std::sqrt(1.0 + t);
                 },
                 [&](const QuarticLeaf& q) { return c / (2.0 * kPi * q.hbar * t * t); }},
      m.params());
}

PropagatorSample eval_propagator(const ModelSpace& m, const ChartPoint& x, const ChartPoint& y) {
  PropagatorSample out;
  out.unitary = kernel(m, x, y);
  out.weighted_modulus = x == y ? 1.0 : std::abs(out.unitary);
  if (const auto* s = std::get_if<SphereLevel>(&m.params()))
    out.value = x == y ? cplx{1.0, 0.0} : sphere_value(s->n, x, y);
  else
    out.value = out.unitary;
  return out;
}

SU2 su2_rotation(const numerics::Vec3& axis, double angle) {
  const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (!(len > 0.0)) throw ConfigError("su2_rotation: zero axis");
  const double n1 = axis[0] / len, n2 = axis[1] / len, n3 = axis[2] / len;
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  return SU2{cplx{c, s * n3}, cplx{-s * n2, s * n1}};
}

Isometry identity_isometry(ModelKind kind) {
  switch (kind) {
    case ModelKind::plane: return PlaneMotion{};
    case ModelKind::half_plane: return Mobius{};
    default: return SU2{};
  }
}

Isometry compose(const Isometry& second, const Isometry& first) {
  if (const auto* a = std::get_if<PlaneMotion>(&second)) {
    const auto& b = std::get<PlaneMotion>(first);
    return PlaneMotion{a->angle + b.angle, std::polar(1.0, a->angle) * b.translation + a->translation};
  }
  if (const auto* a = std::get_if<Mobius>(&second)) {
    const auto& b = std::get<Mobius>(first);
    return Mobius{a->a * b.a + a->b * b.c, a->a * b.b + a->b * b.d, a->c * b.a + a->d * b.c,
                  a->c * b.b + a->d * b.d};
  }
  const auto& a = std::get<SU2>(second);
  const auto& b = std::get<SU2>(first);
  // [[a, b], [-b*, a*]] products stay in the same form.
  return SU2{a.alpha * b.alpha - a.beta * std::conj(b.beta),
             a.alpha * b.beta + a.beta * std::conj(b.alpha)};
}

ChartPoint isometry_act(const ModelSpace& m, const Isometry& g, const ChartPoint& x) {
  validate(m, x);
  switch (m.kind()) {
    case ModelKind::plane: {
      const auto* p = std::get_if<PlaneMotion>(&g);
      if (!p) throw ConfigError("plane isometries are rotation + translation");
      return ChartPoint::main(std::polar(1.0, p->angle) * x.z + p->translation);
    }
    case ModelKind::half_plane: {
      const auto* h = std::get_if<Mobius>(&g);
      if (!h) throw ConfigError("halfplane isometries are real Mobius matrices");
      const double det = h->a * h->d - h->b * h->c;
      if (std::abs(det - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "halfplane isometry must have det 1, got " << det;
        throw ConfigError(msg.str());
      }
      return ChartPoint::main((h->a * x.z + h->b) / (h->c * x.z + h->d));
    }
    case ModelKind::sphere: {
      const auto* s = std::get_if<SU2>(&g);
      if (!s) throw ConfigError("sphere isometries are SU(2) elements");
      const double nrm = std::norm(s->alpha) + std::norm(s->beta);
      if (std::abs(nrm - 1.0) > 1e-12) throw ConfigError("SU(2) element must be unit norm");
      const auto [p, q] = homogeneous(x);
      return from_homogeneous(s->alpha * p + s->beta * q,
                              -std::conj(s->beta) * p + std::conj(s->alpha) * q);
    }
    default: throw ConfigError(std::string(to_string(m.kind())) + " has no isometry action");
  }
}

// Integration patches.

namespace {

cplx anchor_mean(const std::vector<ChartPoint>& anchors, bool invert) {
  cplx m{0.0, 0.0};
  if (anchors.empty()) return m;
  for (const auto& a : anchors) m += invert ? 1.0 / a.z : a.z;
  return m / static_cast<double>(anchors.size());
}

IntegrationPatch gaussian_disk(cplx center, double scale, double density, double bound,
                               double target, bool invert) {
  const auto dom = numerics::gaussian_truncation(center, scale, bound * density, target);
  IntegrationPatch patch;
  patch.rect = {0.0, dom.radius, 0.0, 2.0 * kPi};
  patch.tail_bound = dom.tail_bound;
  patch.map = [center, density, invert](double r, double phi) {
    const cplx w = center + std::polar(r, phi);
    if (invert) {
      if (w == cplx{0.0, 0.0}) return std::pair{ChartPoint::main(cplx{1.0, 0.0}), 0.0};
      return std::pair{ChartPoint::main(1.0 / w), density * r};
    }
    return std::pair{ChartPoint::main(w), density * r};
  };
  return patch;
}

IntegrationPatch podles_patch(const ModelSpace& m, const IntegrationRequest& req) {
  if (req.anchors.empty()) throw ConfigError("podles integration needs anchor points");
  auto series = std::get<Podles>(m.params()).series;
  const double hbar = m.hbar(), c = m.calibration(), B = req.integrand_bound;
  const double p = req.kernel_power;
  // log of max_a S(|a| r) / sqrt(S(|a|^2)), bounding |K(a, z)| sqrt(S(|z|^2)).
  std::vector<double> radii;
  for (const auto& a : req.anchors) radii.push_back(std::abs(a.z));
  auto log_factor = [series, radii](double r) {
    double best = -std::numeric_limits<double>::infinity();
    for (double ra : radii)
      best = std::max(best, series->log_sum(ra * ra * r * r) - 0.5 * series->log_sum(ra * ra));
    return best;
  };
  // Majorant of |integrand| * weight per unit s = log t, angle integrated:
  // 2 pi B c f(r)^p S(t)^(1-p/2) exp(Li2(-t)/hbar) t / sqrt(1+t).
  auto log_upper = [=](double s) {
    const double t = std::exp(s), r = std::sqrt(t);
    return std::log(B * c * 2.0 * kPi) + p * log_factor(r) +
           (1.0 - 0.5 * p) * series->log_sum(t) + dilog(-t) / hbar - 0.5 * std::log1p(t) + s;
  };
  const double half = 0.5 * req.tail_target;
  // Lower cut: the mass of {t < T} is at most 2 pi c T S(T) and |integrand| <= B.
  double s_lo = -20.0;
  auto lower_tail = [&](double s) {
    const double T = std::exp(s);
    return B * c * 2.0 * kPi * T * std::exp(series->log_sum(T));
  };
  while (lower_tail(s_lo) > half) s_lo -= 2.0;
  const double lower = lower_tail(s_lo);

  double peak_s = 0.0;
  {
    double best = -std::numeric_limits<double>::infinity();
    for (double s = s_lo; s < 80.0; s += 0.5) {
      const double v = log_upper(s);
      if (v > best) {
        best = v;
        peak_s = s;
      }
    }
  }
  double s_end = std::max(peak_s, 0.0);
  while (log_upper(s_end) > std::log(half) - 60.0) s_end += 1.0;
  auto tail_from = [&](double s) {
    if (s >= s_end) return 0.0;
    return numerics::integrate_interval([&](double u) { return std::exp(log_upper(u)); }, s,
                                        s_end, 1e-3 * half, 1e-10)
        .value;
  };
  double s_hi = std::max(peak_s, std::log(std::max(1.0, *std::max_element(radii.begin(), radii.end()))) * 2.0);
  while (tail_from(s_hi) > half) s_hi += 0.5;
  const double upper = tail_from(s_hi) + std::exp(log_upper(s_end));

  IntegrationPatch patch;
  patch.rect = {s_lo, s_hi, 0.0, 2.0 * kPi};
  patch.tail_bound = lower + upper;
  patch.map = [series, hbar, c](double s, double phi) {
    const double t = std::exp(s);
    const double l = series->log_sum(t) + dilog(-t) / hbar + s;
    return std::pair{ChartPoint::main(std::polar(std::sqrt(t), phi)),
                     c * std::exp(l) / std::sqrt(1.0 + t)};
  };
  return patch;
}

}  // namespace

IntegrationPatch integration_patch(const ModelSpace& m, const IntegrationRequest& req) {
  for (const auto& a : req.anchors) validate(m, a);
  if (!(req.tail_target > 0.0)) throw ConfigError("tail_target must be positive");
  if (!(req.kernel_power > 0.0)) throw ConfigError("kernel_power must be positive");
  const double c = m.calibration();
  switch (m.kind()) {
    case ModelKind::sphere: {
      const int n = m.level();
      IntegrationPatch patch;
      patch.rect = {0.0, kPi, 0.0, 2.0 * kPi};
      const double k = c * (n + 1.0) / (4.0 * kPi);
      // theta is measured from z = 0; the far hemisphere uses u = 1/z.
      patch.map = [k](double theta, double phi) {
        const double w = k * std::sin(theta);
        if (theta <= 0.5 * kPi)
          return std::pair{ChartPoint::main(std::polar(std::tan(0.5 * theta), phi)), w};
        return std::pair{ChartPoint::secondary(std::polar(1.0 / std::tan(0.5 * theta), -phi)), w};
      };
      return patch;
    }
    case ModelKind::plane: {
      const double hbar = m.hbar();
      return gaussian_disk(anchor_mean(req.anchors, false), 2.0 * hbar / req.kernel_power,
                           c / (2.0 * kPi * hbar),
                           req.integrand_bound, req.tail_target, false);
    }
    case ModelKind::quartic_leaf: {
      const double hbar = m.hbar();
      return gaussian_disk(anchor_mean(req.anchors, true), 4.0 * hbar / req.kernel_power,
                           c / (2.0 * kPi * hbar),
                           req.integrand_bound, req.tail_target, true);
    }
    case ModelKind::half_plane: {
      const int k = std::get<HalfPlane>(m.params()).k;
      IntegrationPatch patch;
      patch.rect = {0.0, 1.0, 0.0, 2.0 * kPi};
      const double dens = c * k / kPi;
      // Cayley disk w -> z = i (1 + w) / (1 - w).
      patch.map = [dens](double r, double phi) {
        const cplx w = std::polar(r, phi);
        const double q = 1.0 - r * r;
        if (!(q > 0.0)) return std::pair{ChartPoint::main(cplx{0.0, 1.0}), 0.0};
        return std::pair{ChartPoint::main(cplx{0.0, 1.0} * (1.0 + w) / (1.0 - w)),
                         dens * r / (q * q)};
      };
      return patch;
    }
    case ModelKind::podles: return podles_patch(m, req);
  }
  throw ConfigError("unknown model");
}

}  // namespace csq::models
