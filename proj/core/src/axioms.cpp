#include "csq/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "csq/chern.hpp"

namespace csq::axioms {

using models::IntegrationRequest;

namespace {

IntegrationRequest request(const QuadratureSettings& q, std::vector<ChartPoint> anchors,
                           double bound = 1.0, double power = 2.0) {
  IntegrationRequest r;
  r.anchors = std::move(anchors);
  r.abs_tol = q.abs_tol;
  r.tail_target = q.tail_target;
  r.threads = q.threads;
  r.max_depth = q.max_depth;
  r.integrand_bound = bound;
  r.kernel_power = power;
  return r;
}

cplx convolve(const ModelSpace& m, const ChartPoint& x, const ChartPoint& y,
              const QuadratureSettings& q, ResidualSet& rs) {
  const auto r = models::integrate_scalar(
      m, [&](const ChartPoint& z) { return models::kernel(m, x, z) * models::kernel(m, z, y); },
      request(q, {x, y}));
  rs.max_quadrature_error = std::max(rs.max_quadrature_error, r.error);
  rs.max_tail_bound = std::max(rs.max_tail_bound, r.tail_bound);
  return r.value;
}

[[noreturn]] void rethrow_for_pair(const QuadratureFailure& e, std::size_t index) {
  std::ostringstream msg;
  msg << e.what() << " [pair " << index << "]";
  throw QuadratureFailure(msg.str(), e.estimate_abs(), e.error());
}

std::string format_point(const ChartPoint& p) {
  std::ostringstream out;
  out << p.z;
  return out.str();
}

}  // namespace

void ResidualSet::add(double v) { values.push_back(v); }

void ResidualSet::finish() {
  sup = 0.0;
  mean = 0.0;
  for (double v : values) {
    sup = std::max(sup, v);
    mean += v;
  }
  if (!values.empty()) mean /= static_cast<double>(values.size());
}

models::ModelIntegral<cplx> probability_mass(const ModelSpace& m, const ChartPoint& x,
                                             const QuadratureSettings& q) {
  return models::integrate_scalar(
      m, [&](const ChartPoint& z) { return cplx{std::norm(models::kernel(m, x, z)), 0.0}; },
      request(q, {x}));
}

Calibration calibrate_measure(const ModelSpace& m, const std::vector<ChartPoint>& samples,
                              const QuadratureSettings& q) {
  if (samples.size() < 5) throw ConfigError("calibrate_measure: needs at least 5 samples");
  Calibration cal{m, m.calibration(), 1.0, 0.0, {}};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& x : samples) {
    const auto r = probability_mass(m, x, q);
    const double v = r.value.real();
    cal.integrals.add(v);
    cal.integrals.max_quadrature_error = std::max(cal.integrals.max_quadrature_error, r.error);
    cal.integrals.max_tail_bound = std::max(cal.integrals.max_tail_bound, r.tail_bound);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  cal.integrals.finish();
  const double mean = cal.integrals.mean;
  if (!(mean > 0.0)) throw CalibrationRejected("calibration: nonpositive mean mass", 0.0);
  cal.spread = (hi - lo) / mean;
  if (cal.spread > kMaxCalibrationSpread) {
    std::ostringstream msg;
    msg << "calibration rejected for " << m.describe() << ": spread " << cal.spread
        << " exceeds " << kMaxCalibrationSpread;
    throw CalibrationRejected(msg.str(), cal.spread);
  }
  cal.factor = 1.0 / mean;
  cal.constant = m.calibration() * cal.factor;
  cal.model = m.with_calibration(cal.constant);
  return cal;
}

ResidualSet check_idempotent(const ModelSpace& m,
                             const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
                             const QuadratureSettings& q) {
  ResidualSet rs;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    try {
      rs.add(std::abs(convolve(m, x, y, q, rs) - models::kernel(m, x, y)));
    } catch (const QuadratureFailure& e) {
      rethrow_for_pair(e, i);
    }
  }
  rs.finish();
  return rs;
}

ResidualSet check_idempotent_twice(const ModelSpace& m,
                                   const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
                                   const QuadratureSettings& q) {
  ResidualSet rs;
  QuadratureSettings inner = q;
  inner.threads = 1;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    try {
      ResidualSet scratch;
      const auto r = models::integrate_scalar(
          m,
          [&](const ChartPoint& z) {
            return models::kernel(m, x, z) * convolve(m, z, y, inner, scratch);
          },
          request(q, {x, y}));
      rs.max_quadrature_error = std::max(rs.max_quadrature_error, r.error + scratch.max_quadrature_error);
      rs.max_tail_bound = std::max(rs.max_tail_bound, r.tail_bound + scratch.max_tail_bound);
      rs.add(std::abs(r.value - models::kernel(m, x, y)));
    } catch (const QuadratureFailure& e) {
      rethrow_for_pair(e, i);
    }
  }
  rs.finish();
  return rs;
}

PointwiseReport check_pointwise_axioms(const ModelSpace& m, const std::vector<ChartPoint>& samples,
                                       const QuadratureSettings& q, bool with_l1) {
  PointwiseReport rep;
  for (const auto& x : samples) {
    const auto s = models::eval_propagator(m, x, x);
    rep.diagonal.add(std::max({std::abs(s.value - 1.0), std::abs(s.unitary - 1.0),
                               std::abs(s.weighted_modulus - 1.0)}));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const auto &x = samples[i], &y = samples[j];
      if (x == y) continue;
      const auto a = models::eval_propagator(m, x, y);
      const auto b = models::eval_propagator(m, y, x);
      rep.contraction.add(a.weighted_modulus);
      double herm = std::abs(a.unitary - std::conj(b.unitary));
      if (x.chart == models::ChartId::main && y.chart == models::ChartId::main) {
        const double hx = models::metric_weight(m, x), hy = models::metric_weight(m, y);
        herm = std::max(herm, std::abs(a.value * hy - std::conj(b.value) * hx));
      }
      rep.hermiticity.add(herm);
    }
  }
  if (with_l1) {
    // |K| has conical zeros where K vanishes, so only a looser tolerance is
    // reachable; the check is about finiteness anyway.
    QuadratureSettings ql = q;
    ql.abs_tol = std::max(q.abs_tol, 1e-8);
    for (const auto& x : samples) {
      try {
        const auto r = models::integrate_scalar(
            m, [&](const ChartPoint& z) { return cplx{std::abs(models::kernel(m, x, z)), 0.0}; },
            request(ql, {x}, 1.0, 1.0));
        rep.l1_bound.add(r.value.real());
        rep.l1_bound.max_quadrature_error = std::max(rep.l1_bound.max_quadrature_error, r.error);
        rep.l1_bound.max_tail_bound = std::max(rep.l1_bound.max_tail_bound, r.tail_bound);
      } catch (const QuadratureFailure& e) {
        rep.l1_finite = false;
        rep.l1_note = "int |Omega(x, .)| dmu did not converge at x = " + format_point(x) + ": " + e.what();
        break;
      }
    }
  }
  rep.diagonal.finish();
  rep.contraction.finish();
  rep.hermiticity.finish();
  rep.l1_bound.finish();
  return rep;
}

InvarianceResidual check_isometry_invariance(
    const ModelSpace& m, const models::Isometry& g,
    const std::vector<std::array<ChartPoint, 3>>& triples) {
  InvarianceResidual out;
  for (const auto& t : triples) {
    const auto gx = models::isometry_act(m, g, t[0]);
    const auto gy = models::isometry_act(m, g, t[1]);
    const auto gz = models::isometry_act(m, g, t[2]);
    const auto before = chern::three_point(m, t[0], t[1], t[2], false);
    const auto after = chern::three_point(m, gx, gy, gz, false);
    out.normalized_delta.add(std::abs(after.normalized - before.normalized));
    out.modulus_squared.add(
        std::abs(std::norm(models::kernel(m, gx, gy)) - std::norm(models::kernel(m, t[0], t[1]))));
  }
  out.normalized_delta.finish();
  out.modulus_squared.finish();
  return out;
}

TrivializationResidual check_cocycle_trivialization(
    const ModelSpace& m, const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
    const QuadratureSettings& q, double min_modulus) {
  TrivializationResidual out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    const cplx kxy = models::kernel(m, x, y);
    const double mod2 = std::norm(kxy);
    if (std::sqrt(mod2) < min_modulus) {
      out.skipped.push_back(i);
      continue;
    }
    const cplx kyx = models::kernel(m, y, x);
    try {
      const auto r = models::integrate_scalar(
          m,
          [&](const ChartPoint& w) {
            return models::kernel(m, x, w) * models::kernel(m, w, y) * kyx / mod2;
          },
          request(q, {x, y}, 1.0 / std::sqrt(mod2)));
      out.residuals.max_quadrature_error = std::max(out.residuals.max_quadrature_error, r.error);
      out.residuals.max_tail_bound = std::max(out.residuals.max_tail_bound, r.tail_bound);
      out.residuals.add(std::abs(r.value - 1.0));
    } catch (const QuadratureFailure& e) {
      rethrow_for_pair(e, i);
    }
  }
  out.residuals.finish();
  return out;
}

namespace {

ChartPoint region_point(const ModelSpace& m, double a, double b) {
  switch (m.kind()) {
    case models::ModelKind::sphere: {
      const double x3 = 2.0 * a - 1.0, rho = std::sqrt(std::max(0.0, 1.0 - x3 * x3));
      return models::from_unit_vector(
          {rho * std::cos(2.0 * kPi * b), rho * std::sin(2.0 * kPi * b), x3});
    }
    case models::ModelKind::plane:
      return ChartPoint::main(std::polar(2.0 * std::sqrt(a), 2.0 * kPi * b));
    case models::ModelKind::half_plane: {
      const cplx w = std::polar(0.7 * std::sqrt(a), 2.0 * kPi * b);
      return ChartPoint::main(cplx{0.0, 1.0} * (1.0 + w) / (1.0 - w));
    }
    case models::ModelKind::podles:
      return ChartPoint::main(std::polar(0.3 + 1.7 * std::sqrt(a), 2.0 * kPi * b));
    case models::ModelKind::quartic_leaf:
      return ChartPoint::main(std::polar(0.6 + 1.4 * std::sqrt(a), 2.0 * kPi * b));
  }
  return ChartPoint::main(cplx{0.0, 0.0});
}

ChartPoint region_origin(const ModelSpace& m) {
  switch (m.kind()) {
    case models::ModelKind::half_plane: return ChartPoint::main(cplx{0.0, 1.0});
    case models::ModelKind::podles:
    case models::ModelKind::quartic_leaf: return ChartPoint::main(cplx{1.0, 0.0});
    default: return ChartPoint::main(cplx{0.0, 0.0});
  }
}

}  // namespace

SampleSet make_samples(const ModelSpace& m, std::size_t count, std::uint64_t seed) {
  SampleSet s;
  std::ostringstream d;
  d << "halton(2,3) count=" << count << " seed=" << seed << " + origin + near-diagonal {1e-2,1e-1}";
  s.descriptor = d.str();
  s.points.push_back(region_origin(m));
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t idx = 1 + seed + i;
    s.points.push_back(region_point(m, numerics::halton(idx, 2), numerics::halton(idx, 3)));
  }
  for (std::size_t i = 0; i + 1 < s.points.size(); ++i)
    s.pairs.emplace_back(s.points[i], s.points[i + 1]);
  s.pairs.emplace_back(s.points.front(), s.points.front());
  const std::size_t near = std::min<std::size_t>(4, s.points.size());
  for (std::size_t i = 0; i < near; ++i) {
    for (double dist : {1e-2, 1e-1}) {
      const auto& p = s.points[i];
      const ChartPoint q{p.z + std::polar(dist, 0.7 + 1.3 * static_cast<double>(i)), p.chart};
      if (models::in_chart(m, q)) s.pairs.emplace_back(p, q);
    }
  }
  const std::size_t ntriples = std::max<std::size_t>(20, count);
  for (std::size_t i = 0; i < ntriples; ++i) {
    std::array<ChartPoint, 3> t;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::uint64_t idx = 1 + seed + count + 3 * i + k;
      t[k] = region_point(m, numerics::halton(idx, 2), numerics::halton(idx, 3));
    }
    s.triples.push_back(t);
  }
  return s;
}

std::vector<models::Isometry> sample_isometries(const ModelSpace& m) {
  switch (m.kind()) {
    case models::ModelKind::plane:
      return {models::PlaneMotion{0.0, cplx{0.7, -0.3}}, models::PlaneMotion{kPi, cplx{0.0, 0.0}},
              models::PlaneMotion{0.4, cplx{-1.1, 0.5}}, models::PlaneMotion{-2.3, cplx{0.2, 1.7}},
              models::PlaneMotion{1.0, cplx{3.0, -2.0}}};
    case models::ModelKind::half_plane:
      return {models::Mobius{0, -1, 1, 0}, models::Mobius{1, 1, 0, 1}, models::Mobius{2, 0, 0, 0.5},
              models::Mobius{1, 0, 1, 1}, models::Mobius{2, 1, 1, 1}};
    case models::ModelKind::sphere:
      return {models::su2_rotation({1, 0, 0}, 0.9), models::su2_rotation({0, 1, 0}, kPi),
              models::su2_rotation({0, 0, 1}, 2.1), models::su2_rotation({1, 1, 1}, 1.3),
              models::su2_rotation({-0.3, 0.5, 2.0}, -0.6)};
    default: return {};
  }
}

double default_quadrature_tol(const ModelSpace& m) {
  return m.kind() == models::ModelKind::sphere ? 1e-8 : 1e-6;
}

AxiomReport run_axiom_suite(const ModelSpace& m, const SuiteOptions& opt) {
  AxiomReport rep;
  rep.model = m.describe();
  const SampleSet s = make_samples(m, opt.samples, opt.seed);
  rep.samples = s.descriptor;
  const double qtol = opt.quadrature_tol > 0.0 ? opt.quadrature_tol : default_quadrature_tol(m);

  auto push = [&](std::string name, double tol, ResidualSet rs, bool pass, std::string note = {}) {
    rep.checks.push_back({std::move(name), pass, tol, std::move(rs), std::move(note)});
  };

  Calibration cal{m, 1.0, 1.0, 0.0, {}};
  try {
    cal = calibrate_measure(m, s.points, opt.quadrature);
  } catch (const CalibrationRejected& e) {
    ResidualSet rs;
    rs.add(e.spread());
    rs.finish();
    push("calibration", qtol, rs, false, e.what());
    rep.pass = false;
    return rep;
  }
  rep.calibration = cal.constant;
  rep.calibration_spread = cal.spread;
  {
    ResidualSet rs;
    rs.add(cal.spread);
    rs.finish();
    rs.max_quadrature_error = cal.integrals.max_quadrature_error;
    rs.max_tail_bound = cal.integrals.max_tail_bound;
    push("calibration", qtol, rs, cal.spread < qtol);
  }
  const ModelSpace& mc = cal.model;

  const auto pw = check_pointwise_axioms(mc, s.points, opt.quadrature, true);
  push("unit_diagonal", opt.pointwise_tol, pw.diagonal, pw.diagonal.sup <= opt.pointwise_tol);
  push("contraction", 1.0, pw.contraction, pw.contraction.sup < 1.0,
       "weighted |Omega(x,y)| for x != y, strict bound 1");
  push("hermiticity", opt.pointwise_tol, pw.hermiticity, pw.hermiticity.sup <= opt.pointwise_tol);
  push("l1_bound", std::numeric_limits<double>::infinity(), pw.l1_bound, pw.l1_finite,
       pw.l1_finite ? "sup over samples of int |Omega(x, .)| dmu" : pw.l1_note);

  const auto idem = check_idempotent(mc, s.pairs, opt.quadrature);
  push("idempotence", qtol, idem, idem.sup < qtol);

  const auto triv = check_cocycle_trivialization(mc, s.pairs, opt.quadrature);
  std::string note;
  if (!triv.skipped.empty()) {
    std::ostringstream n;
    n << triv.skipped.size() << " pairs skipped with |Omega(x,y)| < 1e-3";
    note = n.str();
  }
  push("cocycle_trivialization", qtol, triv.residuals, triv.residuals.sup < qtol, note);

  if (opt.with_isometries) {
    const auto gs = sample_isometries(mc);
    if (!gs.empty()) {
      ResidualSet delta_rs, mod_rs;
      for (const auto& g : gs) {
        const auto inv = check_isometry_invariance(mc, g, s.triples);
        for (double v : inv.normalized_delta.values) delta_rs.add(v);
        for (double v : inv.modulus_squared.values) mod_rs.add(v);
      }
      delta_rs.finish();
      mod_rs.finish();
      push("isometry_delta", opt.pointwise_tol, delta_rs, delta_rs.sup < opt.pointwise_tol);
      push("isometry_modulus", opt.pointwise_tol, mod_rs, mod_rs.sup < opt.pointwise_tol);
    }
  }
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const AxiomCheck& c) { return c.pass; });
  return rep;
}

}  // namespace csq::axioms
