#include "commands.hpp"

#include <cmath>
#include <sstream>

#include "csq/axioms.hpp"
#include "csq/chern.hpp"
#include "csq/error.hpp"
#include "csq/pathint.hpp"
#include "csq/quantize.hpp"
#include "csq/starprod.hpp"

namespace csq::cli {

using report::Json;
using report::Suite;
using report::Table;

namespace {

models::ModelSpace make_model(const RunConfig& c) {
  if (c.model == "sphere") {
    if (c.n < 1) throw ConfigError("sphere: --n must be >= 1");
    return models::ModelSpace::sphere(c.n);
  }
  if (c.model == "plane") return models::ModelSpace::plane(c.hbar);
  if (c.model == "halfplane") return models::ModelSpace::half_plane(c.k);
  if (c.model == "podles") return models::ModelSpace::podles(c.hbar);
  if (c.model == "quartic") return models::ModelSpace::quartic_leaf(c.hbar);
  throw ConfigError("unknown --model '" + c.model +
                    "' (expected sphere, plane, halfplane, podles or quartic)");
}

void require_sphere(const RunConfig& c) {
  if (c.model != "sphere") throw ConfigError(c.command + ": only --model sphere is supported");
  if (c.n < 1) throw ConfigError("sphere: --n must be >= 1");
}

quantize::QuantSettings qsettings(const RunConfig& c, double fallback) {
  quantize::QuantSettings s;
  s.abs_tol = c.tol > 0.0 ? c.tol : fallback;
  s.threads = c.threads;
  return s;
}

Json residual_json(double sup, double tol) { return Json{{"sup", sup}, {"tolerance", tol}}; }

std::vector<Suite> cmd_verify(const RunConfig& c) {
  const auto m = make_model(c);
  axioms::SuiteOptions opt;
  opt.samples = c.samples;
  opt.seed = c.seed;
  opt.quadrature_tol = c.tol;
  opt.quadrature.threads = c.threads;
  const auto rep = axioms::run_axiom_suite(m, opt);
  std::vector<Suite> out;
  Table summary{{"check", "sup", "mean", "tolerance", "pass"}, {}};
  Json names = Json::array();
  for (const auto& chk : rep.checks) {
    Suite s{chk.name, chk.pass, report::to_json(chk.residuals), {}, {}};
    s.residuals["tolerance"] = chk.tolerance;
    if (!chk.note.empty()) s.details["note"] = chk.note;
    if (chk.name == "calibration") {
      s.details["constant"] = rep.calibration;
      s.details["spread"] = rep.calibration_spread;
      s.details["samples"] = rep.samples;
      s.details["model"] = rep.model;
    }
    summary.add({static_cast<double>(names.size()), chk.residuals.sup, chk.residuals.mean,
                 chk.tolerance, chk.pass ? 1.0 : 0.0});
    names.push_back(chk.name);
    out.push_back(std::move(s));
  }
  if (!out.empty()) {
    out.front().tables.emplace_back("axioms", summary);
    out.front().details["check_names"] = names;
  }
  return out;
}

std::vector<models::ChartPoint> sphere_points(std::size_t count) {
  std::vector<models::ChartPoint> pts;
  for (const auto& v : starprod::sphere_samples(count)) pts.push_back(models::from_unit_vector(v));
  return pts;
}

std::vector<Suite> cmd_quantize(const RunConfig& c) {
  require_sphere(c);
  const int n = c.n;
  const auto m = models::ModelSpace::sphere(n);
  const auto s = qsettings(c, 1e-11);
  const std::string check = c.check;
  auto want = [&](const char* name) { return check == "standard" || check == name; };
  std::vector<Suite> out;

  if (want("gram")) {
    const auto g = quantize::gram_matrix(m, s);
    const double dev = quantize::max_abs(g.value - quantize::Matrix::Identity(n + 1, n + 1));
    out.push_back({"gram", dev < 1e-8, residual_json(dev, 1e-8), {}, {}});
  }
  if (want("resolution")) {
    const auto r = quantize::resolution_of_identity(m, s);
    Suite su{"resolution", false, residual_json(r.residual, 1e-8), {}, {}};
    su.details = {{"trace", r.trace.real()}, {"volume", r.volume}, {"dimension", n + 1}};
    su.pass = r.residual < 1e-8 && std::abs(r.trace.real() - (n + 1)) < 1e-8 &&
              std::abs(r.volume - (n + 1)) < 1e-7;
    out.push_back(std::move(su));
  }
  if (want("projections")) {
    const auto pts = sphere_points(c.samples);
    double proj = 0.0, overlap = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto q = quantize::coherent_projection(m, pts[i]);
      proj = std::max({proj, quantize::max_abs(q.entries * q.entries - q.entries),
                       std::abs(q.entries.trace() - 1.0)});
      const auto& y = pts[(i + 1) % pts.size()];
      const double a = std::abs(quantize::coherent_vector(n, pts[i]).dot(quantize::coherent_vector(n, y)));
      overlap = std::max(overlap, std::abs(a - models::eval_propagator(m, pts[i], y).weighted_modulus));
    }
    Suite su{"projections", proj < 1e-12 && overlap < 1e-12, residual_json(std::max(proj, overlap), 1e-12), {}, {}};
    su.details = {{"idempotence_trace", proj}, {"overlap_vs_modulus", overlap}};
    out.push_back(std::move(su));
  }
  if (want("berezin")) {
    const auto samples = starprod::sphere_samples(std::max<std::size_t>(c.samples, 30));
    const std::vector<std::pair<std::string, quantize::ChartFunction>> fs{
        {"x1", quantize::coordinate(1)},
        {"x3", quantize::coordinate(3)},
        {"x1^2", [](const models::ChartPoint& x) {
           const double v = models::to_unit_vector(x)[0];
           return cplx{v * v, 0.0};
         }}};
    Suite su{"berezin", true, Json::object(), {}, {}};
    for (const auto& [name, f] : fs) {
      const auto rows = quantize::berezin_transform_limit(f, c.levels, samples, qsettings(c, 1e-10));
      Table t{{"n", "error"}, {}};
      bool monotone = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        t.add({static_cast<double>(rows[i].n), rows[i].error});
        if (i > 0 && !(rows[i].error < rows[i - 1].error)) monotone = false;
      }
      const double ratio = rows.size() >= 2 ? quantize::halving_ratio(rows) : 0.0;
      const bool ok = monotone && std::abs(ratio - 0.5) <= 0.15;
      su.pass = su.pass && ok;
      su.residuals[name] = {{"halving_ratio", ratio}, {"monotone", monotone}};
      su.tables.emplace_back("berezin_" + name, t);
    }
    out.push_back(std::move(su));
  }
  if (want("schur")) {
    const auto r = quantize::su2_schur_check(n, s);
    Suite su{"schur", r.residual < 1e-8 && r.commutator < 1e-8, residual_json(r.residual, 1e-8), {}, {}};
    su.details = {{"j2", n}, {"commutator", r.commutator}, {"trace", r.trace},
                  {"conjugation_deviation", r.conjugation_deviation}};
    out.push_back(std::move(su));
  }
  if (want("roundtrip")) {
    const auto pts = sphere_points(std::max<std::size_t>(c.samples, 32));
    std::vector<std::pair<models::ChartPoint, models::ChartPoint>> pairs;
    std::vector<std::array<models::ChartPoint, 3>> triples;
    for (std::size_t i = 0; i + 2 < pts.size(); ++i) {
      pairs.emplace_back(pts[i], pts[i + 1]);
      triples.push_back({pts[i], pts[i + 1], pts[i + 2]});
    }
    const auto r = quantize::reconstruct_propagator(
        m, [&](const models::ChartPoint& x) { return quantize::coherent_projection(m, x); }, pairs,
        triples);
    Suite su{"roundtrip", r.sup_modulus < 1e-10 && r.sup_delta < 1e-10,
             residual_json(std::max(r.sup_modulus, r.sup_delta), 1e-10), {}, {}};
    su.details = {{"modulus", r.sup_modulus}, {"delta", r.sup_delta}, {"pairs", pairs.size()}};
    out.push_back(std::move(su));
  }
  if (want("positivity")) {
    const std::vector<std::pair<std::string, quantize::ChartFunction>> fs{
        {"x1^2", [](const models::ChartPoint& x) {
           const double v = models::to_unit_vector(x)[0];
           return cplx{v * v, 0.0};
         }},
        {"(1+x3)/2", [](const models::ChartPoint& x) {
           return cplx{0.5 * (1.0 + models::to_unit_vector(x)[2]), 0.0};
         }}};
    double worst = 0.0;
    Suite su{"positivity", true, Json::object(), {}, {}};
    for (const auto& [name, f] : fs) {
      const double e = quantize::min_eigenvalue(quantize::build_Q(m, f, name, s));
      su.details[name] = e;
      worst = std::min(worst, e);
    }
    su.pass = worst >= -1e-10;
    su.residuals = {{"min_eigenvalue", worst}, {"tolerance", -1e-10}};
    out.push_back(std::move(su));
  }
  if (check == "pauli") {
    if (n != 1) throw ConfigError("quantize --check pauli needs --n 1");
    quantize::Matrix sp = quantize::Matrix::Zero(2, 2), sm = sp, sz = sp;
    sp(1, 0) = 1.0;
    sm(0, 1) = 1.0;
    sz(0, 0) = -1.0;
    sz(1, 1) = 1.0;
    const auto pts = sphere_points(std::max<std::size_t>(c.samples, 50));
    Suite su{"pauli_symbols", true, Json::object(), {}, {}};
    const std::vector<std::tuple<std::string, quantize::Matrix, int>> rows{
        {"sigma_plus", sp, 1}, {"sigma_minus", sm, -1}, {"sigma_z", sz, 0}};
    for (const auto& [name, a, kind] : rows) {
      const auto rho = quantize::covariant_symbol(quantize::QuantOperator::external(a, name));
      double dev = 0.0;
      for (const auto& x : pts) {
        const auto u = models::to_unit_vector(x);
        const cplx target = kind == 0 ? cplx{u[2], 0.0} : cplx{u[0], kind * u[1]};
        dev = std::max(dev, std::abs(rho(x) - target));
      }
      su.residuals[name] = dev;
      su.pass = su.pass && dev < 1e-10;
    }
    out.push_back(std::move(su));
  }
  if (out.empty()) throw ConfigError("quantize: unknown --check '" + check + "'");
  return out;
}

std::vector<Suite> cmd_star(const RunConfig& c) {
  using starprod::GaussRational;
  using starprod::Rational;
  using starprod::SpherePoly;
  const int n = c.n;
  if (n < 1) throw ConfigError("star: --n must be >= 1");
  const std::string check = c.check;
  const SpherePoly x[3] = {SpherePoly::coordinate(1), SpherePoly::coordinate(2),
                           SpherePoly::coordinate(3)};
  const SpherePoly one = SpherePoly::constant(GaussRational(1));
  const GaussRational i = GaussRational::i_unit();
  std::vector<Suite> out;

  if (check == "all" || check == "identities") {
    const GaussRational inv(Rational(1, n));
    Suite su{"identities", true, Json::object(), {}, {}};
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, d = (a + 2) % 3;
      const bool ok = starprod::star(starprod::poly_to_coeff(x[a], n), starprod::poly_to_coeff(x[a], n)) ==
                      starprod::poly_to_coeff(x[a] * x[a] + (x[b] * x[b] + x[d] * x[d]) * inv, n);
      su.residuals["x" + std::to_string(a + 1) + "*x" + std::to_string(a + 1)] = ok;
      su.pass = su.pass && ok;
    }
    const SpherePoly w = x[0] + x[1] * i, wb = x[0] - x[1] * i;
    const SpherePoly rho2 = x[0] * x[0] + x[1] * x[1];
    const bool plus = starprod::star(starprod::poly_to_coeff(w, n), starprod::poly_to_coeff(wb, n)) ==
                      starprod::poly_to_coeff(rho2 + (one + x[2]) * (one + x[2]) * inv, n);
    const bool minus = starprod::star(starprod::poly_to_coeff(wb, n), starprod::poly_to_coeff(w, n)) ==
                       starprod::poly_to_coeff(rho2 + (one - x[2]) * (one - x[2]) * inv, n);
    su.residuals["(x1+ix2)*(x1-ix2)"] = plus;
    su.residuals["(x1-ix2)*(x1+ix2)"] = minus;
    su.pass = su.pass && plus && minus;
    su.details["arithmetic"] = "exact rational";
    out.push_back(std::move(su));
  }
  if (check == "all" || check == "pauli") {
    // Coordinate functions at n = 1 form a Pauli algebra.
    starprod::CoeffMatrix X[3] = {starprod::poly_to_coeff(x[0], 1),
                                  starprod::poly_to_coeff(x[1], 1),
                                  starprod::poly_to_coeff(x[2], 1)};
    const auto I = starprod::CoeffMatrix::identity(1);
    Suite su{"pauli", true, Json::object(), {}, {}};
    bool herm = true, square = true, anti = true;
    for (int a = 0; a < 3; ++a) {
      herm = herm && X[a].is_hermitian();
      square = square && starprod::star(X[a], X[a]) == I;
      for (int b = a + 1; b < 3; ++b)
        anti = anti && starprod::star(X[a], X[b]) + starprod::star(X[b], X[a]) == starprod::CoeffMatrix(1);
    }
    // x1 * x2 = s i x3 with s = +-1
    const auto p12 = starprod::star(X[0], X[1]);
    int sign = 0;
    for (int s : {1, -1}) {
      starprod::CoeffMatrix t(1);
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) t.raw(j, k) = X[2].raw(j, k) * i * GaussRational(s);
      if (p12 == t) sign = s;
    }
    const bool sz = X[2].raw(0, 0) == GaussRational(-1) && X[2].raw(1, 1) == GaussRational(1) &&
                    X[2].raw(0, 1).is_zero() && X[2].raw(1, 0).is_zero();
    const auto w = starprod::poly_to_coeff(x[0] + x[1] * i, 1);
    su.residuals = {{"hermitian", herm}, {"squares_to_one", square}, {"anticommute", anti},
                    {"x1*x2 = s i x3", sign}, {"x3 = diag(-1,1)", sz}};
    su.details["x1+ix2 coefficient a_10"] = w.raw(1, 0).str();
    su.pass = herm && square && anti && sign != 0 && sz;
    out.push_back(std::move(su));
  }
  if (check == "all" || check == "semiclassical") {
    const std::vector<std::pair<std::string, std::pair<SpherePoly, SpherePoly>>> pairs{
        {"x3^2,x1x2", {x[2] * x[2], x[0] * x[1]}},
        {"x1x3,x2^2", {x[0] * x[2], x[1] * x[1]}},
        {"x1^2,x2x3", {x[0] * x[0], x[1] * x[2]}},
        {"x1x2,x2x3", {x[0] * x[1], x[1] * x[2]}}};
    std::vector<int> levels = c.levels;
    const auto samples = starprod::sphere_samples(std::max<std::size_t>(c.samples, 60));
    Suite su{"semiclassical", true, Json::object(), {}, {}};
    for (const auto& [name, pq] : pairs) {
      const auto t = starprod::semiclassical_check(pq.first, pq.second, levels, samples);
      Table tab{{"n", "error", "ratio"}, {}};
      bool ok = true;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        tab.add({static_cast<double>(t.rows[r].n), t.rows[r].error, t.rows[r].ratio});
        if (r > 0 && !(t.rows[r].ratio >= 0.15 && t.rows[r].ratio <= 0.35)) ok = false;
      }
      su.pass = su.pass && ok;
      su.residuals[name] = ok;
      su.tables.emplace_back("semiclassical_" + name, tab);
      su.details["kappa"] = t.constants.kappa;
      su.details["gamma"] = t.constants.gamma;
    }
    out.push_back(std::move(su));
  }
  if (out.empty()) throw ConfigError("star: unknown --check '" + check + "'");
  return out;
}

std::vector<Suite> cmd_chern(const RunConfig& c) {
  require_sphere(c);
  const auto m = models::ModelSpace::sphere(c.n);
  Suite su{"chern", true, Json::object(), {}, {}};
  Table t{{"mesh_level", "chern", "residual", "max_face_phase", "reversed_chern"}, {}};
  double worst = 0.0;
  long last = 0;
  for (int level : c.levels) {
    try {
      const auto mesh = numerics::icosphere(level);
      const auto r = chern::chern_number(m, mesh, c.threads);
      const auto rr = chern::chern_number(m, mesh.reversed(), c.threads);
      t.add({static_cast<double>(level), static_cast<double>(r.chern), r.residual,
             r.max_face_phase, static_cast<double>(rr.chern)});
      worst = std::max({worst, r.residual, rr.residual});
      last = r.chern;
      su.pass = su.pass && r.chern == c.n && rr.chern == -c.n && r.residual < 1e-9;
    } catch (const DomainError& e) {
      su.pass = false;
      su.details["level " + std::to_string(level)] = e.what();
    }
  }
  su.residuals = {{"rounding_residual", worst}, {"tolerance", 1e-9}};
  su.details["chern"] = last;
  su.tables.emplace_back("chern", t);
  return {su};
}

pathint::PathSpec parse_loop(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> v;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        v.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("--loop: bad number '" + item + "'");
      }
    }
  }
  if (kind == "latitude" && v.size() == 1) return pathint::PathSpec::latitude(v[0]);
  if (kind == "circle" && v.size() == 3) return pathint::PathSpec::circle({v[0], v[1]}, v[2]);
  if (kind == "segment" && v.size() == 4)
    return pathint::PathSpec::back_and_forth({v[0], v[1]}, {v[2], v[3]});
  throw ConfigError("--loop: expected latitude:r, circle:x,y,r or segment:x0,y0,x1,y1, got '" +
                    spec + "'");
}

std::vector<Suite> cmd_slice(const RunConfig& c) {
  const auto m = make_model(c);
  const auto path = parse_loop(c.loop);
  std::vector<std::size_t> levels;
  for (int l : c.levels) {
    if (l < 1) throw ConfigError("slice: --levels entries must be >= 1");
    levels.push_back(static_cast<std::size_t>(l));
  }
  const auto rows = pathint::holonomy_convergence(m, path, levels);
  Suite su{"holonomy", true, Json::object(), {}, {}};
  Table t{{"intervals", "phase_error", "modulus_deficiency", "order"}, {}};
  bool phase_down = true, def_down = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.add({static_cast<double>(rows[i].intervals), rows[i].phase_error,
           rows[i].modulus_deficiency, rows[i].order});
    if (i > 0) {
      phase_down = phase_down && rows[i].phase_error < rows[i - 1].phase_error;
      def_down = def_down && rows[i].modulus_deficiency < rows[i - 1].modulus_deficiency;
    }
  }
  const double order = rows.size() >= 2 ? pathint::empirical_order(rows) : 0.0;
  su.pass = phase_down && def_down && order >= 1.0;
  su.residuals = {{"empirical_order", order}, {"phase_monotone", phase_down},
                  {"deficiency_monotone", def_down}};
  su.details["oracle_phase"] = std::arg(pathint::connection_holonomy_oracle(m, path));
  su.tables.emplace_back("holonomy", t);
  std::vector<Suite> out{su};

  if (m.kind() == models::ModelKind::sphere) {
    const auto x = models::ChartPoint::main({0.2, 0.1}), y = models::ChartPoint::main({-0.3, 0.5});
    const quantize::ChartFunction f1 = quantize::coordinate(3);
    const quantize::ChartFunction f2 = [](const models::ChartPoint& p) {
      const double v = models::to_unit_vector(p)[0];
      return cplx{v * v, 0.0};
    };
    const auto r = pathint::cylinder_consistency(
        m, x, y, {{0.25, f1}, {0.5, f2}},
        {numerics::Partition::uniform(4), numerics::Partition::uniform(16)},
        qsettings(c, 1e-11));
    Suite cy{"cylinder", r.discrepancy < 1e-7, residual_json(r.discrepancy, 1e-7), {}, {}};
    cy.details = {{"matrix_kernel", {r.matrix_kernel.real(), r.matrix_kernel.imag()}},
                  {"partitions", {4, 16}}};
    out.push_back(std::move(cy));
  }
  return out;
}

std::vector<Suite> cmd_podles(const RunConfig& c) {
  const auto m = models::ModelSpace::podles(c.hbar);
  const auto& series = *std::get<models::Podles>(m.params()).series;
  Suite co{"coefficients", true, Json::object(), {}, {}};
  Table t{{"m", "c_m", "log_c_m"}, {}};
  bool positive = true;
  for (int i = 0; i < series.terms(); ++i) {
    const double lc = series.log_c[static_cast<std::size_t>(i)];
    t.add({static_cast<double>(i), std::exp(lc), lc});
    positive = positive && std::isfinite(lc);
  }
  co.pass = positive && series.truncation_bound <= 1e-13;
  co.residuals = {{"truncation_bound", series.truncation_bound}, {"tolerance", 1e-13}};
  co.details = {{"terms", series.terms()}, {"test_radius", series.test_radius}};
  co.tables.emplace_back("coefficients", t);
  std::vector<Suite> out{co};
  if (c.check == "all" || c.check == "axioms") {
    RunConfig v = c;
    v.model = "podles";
    for (auto& s : cmd_verify(v)) out.push_back(std::move(s));
  } else if (c.check != "coefficients") {
    throw ConfigError("podles: unknown --check '" + c.check + "'");
  }
  return out;
}

}  // namespace

void RunConfig::resolve() {
  if (levels.empty()) {
    if (command == "quantize") levels = {4, 8, 16, 32};
    if (command == "star") levels = {4, 8, 16};
    if (command == "chern") levels = {mesh};
    if (command == "slice") levels = {16, 32, 64, 128, 256};
  }
  if (check.empty()) {
    if (command == "quantize") check = "standard";
    if (command == "star" || command == "podles") check = "all";
  }
  if (command == "podles") model = "podles";
}

Json RunConfig::to_json() const {
  return Json{{"command", command}, {"model", model},   {"n", n},
              {"hbar", hbar},       {"k", k},           {"mesh", mesh},
              {"levels", levels},   {"samples", samples}, {"seed", seed},
              {"tol", tol},         {"threads", threads}, {"check", check},
              {"loop", loop},       {"out", out}};
}

report::Report run(const RunConfig& cfg) {
  report::Report rep;
  rep.config = cfg.to_json();
  if (cfg.command == "verify")
    rep.suites = cmd_verify(cfg);
  else if (cfg.command == "quantize")
    rep.suites = cmd_quantize(cfg);
  else if (cfg.command == "star")
    rep.suites = cmd_star(cfg);
  else if (cfg.command == "chern")
    rep.suites = cmd_chern(cfg);
  else if (cfg.command == "slice")
    rep.suites = cmd_slice(cfg);
  else if (cfg.command == "podles")
    rep.suites = cmd_podles(cfg);
  else
    throw ConfigError("unknown command '" + cfg.command + "'");
  return rep;
}

}  // namespace csq::cli
