#include <CLI11.hpp>
#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "csq/axioms.hpp"
#include "csq/chern.hpp"
#include "csq/error.hpp"
#include "csq/pathint.hpp"
#include "csq/quantize.hpp"
#include "csq/starprod.hpp"
#include "oracles.hpp"

using namespace csq;
using models::ChartPoint;
using models::ModelSpace;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

// max that keeps a NaN instead of dropping it
double worst(double a, double b) { return std::isnan(a) || std::isnan(b) ? NAN : std::max(a, b); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Test-side spin-n/2 coherent state in the |j, m> basis, index k = j + m:
// e^{-i phi Jz} e^{-i theta Jy} |j, j> up to a global phase.
Vector spin_state(int n, const oracle::Vec3& u) {
  const double th = std::acos(std::clamp(u[2], -1.0, 1.0)), ph = std::atan2(u[1], u[0]);
  const double c = std::cos(0.5 * th), s = std::sin(0.5 * th);
  Vector v(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
    v(k) = std::sqrt(binom) * std::pow(c, k) * std::pow(s, n - k) *
           std::polar(1.0, -(k - 0.5 * n) * ph);
  }
  return v;
}

struct Spin {
  Matrix j[3];
};

Spin spin(int n) {
  const double jj = 0.5 * n;
  Spin s;
  Matrix up = Matrix::Zero(n + 1, n + 1), jz = up;
  for (int k = 0; k <= n; ++k) {
    const double m = k - jj;
    jz(k, k) = m;
    if (k < n) up(k + 1, k) = std::sqrt(jj * (jj + 1) - m * (m + 1));
  }
  s.j[0] = 0.5 * (up + up.adjoint());
  s.j[1] = cplx{0, -0.5} * (up - up.adjoint());
  s.j[2] = jz;
  return s;
}

// Operators whose covariant symbols are x_i and x_i x_j (i != j, or i == j).
Matrix op_linear(const Spin& s, int n, int i) { return s.j[i] * (2.0 / n); }
Matrix op_quadratic(const Spin& s, int n, int i, int k) {
  const double jj = 0.5 * n;
  Matrix sym = 0.5 * (s.j[i] * s.j[k] + s.j[k] * s.j[i]);
  if (i == k) sym -= 0.5 * jj * Matrix::Identity(n + 1, n + 1);
  return sym / (jj * (jj - 0.5));
}

cplx symbol(const Matrix& a, const Vector& v) { return v.dot(a * v); }

// Sphere kernel written from the Bergman kernel (1 + conj(x) y)^n in the z chart.
cplx bergman_kernel(int n, cplx x, cplx y) {
  return std::pow(1.0 + std::conj(x) * y, n) /
         std::pow((1.0 + std::norm(x)) * (1.0 + std::norm(y)), 0.5 * n);
}

cplx z_of(const oracle::Vec3& u) { return cplx{u[0], u[1]} / (1.0 - u[2]); }

std::vector<oracle::Vec3> fibonacci(std::size_t count) {
  std::vector<oracle::Vec3> out;
  const double golden = oracle::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count, r = std::sqrt(1.0 - z * z);
    out.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst_spread = 0, worst_idem = 0, worst_oracle = 0;
  std::size_t min_pairs = 1000;
  for (int n : {1, 2, 3, 5, 8}) {
    const auto m = ModelSpace::sphere(n);
    axioms::SuiteOptions opt;
    opt.samples = 20;
    const auto rep = axioms::run_axiom_suite(m, opt);
    const auto s = axioms::make_samples(m, opt.samples, opt.seed);
    min_pairs = std::min(min_pairs, s.pairs.size());
    worst_spread = worst(worst_spread, rep.calibration_spread);
    o.require(std::abs(rep.calibration - 1.0) < 1e-8, "calibration constant 1 at n=" + std::to_string(n));
    for (const auto& c : rep.checks)
      if (c.name == "idempotence") worst_idem = worst(worst_idem, c.residuals.sup);
    o.require(rep.pass, "axiom suite at n=" + std::to_string(n));

    // (K * K)(x, y) by a fixed GL rule on the sphere, exact for this polynomial degree
    for (std::size_t p = 0; p < 4; ++p) {
      const cplx x = s.pairs[p].first.chart == models::ChartId::main ? s.pairs[p].first.z
                                                                     : 1.0 / s.pairs[p].first.z;
      const cplx y = s.pairs[p].second.chart == models::ChartId::main ? s.pairs[p].second.z
                                                                      : 1.0 / s.pairs[p].second.z;
      double re = 0, im = 0;
      re = oracle::sphere_integral([&](const oracle::Vec3& u) {
        return (bergman_kernel(n, x, z_of(u)) * bergman_kernel(n, z_of(u), y)).real();
      }, n + 4, 2 * n + 8);
      im = oracle::sphere_integral([&](const oracle::Vec3& u) {
        return (bergman_kernel(n, x, z_of(u)) * bergman_kernel(n, z_of(u), y)).imag();
      }, n + 4, 2 * n + 8);
      const cplx conv = (n + 1.0) / (4.0 * oracle::pi) * cplx{re, im};
      worst_oracle = worst(worst_oracle, std::abs(conv - bergman_kernel(n, x, y)));
      worst_oracle = worst(
          worst_oracle, std::abs(models::kernel(m, ChartPoint::main(x), ChartPoint::main(y)) -
                                 bergman_kernel(n, x, y)));
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst_spread < 1e-8, "calibration spread < 1e-8");
  o.require(worst_idem < 1e-8, "idempotence < 1e-8");
  o.require(min_pairs >= 20, ">= 20 pairs");
  o.require(worst_oracle < 1e-12, "independent convolution oracle");
  o.require(secs < 60, "runtime < 60 s");
  o.detail << "n in {1,2,3,5,8}: max spread " << worst_spread << ", max idempotence " << worst_idem
           << " over >= " << min_pairs << " pairs, oracle convolution deviation " << worst_oracle
           << ", " << secs << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  double worst_vol = 0, worst_res = 0;
  for (int n = 1; n <= 8; ++n) {
    const auto m = ModelSpace::sphere(n);
    const double expected =
        (n + 1.0) / (4.0 * oracle::pi) * oracle::sphere_integral([](const oracle::Vec3&) { return 1.0; });
    const auto vol = quantize::volume(m);
    const auto r = quantize::resolution_of_identity(m);
    worst_vol = worst(worst_vol, std::abs(vol.value.real() - expected));
    worst_res = worst(worst_res, r.residual);
    o.require(std::abs(expected - (n + 1)) < 1e-12, "oracle volume");
    o.require(std::abs(r.trace.real() - (n + 1)) < 1e-7, "trace = n+1");
  }
  o.require(worst_vol < 1e-7, "volume = n+1 within 1e-7");
  o.require(worst_res < 1e-8, "resolution residual < 1e-8");
  o.detail << "n <= 8: max |Vol - (n+1)| " << worst_vol << ", max resolution residual " << worst_res;
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto m = ModelSpace::sphere(1);
  Matrix sp = Matrix::Zero(2, 2), sm = sp, s3 = sp;
  sp(1, 0) = 1.0;
  sm(0, 1) = 1.0;
  s3(0, 0) = -1.0;
  s3(1, 1) = 1.0;
  const auto rp = quantize::covariant_symbol(quantize::QuantOperator::external(sp, "sigma+"));
  const auto rm = quantize::covariant_symbol(quantize::QuantOperator::external(sm, "sigma-"));
  const auto r3 = quantize::covariant_symbol(quantize::QuantOperator::external(s3, "sigma3"));
  double dp = 0, dm = 0, d3 = 0, half = 0, bound = 0;
  for (const auto& u : fibonacci(50)) {
    const auto x = models::from_unit_vector(u);
    const cplx w{u[0], u[1]};
    dp = worst(dp, std::abs(rp(x) - w));
    dm = worst(dm, std::abs(rm(x) - std::conj(w)));
    d3 = worst(d3, std::abs(r3(x) - u[2]));
    half = worst(half, worst(std::abs(rp(x) - 0.5 * w), std::abs(rm(x) - 0.5 * std::conj(w))));
    bound = worst(bound, std::abs(rp(x)));
  }
  o.require(dp < 1e-10, "sigma+ -> x1+ix2");
  o.require(dm < 1e-10, "sigma- -> x1-ix2");
  o.require(d3 < 1e-10, "sigma3 -> x3");
  o.detail << "50 points: |rho(sigma+) - (x1+ix2)| " << dp << ", |rho(sigma-) - (x1-ix2)| " << dm
           << ", |rho(sigma3) - x3| " << d3 << "; observed rho(sigma+-) = (x1+-ix2)/2 to " << half
           << ", and |rho(sigma+)| <= " << bound << " < 1 = max|x1+ix2| (operator norm bound)";
  return o;
}

Outcome criterion4() {
  using starprod::GaussRational;
  using starprod::Rational;
  using starprod::SpherePoly;
  Outcome o;
  const SpherePoly x[3] = {SpherePoly::coordinate(1), SpherePoly::coordinate(2),
                           SpherePoly::coordinate(3)};
  const SpherePoly one = SpherePoly::constant(GaussRational(1));
  const GaussRational i = GaussRational::i_unit();
  int identities = 0;
  double float_dev = 0;
  for (int n : {1, 2, 4}) {
    const GaussRational inv(Rational(1, n));
    auto Q = [&](const SpherePoly& p) { return starprod::poly_to_coeff(p, n); };
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      const bool ok = starprod::star(Q(x[a]), Q(x[a])) ==
                      Q(x[a] * x[a] + inv * (x[b] * x[b] + x[c] * x[c]));
      o.require(ok, "x" + std::to_string(a + 1) + "*x" + std::to_string(a + 1) + " at n=" + std::to_string(n));
      identities += ok;
    }
    const SpherePoly w = x[0] + i * x[1], wb = x[0] - i * x[1];
    const bool p1 = starprod::star(Q(w), Q(wb)) ==
                    Q(x[0] * x[0] + x[1] * x[1] + inv * (one + x[2]) * (one + x[2]));
    const bool p2 = starprod::star(Q(wb), Q(w)) ==
                    Q(x[0] * x[0] + x[1] * x[1] + inv * (one - x[2]) * (one - x[2]));
    o.require(p1 && p2, "(x1+-ix2) products at n=" + std::to_string(n));
    identities += p1 + p2;

    // the exact product agrees with spin-operator products evaluated on spin coherent states
    if (n >= 2) {
      const Spin s = spin(n);
      const auto prod = starprod::star(Q(x[0]), Q(x[2]));
      const Matrix ref = op_linear(s, n, 0) * op_linear(s, n, 2);
      for (const auto& u : fibonacci(12))
        float_dev = worst(float_dev, std::abs(prod.evaluate(u) - symbol(ref, spin_state(n, u))));
    }
  }
  o.require(float_dev < 1e-12, "spin-operator cross-check");
  o.detail << identities << "/15 identities hold exactly in rational arithmetic for n in {1,2,4}; "
           << "x1*x3 vs spin-operator product max deviation " << float_dev;
  return o;
}

Outcome criterion5() {
  using starprod::SpherePoly;
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  struct Pair {
    std::string name;
    SpherePoly p, q;
    std::function<Matrix(const Spin&, int)> P, Q;
    std::function<double(const oracle::Vec3&)> fp, fq;
    std::function<oracle::Vec3(const oracle::Vec3&)> gp, gq;
  };
  const SpherePoly x1 = SpherePoly::coordinate(1), x2 = SpherePoly::coordinate(2),
                   x3 = SpherePoly::coordinate(3);
  auto quad = [](int i, int k) {
    return [i, k](const Spin& s, int n) { return op_quadratic(s, n, i, k); };
  };
  auto mono = [](int i, int k) { return [i, k](const oracle::Vec3& u) { return u[i] * u[k]; }; };
  auto grad = [](int i, int k) {
    return [i, k](const oracle::Vec3& u) {
      oracle::Vec3 g{0, 0, 0};
      g[i] += u[k];
      g[k] += u[i];
      return g;
    };
  };
  const std::vector<Pair> pairs{
      {"(x3^2, x1 x2)", x3 * x3, x1 * x2, quad(2, 2), quad(0, 1), mono(2, 2), mono(0, 1), grad(2, 2), grad(0, 1)},
      {"(x1 x3, x2^2)", x1 * x3, x2 * x2, quad(0, 2), quad(1, 1), mono(0, 2), mono(1, 1), grad(0, 2), grad(1, 1)},
      {"(x1^2, x2 x3)", x1 * x1, x2 * x3, quad(0, 0), quad(1, 2), mono(0, 0), mono(1, 2), grad(0, 0), grad(1, 2)},
      {"(x1 x2, x2 x3)", x1 * x2, x2 * x3, quad(0, 1), quad(1, 2), mono(0, 1), mono(1, 2), grad(0, 1), grad(1, 2)}};
  const std::vector<int> levels{4, 8, 16};
  const auto samples = fibonacci(60);
  // kappa from [J1, J2] = i J3; gamma from x_i * x_i - x_i^2 = (1 - x_i^2) / n
  const double kappa = 2.0, gamma = 2.0;
  int good = 0;
  double agree = 0;
  std::ostringstream table;
  for (const auto& pr : pairs) {
    std::vector<double> E;
    for (int n : levels) {
      const Spin s = spin(n);
      const Matrix PQ = pr.P(s, n) * pr.Q(s, n);
      double e = 0;
      for (const auto& u : samples) {
        const auto gp = pr.gp(u), gq = pr.gq(u);
        oracle::Vec3 tp, tq;
        const double dp = oracle::dot(gp, u), dq = oracle::dot(gq, u);
        for (int a = 0; a < 3; ++a) {
          tp[a] = gp[a] - dp * u[a];
          tq[a] = gq[a] - dq * u[a];
        }
        const oracle::Vec3 cr{gp[1] * gq[2] - gp[2] * gq[1], gp[2] * gq[0] - gp[0] * gq[2],
                              gp[0] * gq[1] - gp[1] * gq[0]};
        const double pb = kappa * oracle::dot(u, cr), g = gamma * oracle::dot(tp, tq);
        const cplx first = cplx{0, 1} / (2.0 * n) * (pb - cplx{0, 1} * g);
        e = worst(e, std::abs(symbol(PQ, spin_state(n, u)) - pr.fp(u) * pr.fq(u) - first));
      }
      E.push_back(e);
    }
    const auto lib = starprod::semiclassical_check(pr.p, pr.q, levels, starprod::sphere_samples(60));
    bool ok = E[0] > 1e-12;
    table << pr.name << " E=";
    for (std::size_t k = 0; k < E.size(); ++k) {
      table << E[k] << (k + 1 < E.size() ? "," : "");
      if (k > 0) ok = ok && E[k] / E[k - 1] >= 0.15 && E[k] / E[k - 1] <= 0.35;
      if (k > 0) ok = ok && lib.rows[k].ratio >= 0.15 && lib.rows[k].ratio <= 0.35;
    }
    table << " ratios " << E[1] / E[0] << "," << E[2] / E[1] << " (library " << lib.rows[1].ratio
          << "," << lib.rows[2].ratio << "); ";
    agree = worst(agree, std::abs(lib.constants.kappa - kappa) + std::abs(lib.constants.gamma - gamma));
    good += ok;
  }
  const double secs = seconds_since(t0);
  o.require(good >= 3, "at least 3 pairs with E(2n)/E(n) in [0.15, 0.35]");
  o.require(agree < 1e-12, "library bracket constants");
  o.require(secs < 120, "runtime < 120 s");
  o.detail << good << "/" << pairs.size() << " pairs in band; " << table.str() << secs << " s";
  return o;
}

Outcome criterion6() {
  Outcome o;
  double worst_res = 0;
  int runs = 0;
  for (int n : {1, 3, 5}) {
    const auto m = ModelSpace::sphere(n);
    for (int level = 2; level <= 4; ++level) {
      const auto mesh = numerics::icosphere(level);
      const auto r = chern::chern_number(m, mesh);
      const auto rr = chern::chern_number(m, mesh.reversed());
      o.require(r.chern == n && rr.chern == -n, "C = n, reversed -n at n=" + std::to_string(n));
      worst_res = worst(worst(worst_res, r.residual), rr.residual);
      ++runs;
      if (level == 2) {
        // independent face sum with test-side spinors, K(a, b) = <psi_b, psi_a>
        double raw = 0;
        for (const auto& f : mesh.faces) {
          const Vector a = spin_state(1, mesh.vertices[f[0]]), b = spin_state(1, mesh.vertices[f[1]]),
                       c = spin_state(1, mesh.vertices[f[2]]);
          raw += std::arg(std::pow(b.dot(a) * c.dot(b) * a.dot(c), n));
        }
        raw /= 2.0 * oracle::pi;
        o.require(std::abs(raw - r.raw) < 1e-9, "oracle face sum");
      }
    }
  }
  o.require(worst_res < 1e-9, "rounding residual < 1e-9");
  o.detail << runs << " runs (n in {1,3,5}, levels 2-4): C = n, reversed = -n, max residual " << worst_res;
  return o;
}

Outcome criterion7() {
  Outcome o;
  const std::vector<int> levels{4, 8, 16, 32};
  const auto samples = starprod::sphere_samples(30);
  struct F {
    std::string name;
    quantize::ChartFunction f;
    int degree;
    std::function<double(const oracle::Vec3&)> harmonic;  // f minus its mean
  };
  const std::vector<F> fs{
      {"x1", quantize::coordinate(1), 1, [](const oracle::Vec3& u) { return u[0]; }},
      {"x3", quantize::coordinate(3), 1, [](const oracle::Vec3& u) { return u[2]; }},
      {"x1^2",
       [](const ChartPoint& x) {
         const double v = models::to_unit_vector(x)[0];
         return cplx{v * v, 0.0};
       },
       2, [](const oracle::Vec3& u) { return u[0] * u[0] - 1.0 / 3.0; }}};
  double worst_oracle = 0;
  for (const auto& f : fs) {
    const auto rows = quantize::berezin_transform_limit(f.f, levels, samples);
    bool mono = true;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      double ref = 0;
      for (const auto& u : samples)
        ref = worst(ref, (1.0 - oracle::berezin_eigenvalue(levels[k], f.degree)) * std::abs(f.harmonic(u)));
      worst_oracle = worst(worst_oracle, std::abs(rows[k].error - ref));
      if (k > 0) mono = mono && rows[k].error < rows[k - 1].error;
      const double lx = std::log2(levels[k]), ly = std::log2(ref);
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    const double K = static_cast<double>(rows.size());
    const double ratio_oracle = std::exp2((K * sxy - sx * sy) / (K * sxx - sx * sx));
    const double ratio = quantize::halving_ratio(rows);
    o.require(mono, f.name + " monotone");
    o.require(std::abs(ratio - 0.5) <= 0.15, f.name + " halving ratio");
    o.detail << f.name << ": errors";
    for (const auto& r : rows) o.detail << " " << r.error;
    o.detail << ", ratio " << ratio << " (oracle " << ratio_oracle << "); ";
  }
  o.require(worst_oracle < 1e-8, "errors match closed-form Berezin eigenvalues");
  o.detail << "max deviation from closed form " << worst_oracle;
  return o;
}

Outcome criterion8() {
  Outcome o;
  struct Case {
    std::string name;
    ModelSpace m;
    double expected_c;
  };
  const std::vector<Case> cases{{"plane(hbar=1)", ModelSpace::plane(1.0), 2.0},
                                {"halfplane(k=4)", ModelSpace::half_plane(4), 1.0 / oracle::half_plane_mass(4)}};
  for (const auto& c : cases) {
    axioms::SuiteOptions opt;
    opt.samples = 20;
    const auto rep = axioms::run_axiom_suite(c.m, opt);
    const auto s = axioms::make_samples(c.m, opt.samples);
    std::map<std::string, const axioms::AxiomCheck*> by;
    for (const auto& k : rep.checks) by[k.name] = &k;
    o.require(by.count("idempotence") && by.count("isometry_delta") && by.count("isometry_modulus"),
              c.name + " checks present");
    if (!o.pass) return o;
    const auto& idem = *by["idempotence"];
    const double dc = std::abs(rep.calibration - c.expected_c) / c.expected_c;
    o.require(rep.calibration_spread < 1e-6, c.name + " calibration stable in x");
    o.require(dc < 1e-6, c.name + " calibration vs oracle");
    o.require(idem.residuals.sup < 1e-6, c.name + " idempotence");
    o.require(idem.residuals.max_tail_bound < 1e-10, c.name + " certified tail");
    o.require(by["isometry_delta"]->residuals.sup < 1e-10 && by["isometry_modulus"]->residuals.sup < 1e-10,
              c.name + " isometry invariance");
    o.require(s.triples.size() >= 20 && axioms::sample_isometries(c.m).size() >= 5,
              c.name + " 20 triples x 5 isometries");
    o.detail << c.name << ": c = " << rep.calibration << " (oracle " << c.expected_c << ", spread "
             << rep.calibration_spread << "), idempotence " << idem.residuals.sup << ", tail "
             << idem.residuals.max_tail_bound << ", invariance " << by["isometry_delta"]->residuals.sup
             << "/" << by["isometry_modulus"]->residuals.sup << " over " << s.triples.size() << "x"
             << axioms::sample_isometries(c.m).size() << "; ";
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double hbar = 1.0;
  const auto c = models::podles_coefficients(hbar, 10);
  double worst_rel = 0;
  for (int k = 0; k <= 10; ++k) {
    const double ref = oracle::podles_coefficient(hbar, k);
    worst_rel = worst(worst_rel, std::abs(c[k] - ref) / ref);
  }
  const auto m = ModelSpace::podles(hbar);
  const auto& series = *std::get<models::Podles>(m.params()).series;
  const auto rep = axioms::run_axiom_suite(m);
  double herm = -1, idem = -1;
  for (const auto& k : rep.checks) {
    if (k.name == "hermiticity") herm = k.residuals.sup;
    if (k.name == "idempotence") idem = k.residuals.sup;
  }
  const double secs = seconds_since(t0);
  o.require(worst_rel < 1e-10, "c_n relative error");
  o.require(herm == 0.0, "hermiticity exact");
  o.require(idem >= 0 && idem < 1e-4, "calibrated idempotence < 1e-4");
  o.require(std::isfinite(series.truncation_bound), "truncation bound reported");
  o.require(secs < 300, "runtime < 5 min");
  o.detail << "c_0..c_10 max relative error vs direct quadrature " << worst_rel << ", hermiticity "
           << herm << ", idempotence " << idem << ", series N = " << series.terms() - 1
           << " truncation bound " << series.truncation_bound << ", calibration "
           << rep.calibration << ", " << secs << " s";
  return o;
}

Outcome criterion10() {
  Outcome o;
  const auto m = ModelSpace::quartic_leaf(1.0);
  const auto rep = axioms::run_axiom_suite(m);
  const auto s = axioms::make_samples(m, 12);
  double min_r = 1e300;
  for (const auto& p : s.points) min_r = std::min(min_r, std::abs(p.z));
  std::map<std::string, double> sup;
  for (const auto& k : rep.checks) sup[k.name] = k.residuals.sup;
  o.require(sup["unit_diagonal"] <= 1e-10 && sup["hermiticity"] <= 1e-10, "pointwise axioms 1e-10");
  o.require(sup["contraction"] < 1.0, "strict contraction");
  o.require(sup["idempotence"] < 1e-4, "idempotence < 1e-4");
  o.require(min_r > 0.1, "samples away from the origin");
  // leaf reduction against the substitution lambda = (y - x) / (2 x y |x|^2) for real x, y
  const double lam = models::leaf_reduce_quartic(ChartPoint::main(1.0), ChartPoint::main(2.0)).lambda.real();
  o.require(std::abs(lam - 0.5) < 1e-15, "leaf reduction oracle");
  o.detail << "unit diagonal " << sup["unit_diagonal"] << ", hermiticity " << sup["hermiticity"]
           << ", contraction " << sup["contraction"] << ", idempotence " << sup["idempotence"]
           << ", min |z| " << min_r << ", calibration " << rep.calibration;
  return o;
}

Outcome criterion11() {
  Outcome o;
  const int n = 2;
  const double r = 0.7;
  const auto m = ModelSpace::sphere(n);
  const auto path = pathint::PathSpec::latitude(r);
  const cplx oracle_h = pathint::connection_holonomy_oracle(m, path);
  const double oracle_dev = std::abs(oracle_h - std::polar(1.0, oracle::latitude_phase(n, r)));
  const auto rows = pathint::holonomy_convergence(m, path, {16, 32, 64, 128, 256});
  bool phase_down = true, def_down = true;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    phase_down = phase_down && rows[k].phase_error < rows[k - 1].phase_error;
    def_down = def_down && rows[k].modulus_deficiency < rows[k - 1].modulus_deficiency;
  }
  const double order = pathint::empirical_order(rows);
  const double def_order = std::log2(rows[rows.size() - 2].modulus_deficiency / rows.back().modulus_deficiency);

  const ChartPoint x = ChartPoint::main({0.2, 0.1}), y = ChartPoint::main({-0.3, 0.5});
  const quantize::ChartFunction sq = [](const ChartPoint& p) {
    const double v = models::to_unit_vector(p)[0];
    return cplx{v * v, 0.0};
  };
  const auto cyl = pathint::cylinder_consistency(
      m, x, y, {{0.25, quantize::coordinate(3)}, {0.5, sq}},
      {numerics::Partition::uniform(4), numerics::Partition::uniform(16)});
  // test-side <v_y, Q_{x1^2} Q_{x3} v_x> with operators from spin matrices
  const Spin s = spin(n);
  const Matrix Q3 = op_linear(s, n, 2) * (n / (n + 2.0));
  const double l2 = oracle::berezin_eigenvalue(n, 2);
  const Matrix Q11 = l2 * op_quadratic(s, n, 0, 0) + (1.0 - l2) / 3.0 * Matrix::Identity(n + 1, n + 1);
  const Vector vx = spin_state(n, models::to_unit_vector(x)), vy = spin_state(n, models::to_unit_vector(y));
  const double gauge = std::abs(vy.dot(Q11 * Q3 * vx)) - std::abs(cyl.matrix_kernel);

  o.require(oracle_dev < 1e-9, "connection oracle vs analytic holonomy");
  o.require(phase_down, "phase error decreasing");
  o.require(order >= 1.0, "empirical order >= 1");
  o.require(def_down && def_order > 0.8 && rows.back().modulus_deficiency < 0.05,
            "modulus deficiency -> 0");
  o.require(cyl.discrepancy < 1e-7, "cylinder two-path agreement");
  o.require(std::abs(gauge) < 1e-12, "cylinder matrix kernel vs spin-operator oracle");
  o.detail << "oracle vs exp(i n 2 pi r^2/(1+r^2)) " << oracle_dev << "; phase errors";
  for (const auto& row : rows) o.detail << " " << row.phase_error;
  o.detail << ", order " << order << "; deficiency " << rows.front().modulus_deficiency << " -> "
           << rows.back().modulus_deficiency << "; cylinder discrepancy " << cyl.discrepancy
           << " (|kernel| vs spin oracle " << std::abs(gauge) << ")";
  return o;
}

Outcome criterion12() {
  Outcome o;
  double worst_res = 0, worst_comm = 0, worst_dev = 0, worst_oracle = 0;
  for (int j2 : {1, 2, 4}) {
    const auto r = quantize::su2_schur_check(j2);
    worst_res = worst(worst_res, r.residual);
    worst_comm = worst(worst_comm, r.commutator);
    worst_dev = worst(worst_dev, r.conjugation_deviation);
    // test-side: GL-integrated spin coherent projectors give the identity
    Matrix I = Matrix::Zero(j2 + 1, j2 + 1);
    const auto g = oracle::gauss_legendre(j2 + 3);
    const int np = 2 * j2 + 6;
    for (std::size_t a = 0; a < g.x.size(); ++a)
      for (int b = 0; b < np; ++b) {
        const double st = std::sqrt(1 - g.x[a] * g.x[a]), ph = 2 * oracle::pi * (b + 0.5) / np;
        const Vector v = spin_state(j2, {st * std::cos(ph), st * std::sin(ph), g.x[a]});
        I += g.w[a] * (2 * oracle::pi / np) * (j2 + 1) / (4 * oracle::pi) * v * v.adjoint();
      }
    worst_oracle = worst(worst_oracle, (I - Matrix::Identity(j2 + 1, j2 + 1)).cwiseAbs().maxCoeff());
  }
  o.require(worst_res < 1e-8, "rescaled integral = 1 within 1e-8");
  o.require(worst_comm < 1e-8, "generator commutation < 1e-8");
  o.require(worst_oracle < 1e-12, "oracle resolution");
  o.detail << "j2 in {1,2,4}: max residual " << worst_res << ", max commutator " << worst_comm
           << ", orbit-map deviation " << worst_dev << ", oracle identity deviation " << worst_oracle;
  return o;
}

Outcome criterion13() {
  Outcome o;
  double worst_lib = 0, worst_oracle = 0;
  const auto pts = fibonacci(32);
  for (int n = 1; n <= 5; ++n) {
    const auto m = ModelSpace::sphere(n);
    std::vector<std::pair<ChartPoint, ChartPoint>> pairs;
    std::vector<std::array<ChartPoint, 3>> triples;
    for (std::size_t k = 0; k < 30; ++k) {
      const auto a = models::from_unit_vector(pts[k]), b = models::from_unit_vector(pts[k + 1]),
                 c = models::from_unit_vector(pts[k + 2]);
      pairs.emplace_back(a, b);
      triples.push_back({a, b, c});
    }
    const auto family = [&](const ChartPoint& x) { return quantize::coherent_projection(m, x); };
    const auto rt = quantize::reconstruct_propagator(m, family, pairs, triples);
    worst_lib = worst(worst(worst_lib, rt.sup_modulus), rt.sup_delta);
    // basis-free: tr(q_x q_y) = |Omega|^2 and tr(q_x q_z q_y) = Delta(x, y, z)
    for (std::size_t k = 0; k < 30; ++k) {
      const auto& t = triples[k];
      const auto qx = family(t[0]).entries, qy = family(t[1]).entries, qz = family(t[2]).entries;
      const auto ux = models::to_unit_vector(t[0]), uy = models::to_unit_vector(t[1]),
                 uz = models::to_unit_vector(t[2]);
      worst_oracle = worst(worst_oracle,
                              std::abs((qx * qy).trace().real() - oracle::sphere_modulus_sq(n, ux, uy)));
      // K(a, b) = <psi_b, psi_a>
      const Vector px = spin_state(1, ux), py = spin_state(1, uy), pz = spin_state(1, uz);
      const cplx d_oracle = std::pow(py.dot(px) * pz.dot(py) * px.dot(pz), n);
      const cplx d_lib = chern::delta(m, t[0], t[1], t[2]);
      worst_oracle = worst(worst_oracle, std::abs(d_lib - d_oracle));
      const cplx d_ops = (qx * qz * qy).trace();
      worst_oracle = worst(worst_oracle, std::abs(d_ops - d_lib));
    }
  }
  o.require(worst_lib < 1e-10, "reconstructed |Omega| and Delta within 1e-10");
  o.require(worst_oracle < 1e-12, "trace oracle");
  o.detail << "n <= 5, 30 pairs/triples: max reconstruction residual " << worst_lib
           << ", trace oracle deviation " << worst_oracle;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int which = 0;
  app.add_option("--criterion", which, "Criterion number, 0 for all")->check(CLI::Range(0, 13));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> all{
      criterion1, criterion2, criterion3,  criterion4,  criterion5,  criterion6, criterion7,
      criterion8, criterion9, criterion10, criterion11, criterion12, criterion13};
  bool ok = true;
  for (int k = 1; k <= 13; ++k) {
    if (which != 0 && which != k) continue;
    Outcome out;
    try {
      out = all[k - 1]();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    std::printf("criterion %d %s: %s\n", k, out.pass ? "PASS" : "FAIL", out.detail.str().c_str());
    std::fflush(stdout);
    ok = ok && out.pass;
  }
  return ok ? 0 : 1;
}
