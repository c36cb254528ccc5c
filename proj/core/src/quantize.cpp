#include "csq/quantize.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "csq/error.hpp"

namespace csq::quantize {

namespace {

void require_sphere(const ModelSpace& m, const char* op) {
  if (m.kind() != models::ModelKind::sphere) {
    std::ostringstream msg;
    msg << op << ": needs a sphere model, got " << m.describe();
    throw ConfigError(msg.str());
  }
}

cplx ipow(cplx b, int k) {
  cplx r{1.0, 0.0};
  for (; k > 0; k >>= 1, b *= b)
    if (k & 1) r *= b;
  return r;
}

models::IntegrationRequest request(const QuantSettings& s) {
  models::IntegrationRequest req;
  req.abs_tol = s.abs_tol;
  req.threads = s.threads;
  req.max_depth = s.max_depth;
  return req;
}

}  // namespace

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double basis_coefficient(int n, int k) {
  return std::sqrt((n + 1.0) / (2.0 * kPi * n) * binomial(n, k));
}

cplx basis_section(int n, int k, cplx z) { return basis_coefficient(n, k) * ipow(z, k); }

Vector coherent_vector(int n, const ChartPoint& x) {
  // spinor = (q, p) / |.| with z = p / q
  const auto s = models::spinor(x);
  const cplx qb = std::conj(s[0]), pb = std::conj(s[1]);
  Vector v(n + 1);
  for (int k = 0; k <= n; ++k) v(k) = std::sqrt(binomial(n, k)) * ipow(pb, k) * ipow(qb, n - k);
  return v;
}

bool QuantOperator::is_hermitian(double tol) const {
  return max_abs(entries - entries.adjoint()) <= tol;
}

QuantOperator QuantOperator::external(Matrix m, std::string label) {
  return {std::move(m), std::move(label), OperatorTag::external};
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

MatrixIntegral integrate_matrix(const ModelSpace& m,
                                const std::function<Matrix(const ChartPoint&)>& f, int rows,
                                const QuantSettings& s) {
  const auto est = models::integrate_over(m, f, request(s), Matrix::Zero(rows, rows).eval(),
                                          [](const Matrix& a) { return max_abs(a); });
  return {est.value, est.error, est.cells};
}

MatrixIntegral gram_matrix(const ModelSpace& m, const QuantSettings& s) {
  require_sphere(m, "gram_matrix");
  const int n = m.level();
  std::vector<double> a(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) a[static_cast<std::size_t>(k)] = basis_coefficient(n, k);
  const double scale = 2.0 * kPi * n / (n + 1.0);
  // conj(Psi_j) Psi_k h = a_j a_k conj(w_j) w_k with w_k = p^k q^(n-k) on the unit spinor
  auto integrand = [&](const ChartPoint& x) {
    const auto sp = models::spinor(x);
    Vector w(n + 1);
    for (int k = 0; k <= n; ++k)
      w(k) = a[static_cast<std::size_t>(k)] * ipow(sp[1], k) * ipow(sp[0], n - k);
    Matrix g = (scale * w.conjugate()) * w.transpose();
    return g;
  };
  return integrate_matrix(m, integrand, n + 1, s);
}

QuantOperator coherent_projection(const ModelSpace& m, const ChartPoint& x) {
  require_sphere(m, "coherent_projection");
  models::validate(m, x);
  const Vector v = coherent_vector(m.level(), x);
  std::ostringstream label;
  label << "q(" << x.z.real() << (x.chart == models::ChartId::main ? "," : ",sec,")
        << x.z.imag() << ")";
  return {v * v.adjoint(), label.str(), OperatorTag::coherent_projection};
}

models::ModelIntegral<cplx> volume(const ModelSpace& m, const QuantSettings& s) {
  return models::integrate_scalar(m, [](const ChartPoint&) { return cplx{1.0, 0.0}; },
                                  request(s));
}

Resolution resolution_of_identity(const ModelSpace& m, const QuantSettings& s) {
  require_sphere(m, "resolution_of_identity");
  const int n = m.level();
  const auto est = integrate_matrix(
      m,
      [n](const ChartPoint& x) {
        const Vector v = coherent_vector(n, x);
        Matrix q = v * v.adjoint();
        return q;
      },
      n + 1, s);
  Resolution r;
  r.integral = est.value;
  r.residual = max_abs(est.value - Matrix::Identity(n + 1, n + 1));
  r.trace = est.value.trace();
  r.quadrature_error = est.error;
  r.volume = volume(m, s).value.real();
  return r;
}

ChartFunction coordinate(int i) {
  if (i < 1 || i > 3) throw ConfigError("coordinate index must be 1, 2 or 3");
  return [i](const ChartPoint& x) {
    return cplx{models::to_unit_vector(x)[static_cast<std::size_t>(i - 1)], 0.0};
  };
}

QuantOperator build_Q(const ModelSpace& m, const ChartFunction& f, const std::string& label,
                      const QuantSettings& s) {
  require_sphere(m, "build_Q");
  const int n = m.level();
  auto integrand = [&](const ChartPoint& x) {
    const cplx fx = f(x);
    if (!std::isfinite(fx.real()) || !std::isfinite(fx.imag())) {
      std::ostringstream msg;
      msg << "build_Q: " << label << " is not finite at " << x.z;
      throw DomainError(msg.str());
    }
    const Vector v = coherent_vector(n, x);
    Matrix q = (fx * v) * v.adjoint();
    return q;
  };
  return {integrate_matrix(m, integrand, n + 1, s).value, label, OperatorTag::toeplitz};
}

cplx CovariantSymbol::operator()(const ChartPoint& x) const {
  const Vector v = coherent_vector(op_.dim() - 1, x);
  return v.dot(op_.entries * v);
}

CovariantSymbol covariant_symbol(const QuantOperator& a) { return CovariantSymbol(a); }

cplx hs_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace(); }

cplx symbol_pairing(const ModelSpace& m, const QuantOperator& a, const ChartFunction& f,
                    const QuantSettings& s) {
  require_sphere(m, "symbol_pairing");
  if (a.dim() != m.level() + 1) throw ConfigError("symbol_pairing: dimension mismatch");
  const CovariantSymbol rho(a);
  return models::integrate_scalar(
             m, [&](const ChartPoint& x) { return std::conj(rho(x)) * f(x); }, request(s))
      .value;
}

std::vector<BerezinRow> berezin_transform_limit(const ChartFunction& f,
                                                const std::vector<int>& levels,
                                                const std::vector<numerics::Vec3>& samples,
                                                const QuantSettings& s) {
  std::vector<BerezinRow> rows;
  for (int n : levels) {
    const auto m = ModelSpace::sphere(n);
    const CovariantSymbol rho(build_Q(m, f, "f", s));
    BerezinRow row{n, 0.0};
    for (const auto& p : samples) {
      const auto x = models::from_unit_vector(p);
      row.error = std::max(row.error, std::abs(rho(x) - f(x)));
    }
    rows.push_back(row);
  }
  return rows;
}

double halving_ratio(const std::vector<BerezinRow>& rows) {
  if (rows.size() < 2) throw ConfigError("halving_ratio: need at least two levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double x = std::log2(static_cast<double>(r.n)), y = std::log2(r.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(rows.size());
  return std::exp2((k * sxy - sx * sy) / (k * sxx - sx * sx));
}

Vector range_vector(const QuantOperator& q) {
  Eigen::Index best = 0;
  q.entries.colwise().norm().maxCoeff(&best);
  Vector e = q.entries.col(best);
  return e / e.norm();
}

cplx reconstructed_kernel(const QuantOperator& qx, const QuantOperator& qy) {
  return range_vector(qy).dot(range_vector(qx));
}

RoundTrip reconstruct_propagator(
    const ModelSpace& m, const std::function<QuantOperator(const ChartPoint&)>& q_family,
    const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
    const std::vector<std::array<ChartPoint, 3>>& triples) {
  RoundTrip out;
  for (const auto& [x, y] : pairs) {
    const double want = models::eval_propagator(m, x, y).weighted_modulus;
    const double got = std::abs(reconstructed_kernel(q_family(x), q_family(y)));
    out.modulus.push_back(std::abs(got - want));
    out.sup_modulus = std::max(out.sup_modulus, out.modulus.back());
  }
  for (const auto& t : triples) {
    const auto qx = q_family(t[0]), qy = q_family(t[1]), qz = q_family(t[2]);
    const cplx got = reconstructed_kernel(qx, qy) * reconstructed_kernel(qy, qz) *
                     reconstructed_kernel(qz, qx);
    const cplx want = models::kernel(m, t[0], t[1]) * models::kernel(m, t[1], t[2]) *
                      models::kernel(m, t[2], t[0]);
    out.delta.push_back(std::abs(got - want));
    out.sup_delta = std::max(out.sup_delta, out.delta.back());
  }
  return out;
}

SpinMatrices spin_matrices(int j2) {
  if (j2 < 0) throw ConfigError("spin_matrices: j2 must be >= 0");
  const int d = j2 + 1;
  const double j = 0.5 * j2;
  Matrix jp = Matrix::Zero(d, d);
  SpinMatrices s{Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
  for (int k = 0; k < d; ++k) {
    const double mm = k - j;
    s.jz(k, k) = mm;
    if (k + 1 < d) jp(k + 1, k) = std::sqrt(j * (j + 1.0) - mm * (mm + 1.0));
  }
  const Matrix jm = jp.adjoint();
  s.jx = 0.5 * (jp + jm);
  s.jy = cplx{0.0, -0.5} * (jp - jm);
  return s;
}

SchurResult su2_schur_check(int j2, const QuantSettings& s) {
  if (j2 < 1) throw ConfigError("su2_schur_check: j2 must be >= 1");
  const int d = j2 + 1;
  const SpinMatrices J = spin_matrices(j2);
  const Eigen::SelfAdjointEigenSolver<Matrix> ey(J.jy);
  Vector top = Vector::Zero(d);
  top(d - 1) = 1.0;
  // exp(-i phi Jz) exp(-i theta Jy) |j, j>
  auto orbit_state = [&](double theta, double phi) {
    const Vector ph = (cplx{0.0, -1.0} * theta * ey.eigenvalues().cast<cplx>()).array().exp();
    Vector v = ey.eigenvectors() * ph.asDiagonal() * ey.eigenvectors().adjoint() * top;
    for (int k = 0; k < d; ++k) v(k) *= std::polar(1.0, -phi * J.jz(k, k).real());
    return v;
  };
  numerics::AdaptiveOptions opt;
  opt.abs_tol = s.abs_tol;
  opt.threads = s.threads;
  opt.max_depth = s.max_depth;
  const auto est = numerics::integrate_rect(
      [&](double theta, double phi) {
        const Vector v = orbit_state(theta, phi);
        Matrix q = (std::sin(theta) * v) * v.adjoint();
        return q;
      },
      numerics::Rect{0.0, kPi, 0.0, 2.0 * kPi}, numerics::default_rule(), opt,
      Matrix::Zero(d, d).eval(), [](const Matrix& a) { return max_abs(a); });
  SchurResult r;
  r.j2 = j2;
  r.quadrature_error = est.error;
  const Matrix& I = est.value;
  for (const Matrix* g : {&J.jx, &J.jy, &J.jz})
    r.commutator = std::max(r.commutator, max_abs(I * *g - *g * I));
  const Matrix scaled = I * (static_cast<double>(d) / I.trace().real());
  r.trace = scaled.trace().real();
  r.residual = max_abs(scaled - Matrix::Identity(d, d));

  // With k = j + m the orbit state at (theta, phi) is a phase times v_x at
  // z = cot(theta/2) e^{i phi}, so the matching unitary is the identity.
  const auto m = ModelSpace::sphere(j2);
  for (int a = 1; a <= 6; ++a) {
    for (int b = 0; b < 5; ++b) {
      const double theta = kPi * a / 7.0, phi = 2.0 * kPi * (b + 0.3) / 5.0;
      const Vector v = orbit_state(theta, phi);
      const auto x = models::from_unit_vector(
          {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
      const Matrix q = coherent_projection(m, x).entries;
      r.conjugation_deviation = std::max(r.conjugation_deviation, max_abs(v * v.adjoint() - q));
    }
  }
  return r;
}

std::pair<double, ChartPoint> max_overlap(int n, const Vector& psi,
                                          const std::vector<ChartPoint>& grid) {
  if (psi.size() != n + 1) throw ConfigError("max_overlap: dimension mismatch");
  const Vector u = psi / psi.norm();
  double best = -1.0;
  ChartPoint arg;
  for (const auto& x : grid) {
    const double o = std::abs(coherent_vector(n, x).dot(u));
    if (o > best) {
      best = o;
      arg = x;
    }
  }
  return {best, arg};
}

double min_eigenvalue(const QuantOperator& a) {
  const Matrix h = 0.5 * (a.entries + a.entries.adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace csq::quantize
