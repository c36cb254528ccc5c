#include "csq/starprod.hpp"

#include <cmath>
#include <sstream>

#include "csq/error.hpp"

namespace csq::starprod {

namespace {

std::vector<Rational> binomial_row(int n) {
  std::vector<Rational> row(static_cast<std::size_t>(n) + 1, Rational(1));
  for (int k = 1; k <= n; ++k)
    row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k - 1)] * (n - k + 1) / k;
  return row;
}

cplx ipow(cplx b, int k) {
  cplx r{1.0, 0.0};
  for (; k > 0; k >>= 1, b *= b)
    if (k & 1) r *= b;
  return r;
}

// Polynomial in z and zbar: (j, k) -> coefficient of z^j zbar^k.
using ZPoly = std::map<std::pair<int, int>, GaussRational>;

ZPoly zmul(const ZPoly& a, const ZPoly& b) {
  ZPoly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      auto& slot = out[{ea.first + eb.first, ea.second + eb.second}];
      slot += ca * cb;
    }
  std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

ZPoly zpow(const ZPoly& a, int k) {
  ZPoly r{{{0, 0}, GaussRational(1)}};
  for (int i = 0; i < k; ++i) r = zmul(r, a);
  return r;
}

// Exact division by (1 + z zbar). Each diagonal j - k = d is a polynomial in
// t = z zbar, divided by 1 + t by synthetic division.
ZPoly divide_by_one_plus_t(const ZPoly& p) {
  std::map<int, std::vector<GaussRational>> diag;
  for (const auto& [e, c] : p) {
    const int d = e.first - e.second;
    const int m = std::min(e.first, e.second);
    auto& v = diag[d];
    if (static_cast<int>(v.size()) <= m) v.resize(static_cast<std::size_t>(m) + 1);
    v[static_cast<std::size_t>(m)] = c;
  }
  ZPoly out;
  for (auto& [d, c] : diag) {
    const int deg = static_cast<int>(c.size()) - 1;
    std::vector<GaussRational> q(static_cast<std::size_t>(std::max(deg, 0)));
    GaussRational carry;
    for (int m = deg; m >= 1; --m) {
      carry = c[static_cast<std::size_t>(m)] - carry;
      q[static_cast<std::size_t>(m - 1)] = carry;
    }
    if (!(c[0] - carry).is_zero())
      throw ConfigError("poly_to_coeff: degree overflow (function not in the level-n space)");
    for (int m = 0; m < deg; ++m) {
      if (q[static_cast<std::size_t>(m)].is_zero()) continue;
      const int j = d >= 0 ? m + d : m, k = d >= 0 ? m : m - d;
      out[{j, k}] = q[static_cast<std::size_t>(m)];
    }
  }
  return out;
}

}  // namespace

cplx GaussRational::to_cplx() const { return {re.convert_to<double>(), im.convert_to<double>()}; }

std::string GaussRational::str() const {
  std::ostringstream o;
  o << re.str();
  if (im != 0) o << (im > 0 ? "+" : "-") << Rational(abs(im)).str() << "i";
  return o.str();
}

GaussRational& GaussRational::operator+=(const GaussRational& o) {
  re += o.re;
  im += o.im;
  return *this;
}
GaussRational& GaussRational::operator-=(const GaussRational& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}
GaussRational& GaussRational::operator*=(const GaussRational& o) {
  Rational r = re * o.re - im * o.im;
  im = re * o.im + im * o.re;
  re = std::move(r);
  return *this;
}
GaussRational& GaussRational::operator/=(const Rational& r) {
  re /= r;
  im /= r;
  return *this;
}

// SpherePoly

SpherePoly::SpherePoly(int max_degree) : max_degree_(max_degree) {
  if (max_degree < 0) throw ConfigError("SpherePoly: negative degree bound");
}

SpherePoly SpherePoly::constant(const GaussRational& c, int max_degree) {
  SpherePoly p(max_degree);
  p.add_term({0, 0, 0}, c);
  return p;
}

SpherePoly SpherePoly::coordinate(int i, int max_degree) {
  if (i < 1 || i > 3) throw ConfigError("SpherePoly: coordinate index must be 1, 2 or 3");
  SpherePoly p(max_degree);
  Exponent e{0, 0, 0};
  e[static_cast<std::size_t>(i - 1)] = 1;
  p.add_term(e, GaussRational(1));
  return p;
}

int SpherePoly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

void SpherePoly::add_term(const Exponent& e, const GaussRational& c) {
  if (e[0] < 0 || e[1] < 0 || e[2] < 0) throw ConfigError("SpherePoly: negative exponent");
  if (e[0] + e[1] + e[2] > max_degree_) {
    std::ostringstream msg;
    msg << "SpherePoly: monomial of degree " << e[0] + e[1] + e[2] << " exceeds bound "
        << max_degree_;
    throw ConfigError(msg.str());
  }
  if (c.is_zero()) return;
  auto& slot = terms_[e];
  slot += c;
  if (slot.is_zero()) terms_.erase(e);
}

cplx SpherePoly::evaluate(const numerics::Vec3& x) const {
  cplx s{0.0, 0.0};
  for (const auto& [e, c] : terms_)
    s += c.to_cplx() * std::pow(x[0], e[0]) * std::pow(x[1], e[1]) * std::pow(x[2], e[2]);
  return s;
}

std::array<cplx, 3> SpherePoly::gradient(const numerics::Vec3& x) const {
  std::array<cplx, 3> g{};
  for (const auto& [e, c] : terms_) {
    const cplx cc = c.to_cplx();
    for (std::size_t i = 0; i < 3; ++i) {
      if (e[i] == 0) continue;
      double mono = e[i];
      for (std::size_t j = 0; j < 3; ++j) mono *= std::pow(x[j], e[j] - (j == i ? 1 : 0));
      g[i] += cc * mono;
    }
  }
  return g;
}

SpherePoly& SpherePoly::operator+=(const SpherePoly& o) {
  max_degree_ = std::max(max_degree_, o.max_degree_);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

SpherePoly& SpherePoly::operator-=(const SpherePoly& o) {
  max_degree_ = std::max(max_degree_, o.max_degree_);
  for (const auto& [e, c] : o.terms_) add_term(e, GaussRational(0) - c);
  return *this;
}

SpherePoly& SpherePoly::operator*=(const GaussRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

SpherePoly operator*(const SpherePoly& a, const SpherePoly& b) {
  SpherePoly out(a.max_degree_ + b.max_degree_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_)
      out.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
  return out;
}

// CoeffMatrix

CoeffMatrix::CoeffMatrix(int n) : n_(n) {
  if (n < 1) throw ConfigError("CoeffMatrix: level must be >= 1");
  alpha_.resize(static_cast<std::size_t>((n + 1) * (n + 1)));
}

CoeffMatrix CoeffMatrix::identity(int n) {
  // 1 = (1 + z zbar)^n / (1 + |z|^2)^n
  CoeffMatrix a(n);
  const auto c = binomial_row(n);
  for (int k = 0; k <= n; ++k) a.raw(k, k) = GaussRational(c[static_cast<std::size_t>(k)]);
  return a;
}

std::size_t CoeffMatrix::index(int j, int k) const {
  if (j < 0 || j > n_ || k < 0 || k > n_) throw ConfigError("CoeffMatrix: index out of range");
  return static_cast<std::size_t>(j * (n_ + 1) + k);
}

cplx CoeffMatrix::entry(int j, int k) const {
  const auto c = binomial_row(n_);
  const double s = std::sqrt(c[static_cast<std::size_t>(j)].convert_to<double>() *
                             c[static_cast<std::size_t>(k)].convert_to<double>());
  return raw(j, k).to_cplx() / s;
}

Eigen::MatrixXcd CoeffMatrix::to_matrix() const {
  Eigen::MatrixXcd m(n_ + 1, n_ + 1);
  for (int j = 0; j <= n_; ++j)
    for (int k = 0; k <= n_; ++k) m(j, k) = entry(j, k);
  return m;
}

CoeffMatrix CoeffMatrix::adjoint() const {
  CoeffMatrix out(n_);
  for (int j = 0; j <= n_; ++j)
    for (int k = 0; k <= n_; ++k) out.raw(j, k) = raw(k, j).conj();
  return out;
}

cplx CoeffMatrix::evaluate(const models::ChartPoint& x) const {
  // z^j zbar^k / (1+|z|^2)^n = p^j q^(n-j) conj(p)^k conj(q)^(n-k) on the unit spinor
  const auto s = models::spinor(x);
  std::vector<cplx> w(static_cast<std::size_t>(n_) + 1);
  for (int k = 0; k <= n_; ++k) w[static_cast<std::size_t>(k)] = ipow(s[1], k) * ipow(s[0], n_ - k);
  cplx sum{0.0, 0.0};
  for (int j = 0; j <= n_; ++j)
    for (int k = 0; k <= n_; ++k)
      sum += raw(j, k).to_cplx() * w[static_cast<std::size_t>(j)] *
             std::conj(w[static_cast<std::size_t>(k)]);
  return sum;
}

cplx CoeffMatrix::evaluate(const numerics::Vec3& x) const {
  return evaluate(models::from_unit_vector(x));
}

CoeffMatrix& CoeffMatrix::operator+=(const CoeffMatrix& o) {
  if (o.n_ != n_) throw ConfigError("CoeffMatrix: level mismatch");
  for (std::size_t i = 0; i < alpha_.size(); ++i) alpha_[i] += o.alpha_[i];
  return *this;
}

CoeffMatrix& CoeffMatrix::operator-=(const CoeffMatrix& o) {
  if (o.n_ != n_) throw ConfigError("CoeffMatrix: level mismatch");
  for (std::size_t i = 0; i < alpha_.size(); ++i) alpha_[i] -= o.alpha_[i];
  return *this;
}

CoeffMatrix star(const CoeffMatrix& a, const CoeffMatrix& b) {
  if (a.level() != b.level()) {
    std::ostringstream msg;
    msg << "star: level mismatch " << a.level() << " vs " << b.level();
    throw ConfigError(msg.str());
  }
  const int n = a.level();
  const auto c = binomial_row(n);
  // alpha = sqrt(C_j C_k) a, so gamma_jk = sum_i alpha_ji beta_ik / C_i
  CoeffMatrix out(n);
  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= n; ++k) {
      GaussRational s;
      for (int i = 0; i <= n; ++i) s += a.raw(j, i) * b.raw(i, k) / c[static_cast<std::size_t>(i)];
      out.raw(j, k) = s;
    }
  return out;
}

CoeffMatrix poly_to_coeff(const SpherePoly& p, int n) {
  if (n < 1) throw ConfigError("poly_to_coeff: level must be >= 1");
  const int top = std::max(n, p.degree());
  // x_i = N_i / (1 + z zbar)
  const GaussRational i = GaussRational::i_unit();
  const ZPoly one_plus_t{{{0, 0}, GaussRational(1)}, {{1, 1}, GaussRational(1)}};
  const std::array<ZPoly, 3> num{
      ZPoly{{{1, 0}, GaussRational(1)}, {{0, 1}, GaussRational(1)}},
      ZPoly{{{1, 0}, GaussRational(0) - i}, {{0, 1}, i}},
      ZPoly{{{1, 1}, GaussRational(1)}, {{0, 0}, GaussRational(-1)}}};
  ZPoly total;
  for (const auto& [e, c] : p.terms()) {
    ZPoly term{{{0, 0}, c}};
    for (std::size_t a = 0; a < 3; ++a) term = zmul(term, zpow(num[a], e[a]));
    term = zmul(term, zpow(one_plus_t, top - (e[0] + e[1] + e[2])));
    for (const auto& [ez, cz] : term) total[ez] += cz;
  }
  std::erase_if(total, [](const auto& kv) { return kv.second.is_zero(); });
  for (int d = top; d > n; --d) total = divide_by_one_plus_t(total);
  CoeffMatrix out(n);
  for (const auto& [e, c] : total) {
    if (e.first > n || e.second > n)
      throw ConfigError("poly_to_coeff: degree overflow (function not in the level-n space)");
    out.raw(e.first, e.second) = c;
  }
  return out;
}

SpherePoly coeff_to_poly(const CoeffMatrix& a) {
  const int n = a.level();
  const GaussRational half(Rational(1, 2));
  // w = x1 + i x2, wbar, (1 + x3)/2, (1 - x3)/2 with z/(1+t) = w/2, zbar/(1+t) = wbar/2,
  // t/(1+t) = (1+x3)/2, 1/(1+t) = (1-x3)/2.
  const SpherePoly x1 = SpherePoly::coordinate(1), x2 = SpherePoly::coordinate(2),
                   x3 = SpherePoly::coordinate(3), one = SpherePoly::constant(GaussRational(1));
  const SpherePoly w_half = (x1 + x2 * GaussRational::i_unit()) * half;
  const SpherePoly wb_half = (x1 - x2 * GaussRational::i_unit()) * half;
  const SpherePoly up = (one + x3) * half, down = (one - x3) * half;
  auto power = [](const SpherePoly& b, int k) {
    SpherePoly r = SpherePoly::constant(GaussRational(1));
    for (int i = 0; i < k; ++i) r = r * b;
    return r;
  };
  SpherePoly out(n);
  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= n; ++k) {
      const auto& c = a.raw(j, k);
      if (c.is_zero()) continue;
      const SpherePoly mono = j >= k ? power(w_half, j - k) * power(up, k) * power(down, n - j)
                                     : power(wb_half, k - j) * power(up, j) * power(down, n - k);
      for (const auto& [e, v] : mono.terms()) out.add_term(e, c * v);
    }
  return out;
}

// Brackets

namespace {

numerics::Vec3 probe_point() {
  const double x1 = 0.3, x2 = 0.4;
  return {x1, x2, std::sqrt(1.0 - x1 * x1 - x2 * x2)};
}

std::array<cplx, 3> tangential(const std::array<cplx, 3>& g, const numerics::Vec3& x) {
  const cplx r = g[0] * x[0] + g[1] * x[1] + g[2] * x[2];
  return {g[0] - r * x[0], g[1] - r * x[1], g[2] - r * x[2]};
}

}  // namespace

BracketConstants calibrate_brackets() {
  const auto x = probe_point();
  const auto X1 = poly_to_coeff(SpherePoly::coordinate(1), 1);
  const auto X2 = poly_to_coeff(SpherePoly::coordinate(2), 1);
  // n (p*q - q*p) / i = {p, q} = kappa x3
  const cplx comm = (star(X1, X2) - star(X2, X1)).evaluate(x);
  BracketConstants c;
  c.kappa = (comm / cplx{0.0, 1.0}).real() / x[2];
  // p*p - p^2 = g^{-1}(X_p, X_p) / (2n) with |grad_T x1|^2 = 1 - x1^2, n = 1
  const cplx sym = star(X1, X1).evaluate(x) - x[0] * x[0];
  c.gamma = 2.0 * sym.real() / (1.0 - x[0] * x[0]);
  return c;
}

cplx poisson_bracket(const SpherePoly& p, const SpherePoly& q, const numerics::Vec3& x,
                     const BracketConstants& c) {
  const auto a = p.gradient(x), b = q.gradient(x);
  const cplx det = x[0] * (a[1] * b[2] - a[2] * b[1]) + x[1] * (a[2] * b[0] - a[0] * b[2]) +
                   x[2] * (a[0] * b[1] - a[1] * b[0]);
  return c.kappa * det;
}

cplx metric_pairing(const SpherePoly& p, const SpherePoly& q, const numerics::Vec3& x,
                    const BracketConstants& c) {
  const auto a = tangential(p.gradient(x), x), b = tangential(q.gradient(x), x);
  return c.gamma * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
}

SemiclassicalTable semiclassical_check(const SpherePoly& p, const SpherePoly& q,
                                       const std::vector<int>& levels,
                                       const std::vector<numerics::Vec3>& samples) {
  SemiclassicalTable out;
  out.constants = calibrate_brackets();
  const cplx i{0.0, 1.0};
  for (int n : levels) {
    if (std::max(p.degree(), q.degree()) > n) {
      std::ostringstream msg;
      msg << "semiclassical_check: degree exceeds level " << n;
      throw ConfigError(msg.str());
    }
    const CoeffMatrix s = star(poly_to_coeff(p, n), poly_to_coeff(q, n));
    SemiclassicalRow row{n, 0.0, 0.0};
    for (const auto& x : samples) {
      const cplx first = (i / (2.0 * n)) * (poisson_bracket(p, q, x, out.constants) -
                                            i * metric_pairing(p, q, x, out.constants));
      const cplx r = s.evaluate(x) - p.evaluate(x) * q.evaluate(x) - first;
      row.error = std::max(row.error, std::abs(r));
    }
    if (!out.rows.empty()) row.ratio = row.error / out.rows.back().error;
    out.rows.push_back(row);
  }
  return out;
}

std::vector<numerics::Vec3> sphere_samples(std::size_t count) {
  std::vector<numerics::Vec3> out;
  out.reserve(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    out.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return out;
}

}  // namespace csq::starprod
