#pragma once

// Noncommutative product on the level-n function space of the sphere,
// exact conversion between coordinate polynomials and coefficient matrices,
// and the first-order semiclassical expansion.

#include <Eigen/Dense>
#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <vector>

#include "csq/models.hpp"

namespace csq::starprod {

using Rational = boost::multiprecision::cpp_rational;

/// Exact complex rational re + i im.
struct GaussRational {
  Rational re{0};
  Rational im{0};

  GaussRational() = default;
  GaussRational(Rational r, Rational i = Rational(0)) : re(std::move(r)), im(std::move(i)) {}
  GaussRational(long r) : re(r) {}

  static GaussRational i_unit() { return {Rational(0), Rational(1)}; }
  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational conj() const { return {re, -im}; }
  cplx to_cplx() const;
  std::string str() const;

  GaussRational& operator+=(const GaussRational& o);
  GaussRational& operator-=(const GaussRational& o);
  GaussRational& operator*=(const GaussRational& o);
  GaussRational& operator/=(const Rational& r);
  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const Rational& r) { return a /= r; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// Polynomial in the embedding coordinates x1, x2, x3 with a declared
/// degree bound. Evaluation is on the unit sphere.
class SpherePoly {
 public:
  using Exponent = std::array<int, 3>;

  explicit SpherePoly(int max_degree = 0);
  static SpherePoly constant(const GaussRational& c, int max_degree = 0);
  /// x_i, i = 1, 2, 3.
  static SpherePoly coordinate(int i, int max_degree = 1);

  int max_degree() const { return max_degree_; }
  int degree() const;
  const std::map<Exponent, GaussRational>& terms() const { return terms_; }
  /// Throws ConfigError when the monomial exceeds the degree bound.
  void add_term(const Exponent& e, const GaussRational& c);

  cplx evaluate(const numerics::Vec3& x) const;
  /// Ambient gradient (d/dx1, d/dx2, d/dx3) at x.
  std::array<cplx, 3> gradient(const numerics::Vec3& x) const;

  SpherePoly& operator+=(const SpherePoly& o);
  SpherePoly& operator-=(const SpherePoly& o);
  SpherePoly& operator*=(const GaussRational& c);
  friend SpherePoly operator+(SpherePoly a, const SpherePoly& b) { return a += b; }
  friend SpherePoly operator-(SpherePoly a, const SpherePoly& b) { return a -= b; }
  friend SpherePoly operator*(SpherePoly a, const GaussRational& c) { return a *= c; }
  friend SpherePoly operator*(const GaussRational& c, SpherePoly a) { return a *= c; }
  /// Degree bound of the product is the sum of the bounds.
  friend SpherePoly operator*(const SpherePoly& a, const SpherePoly& b);

 private:
  int max_degree_;
  std::map<Exponent, GaussRational> terms_;
};

/// a(z, zbar) = sum_jk sqrt(C(n,j) C(n,k)) a_jk z^j zbar^k over (1+|z|^2)^n.
/// Stored exactly as alpha_jk = sqrt(C(n,j) C(n,k)) a_jk, the coefficient of
/// z^j zbar^k, which is rational for rational polynomials.
class CoeffMatrix {
 public:
  explicit CoeffMatrix(int n);
  static CoeffMatrix identity(int n);

  int level() const { return n_; }
  const GaussRational& raw(int j, int k) const { return alpha_[index(j, k)]; }
  GaussRational& raw(int j, int k) { return alpha_[index(j, k)]; }
  /// a_jk in floating point.
  cplx entry(int j, int k) const;
  Eigen::MatrixXcd to_matrix() const;
  CoeffMatrix adjoint() const;
  bool is_hermitian() const { return *this == adjoint(); }

  cplx evaluate(const models::ChartPoint& x) const;
  cplx evaluate(const numerics::Vec3& x) const;

  friend bool operator==(const CoeffMatrix& a, const CoeffMatrix& b) {
    return a.n_ == b.n_ && a.alpha_ == b.alpha_;
  }
  CoeffMatrix& operator+=(const CoeffMatrix& o);
  CoeffMatrix& operator-=(const CoeffMatrix& o);
  friend CoeffMatrix operator+(CoeffMatrix a, const CoeffMatrix& b) { return a += b; }
  friend CoeffMatrix operator-(CoeffMatrix a, const CoeffMatrix& b) { return a -= b; }

 private:
  std::size_t index(int j, int k) const;
  int n_;
  std::vector<GaussRational> alpha_;
};

/// c_jk = sum_i a_ji b_ik, computed exactly on the stored alpha form.
CoeffMatrix star(const CoeffMatrix& a, const CoeffMatrix& b);

/// Exact conversion. Polynomials of degree above n are accepted when they
/// agree on the sphere with one of degree <= n; otherwise ConfigError.
CoeffMatrix poly_to_coeff(const SpherePoly& p, int n);
/// Exact inverse: a polynomial of degree <= n with the same values on the sphere.
SpherePoly coeff_to_poly(const CoeffMatrix& a);

/// {p, q} = kappa x . (grad p x grad q) and g^{-1}(X_p, X_q) = gamma grad_T p . grad_T q.
struct BracketConstants {
  double kappa = 0.0;
  double gamma = 0.0;
};

/// Both constants from the exact n = 1 algebra: kappa from the commutator of
/// x1 and x2, gamma from x1 * x1 - x1^2.
BracketConstants calibrate_brackets();

cplx poisson_bracket(const SpherePoly& p, const SpherePoly& q, const numerics::Vec3& x,
                     const BracketConstants& c);
cplx metric_pairing(const SpherePoly& p, const SpherePoly& q, const numerics::Vec3& x,
                    const BracketConstants& c);

struct SemiclassicalRow {
  int n = 0;
  double error = 0.0;
  double ratio = 0.0;  // E(n) / E(previous level); 0 for the first row
};

struct SemiclassicalTable {
  BracketConstants constants;
  std::vector<SemiclassicalRow> rows;
};

/// E(n) = sup over samples of |p * q - p q - (i/2n)({p,q} - i g^{-1}(X_p, X_q))|.
SemiclassicalTable semiclassical_check(const SpherePoly& p, const SpherePoly& q,
                                       const std::vector<int>& levels,
                                       const std::vector<numerics::Vec3>& samples);

/// Fibonacci-lattice points on the unit sphere.
std::vector<numerics::Vec3> sphere_samples(std::size_t count);

}  // namespace csq::starprod
