#pragma once

// Closed forms and brute-force references used by the tests. Nothing here
// calls into the library's quadrature or kernel code.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_dilog.h>

namespace oracle {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
inline constexpr double pi = 3.14159265358979323846;

// Inverse stereographic projection, z in the chart around the south pole.
inline Vec3 unit_from_z(cplx z) {
  const double t = std::norm(z);
  return {2.0 * z.real() / (1.0 + t), 2.0 * z.imag() / (1.0 + t), (t - 1.0) / (t + 1.0)};
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// |<v_x, v_y>|^2 for spin-n/2 coherent states: cos^{2n}(angle / 2).
inline double sphere_modulus_sq(int n, const Vec3& x, const Vec3& y) {
  return std::pow(0.5 * (1.0 + dot(x, y)), n);
}

// Berezin transform eigenvalue on degree-l harmonics at level n.
inline double berezin_eigenvalue(int n, int l) {
  double v = 1.0;
  for (int i = 0; i < l; ++i) v *= static_cast<double>(n - i) / static_cast<double>(n + 2 + i);
  return v;
}

// Symbolic holonomy of the level-n sphere around |z| = r (area enclosed times n).
inline double latitude_phase(int n, double r) { return n * 2.0 * pi * r * r / (1.0 + r * r); }

inline double gsl_dilog(double x) { return gsl_sf_dilog(x); }

struct Gsl1D {
  std::function<double(double)> f;
  static double call(double x, void* p) { return static_cast<Gsl1D*>(p)->f(x); }
};

// int_a^inf f with QAGIU.
inline void quiet_gsl() { gsl_set_error_handler_off(); }

inline double qagiu(const std::function<double(double)>& f, double a, double rel = 1e-13) {
  quiet_gsl();
  Gsl1D ctx{f};
  gsl_function F{&Gsl1D::call, &ctx};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(4000);
  double result = 0.0, err = 0.0;
  const int status = gsl_integration_qagiu(&F, a, 0.0, rel, 4000, w, &result, &err);
  gsl_integration_workspace_free(w);
  if (status) throw std::runtime_error(std::string("gsl integration: ") + gsl_strerror(status));
  return result;
}

inline double qags(const std::function<double(double)>& f, double a, double b, double rel = 1e-12) {
  quiet_gsl();
  Gsl1D ctx{f};
  gsl_function F{&Gsl1D::call, &ctx};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(4000);
  double result = 0.0, err = 0.0;
  const int status = gsl_integration_qags(&F, a, b, 0.0, rel, 4000, w, &result, &err);
  gsl_integration_workspace_free(w);
  if (status) throw std::runtime_error(std::string("gsl integration: ") + gsl_strerror(status));
  return result;
}

inline double qagi(const std::function<double(double)>& f, double rel = 1e-12) {
  quiet_gsl();
  Gsl1D ctx{f};
  gsl_function F{&Gsl1D::call, &ctx};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(4000);
  double result = 0.0, err = 0.0;
  const int status = gsl_integration_qagi(&F, 0.0, rel, 4000, w, &result, &err);
  gsl_integration_workspace_free(w);
  if (status) throw std::runtime_error(std::string("gsl integration: ") + gsl_strerror(status));
  return result;
}

// c_m = (2 pi int_0^inf t^m (1+t)^{-1/2} exp(Li2(-t)/hbar) dt)^{-1}, directly in t.
// The integrand peaks near log t = m hbar, so [0, inf) is cut at e^0, e^1, ...
inline double podles_coefficient(double hbar, int m) {
  auto f = [&](double t) {
    if (t == 0.0) return m == 0 ? 1.0 : 0.0;
    return std::exp(m * std::log(t) - 0.5 * std::log1p(t) + gsl_sf_dilog(-t) / hbar);
  };
  const int last = static_cast<int>(std::ceil(2.0 * m * hbar + 12.0 * std::sqrt(hbar) + 8.0));
  double I = qags(f, 0.0, 1.0, 1e-12);
  for (int k = 0; k < last; ++k) I += qags(f, std::exp(k), std::exp(k + 1.0), 1e-12);
  // beyond the last cut the integrand falls faster than any power of t
  const double cut = std::exp(static_cast<double>(last));
  if (f(cut) * cut > 1e-14 * I) throw std::runtime_error("podles oracle: tail not negligible");
  return 1.0 / (2.0 * pi * I);
}

// Uncalibrated mass int |Omega(i, w)|^2 k / (4 pi v^2) du dv on the upper half-plane.
// The u-integral is done in closed form: int (u^2 + a^2)^{-k} du = sqrt(pi) G(k-1/2)/G(k) a^{1-2k}.
inline double half_plane_mass(int k) {
  const double cu = std::sqrt(pi) * std::tgamma(k - 0.5) / std::tgamma(static_cast<double>(k));
  return qagiu(
      [&](double v) {
        if (v == 0.0) return 0.0;
        const double a = 1.0 + v;
        return std::pow(4.0 * v, k) * cu * std::pow(a, 1.0 - 2.0 * k) * k / (4.0 * pi * v * v);
      },
      0.0, 1e-12);
}

// Gauss-Legendre via Golub-Welsch-free Newton iteration, textbook form.
struct Rule1D {
  std::vector<double> x, w;
};
inline Rule1D gauss_legendre(int n) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5)), pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = -z;
    r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return r;
}

// Area integral over the unit sphere: GL in cos(theta), midpoint in phi.
inline double sphere_integral(const std::function<double(const Vec3&)>& f, int nt = 48,
                              int np = 96) {
  const Rule1D g = gauss_legendre(nt);
  double s = 0.0;
  for (int i = 0; i < nt; ++i) {
    const double ct = g.x[i], st = std::sqrt(1.0 - ct * ct);
    for (int j = 0; j < np; ++j) {
      const double ph = 2.0 * pi * (j + 0.5) / np;
      s += g.w[i] * (2.0 * pi / np) * f({st * std::cos(ph), st * std::sin(ph), ct});
    }
  }
  return s;
}

}  // namespace oracle
