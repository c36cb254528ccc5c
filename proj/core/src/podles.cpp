#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "csq/error.hpp"
#include "csq/models.hpp"

namespace csq::models {

namespace {

double log_sum_exp(const std::vector<double>& a) {
  if (a.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(a.begin(), a.end());
  double s = 0.0;
  for (double v : a) s += std::exp(v - top);
  return top + std::log(s);
}

// log of int_0^inf t^m (1+t)^{-1/2} exp(Li2(-t)/hbar) dt, in s = log t.
// The exponent phi(s) is concave, so it is integrated around its peak.
double log_moment(double hbar, int m) {
  const double a = m + 1.0;
  auto phi = [&](double s) {
    const double t = std::exp(s);
    return a * s - 0.5 * std::log1p(t) + dilog(-t) / hbar;
  };
  auto dphi = [&](double s) {
    const double t = std::exp(s);
    return a - 0.5 * t / (1.0 + t) - std::log1p(t) / hbar;
  };
  double lo = -1.0, hi = 1.0;
  while (dphi(lo) < 0.0) lo -= 2.0 * (1.0 + std::abs(lo));
  while (dphi(hi) > 0.0) hi += 2.0 * (1.0 + std::abs(hi));
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (dphi(mid) > 0.0 ? lo : hi) = mid;
  }
  const double s_star = 0.5 * (lo + hi);
  const double peak = phi(s_star);
  // phi(s) - phi(s_star) without the cancellation between a s and
  // Li2(-t) ~ -log^2(t)/2 that would otherwise leave O(a s eps) noise.
  auto rel = [&](double s) {
    if (s <= 0.0 || s_star <= 0.0) return phi(s) - peak;
    const double x = s - s_star;
    const double dl = x + std::log1p(std::exp(-s)) - std::log1p(std::exp(-s_star));
    const double df = -0.5 * x * (s + s_star) - (dilog(-std::exp(-s)) - dilog(-std::exp(-s_star)));
    return a * x - 0.5 * dl + df / hbar;
  };
  constexpr double kDrop = 60.0;
  double left = s_star - 1.0, right = s_star + 1.0;
  while (rel(left) > -kDrop) left -= 1.0;
  while (rel(right) > -kDrop) right += 1.0;
  const auto est = numerics::integrate_interval([&](double s) { return std::exp(rel(s)); }, left,
                                                right, 1e-15, 1e-13);
  if (!(est.value > 0.0) || !std::isfinite(est.value)) {
    std::ostringstream msg;
    msg << "quadrature failed: moment " << m << " at hbar " << hbar;
    throw QuadratureFailure(msg.str(), est.value, est.error);
  }
  return peak + std::log(est.value);
}

}  // namespace

std::vector<double> podles_log_coefficients(double hbar, int N) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("podles: hbar must be positive");
  if (N < 0) throw ConfigError("podles: N must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(N) + 1);
  for (int m = 0; m <= N; ++m)
    out[static_cast<std::size_t>(m)] = -std::log(2.0 * kPi) - log_moment(hbar, m);
  return out;
}

std::vector<double> podles_coefficients(double hbar, int N) {
  auto out = podles_log_coefficients(hbar, N);
  for (double& v : out) v = std::exp(v);
  return out;
}

double PodlesSeries::log_sum(double t) const {
  if (t < 0.0) throw DomainError("podles series: negative argument");
  if (t == 0.0) return log_c.front();
  const double lt = std::log(t);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < log_c.size(); ++m)
    top = std::max(top, log_c[m] + static_cast<double>(m) * lt);
  double s = 0.0;
  for (std::size_t m = 0; m < log_c.size(); ++m)
    s += std::exp(log_c[m] + static_cast<double>(m) * lt - top);
  return top + std::log(s);
}

std::pair<double, cplx> PodlesSeries::scaled_sum(cplx w) const {
  const double r = std::abs(w);
  if (r == 0.0) return {log_c.front(), cplx{1.0, 0.0}};
  const double lr = std::log(r), phase = std::arg(w);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < log_c.size(); ++m)
    top = std::max(top, log_c[m] + static_cast<double>(m) * lr);
  cplx s{0.0, 0.0};
  for (std::size_t m = 0; m < log_c.size(); ++m)
    s += std::polar(std::exp(log_c[m] + static_cast<double>(m) * lr - top),
                    static_cast<double>(m) * phase);
  return {top, s};
}

PodlesSeries build_podles_series(double hbar, const PodlesOptions& options) {
  if (!(options.test_radius > 0.0)) throw ConfigError("podles: test radius must be positive");
  if (!(options.rel_cutoff > 0.0)) throw ConfigError("podles: rel_cutoff must be positive");
  const double lt = 2.0 * std::log(options.test_radius);
  PodlesSeries series;
  series.hbar = hbar;
  series.test_radius = options.test_radius;

  // Extra terms beyond N for the omitted-mass bound; c_m t^m decays like
  // exp(-hbar m^2 / 2), so a modest margin captures it to roundoff.
  constexpr int kMargin = 40;
  int N = options.terms;
  std::vector<double> lc;
  if (N >= 0) {
    lc = podles_log_coefficients(hbar, N + kMargin);
  } else {
    const int cap = options.max_terms + kMargin;
    lc = podles_log_coefficients(hbar, std::min(cap, 64));
    auto term = [&](int m) { return lc[static_cast<std::size_t>(m)] + m * lt; };
    double partial = lc[0];
    N = -1;
    for (int m = 1;; ++m) {
      if (m + kMargin >= static_cast<int>(lc.size())) {
        if (static_cast<int>(lc.size()) >= cap)
          throw ConfigError("podles: truncation did not converge within max_terms");
        lc = podles_log_coefficients(hbar, std::min(cap, 2 * static_cast<int>(lc.size())));
      }
      if (term(m) - partial < std::log(options.rel_cutoff)) {
        N = m - 1;
        break;
      }
      partial = std::max(partial, term(m)) +
                std::log1p(std::exp(-std::abs(partial - term(m))));
    }
  }
  series.log_c.assign(lc.begin(), lc.begin() + N + 1);
  std::vector<double> omitted;
  for (std::size_t m = static_cast<std::size_t>(N) + 1; m < lc.size(); ++m)
    omitted.push_back(lc[m] + static_cast<double>(m) * lt);
  series.truncation_bound = std::exp(log_sum_exp(omitted) - series.log_sum(std::exp(lt)));
  if (options.terms >= 0 && series.truncation_bound > options.rel_cutoff) {
    std::ostringstream msg;
    msg << "podles: N = " << N << " leaves relative mass " << series.truncation_bound
        << " at radius " << options.test_radius << ", above tolerance " << options.rel_cutoff;
    throw ConfigError(msg.str());
  }
  return series;
}

}  // namespace csq::models
