#include <cmath>
#include <limits>

#include "csq/error.hpp"
#include "csq/models.hpp"

namespace csq::models {

namespace {

constexpr double kZeta2 = kPi * kPi / 6.0;

// Power series, used on 0 <= x <= 1/2 where it converges like 2^-k.
double dilog_series(double x) {
  double term = x, sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double add = term / (static_cast<double>(k) * k);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    term *= x;
  }
  return sum;
}

}  // namespace

double dilog(double x) {
  if (std::isnan(x)) return x;
  if (x > 1.0) throw DomainError("dilog: argument above 1 is off the real branch");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return kZeta2;
  if (x == -1.0) return -0.5 * kZeta2;
  if (x < -1.0) {
    // Inversion: Li2(x) + Li2(1/x) = -pi^2/6 - log^2(-x)/2.
    const double l = std::log(-x);
    return -kZeta2 - 0.5 * l * l - dilog(1.0 / x);
  }
  if (x < 0.0) {
    // Landen: maps [-1, 0) onto (0, 1/2].
    const double l = std::log1p(-x);
    return -dilog_series(x / (x - 1.0)) - 0.5 * l * l;
  }
  if (x <= 0.5) return dilog_series(x);
  // Reflection for 1/2 < x < 1.
  return kZeta2 - std::log(x) * std::log1p(-x) - dilog_series(1.0 - x);
}

}  // namespace csq::models
