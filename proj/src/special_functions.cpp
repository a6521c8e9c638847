#include "rdbp/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "rdbp/errors.hpp"

namespace rdbp::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Continued fraction for I_{a,b}(x) (modified Lentz). Converges quickly for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x, int max_iter) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw ConvergenceError(fmt::format(
      "incomplete beta continued fraction did not converge (a={}, b={}, x={})",
      a, b, x));
}

}  // namespace

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta(double a, double b) { return std::exp(log_beta(a, b)); }

double reg_inc_beta(double a, double b, double x, int max_iter) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError(fmt::format("reg_inc_beta: a={} and b={} must be positive", a, b));
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(fmt::format("reg_inc_beta: x={} outside [0, 1]", x));
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x, max_iter) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x, max_iter) / b;
}

double inverse_reg_inc_beta(double a, double b, double y, int max_iter) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError(fmt::format("inverse_reg_inc_beta: a={} and b={} must be positive", a, b));
  }
  if (!(y >= 0.0 && y <= 1.0)) {
    throw DomainError(fmt::format("inverse_reg_inc_beta: y={} outside [0, 1]", y));
  }
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 1.0;

  const double lb = log_beta(a, b);
  double lo = 0.0;
  double hi = 1.0;

  // Starting point from the leading terms of the small-x and small-(1-x)
  // expansions, whichever tail y sits in.
  double x;
  const double mean = a / (a + b);
  const double y_mean = reg_inc_beta(a, b, mean);
  if (y < y_mean) {
    x = std::exp((std::log(y * a) + lb) / a);
    x = std::min(x, mean);
  } else {
    x = 1.0 - std::exp((std::log((1.0 - y) * b) + lb) / b);
    x = std::max(x, mean);
  }
  if (!(x > 0.0 && x < 1.0)) x = mean;

  for (int it = 0; it < max_iter; ++it) {
    const double f = reg_inc_beta(a, b, x) - y;
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double log_density =
        (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lb;
    const double density = std::exp(log_density);
    double next = x - f / density;
    if (!(density > 0.0) || !std::isfinite(next) || next <= lo || next >= hi) {
      next = 0.5 * (lo + hi);
    }
    if (std::fabs(next - x) <= 4.0 * kEps * std::max(x, kTiny) ||
        hi - lo <= 4.0 * kEps * std::max(lo, kTiny)) {
      return next;
    }
    x = next;
  }
  throw ConvergenceError(fmt::format(
      "inverse_reg_inc_beta did not converge (a={}, b={}, y={})", a, b, y));
}

double lambert_w_minus1(double z) {
  constexpr double kInvE = 1.0 / std::numbers::e;
  if (!(z >= -kInvE && z < 0.0)) {
    throw DomainError(fmt::format("lambert_w_minus1: z={} outside [-1/e, 0)", z));
  }
  if (z == -kInvE) return -1.0;

  double w;
  if (z < -0.25) {
    // Series about the branch point in p = -sqrt(2 (1 + e z)).
    const double p = -std::sqrt(2.0 * (1.0 + std::numbers::e * z));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-z);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }

  // Halley iterations on w e^w - z.
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (w > -1.0) w = -1.0;
    if (std::fabs(step) <= 2.0 * kEps * std::fabs(w)) break;
  }
  return w;
}

}  // namespace rdbp::special
