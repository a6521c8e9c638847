#pragma once

namespace rdbp::special {

/// log B(a, b) via lgamma.
double log_beta(double a, double b);

/// Complete beta function B(a, b).
double beta(double a, double b);

/// Regularized incomplete beta function I_{a,b}(x), a, b > 0, x in [0, 1].
///
/// Evaluated by the modified Lentz continued fraction, using the reflection
/// I_{a,b}(x) = 1 - I_{b,a}(1 - x) on the side where the fraction converges
/// fast. Throws DomainError for invalid arguments and ConvergenceError when
/// the fraction fails to settle within `max_iter` terms.
double reg_inc_beta(double a, double b, double x, int max_iter = 10000);

/// Inverse in x of I_{a,b}(x) = y, y in [0, 1].
///
/// Newton iterations kept inside a shrinking bracket; any step that leaves
/// the bracket is replaced by bisection.
double inverse_reg_inc_beta(double a, double b, double y, int max_iter = 400);

/// Lower real branch W_{-1} of the Lambert W function, z in [-1/e, 0).
/// Returns w <= -1 with w * exp(w) == z.
double lambert_w_minus1(double z);

}  // namespace rdbp::special
