#pragma once

namespace radmax {

/// Natural log of the complete beta function B(a, b), for a, b > 0.
double log_beta(double a, double b);

/// Regularized incomplete beta function I_x(a, b) evaluated by Lentz's
/// continued fraction. `y` must equal 1 - x; callers pass it separately so
/// that values of x close to 1 keep full precision in y.
///
/// `log_beta_ab` may be supplied to skip the log-gamma evaluations on hot
/// paths; pass NaN to have it computed.
double regularized_beta(double a, double b, double x, double y,
                        double log_beta_ab);

/// Convenience overload: I_x(a, b) with y = 1 - x computed internally.
double regularized_beta(double a, double b, double x);

}  // namespace radmax
