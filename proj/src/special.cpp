#include "radmax/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "radmax/errors.hpp"

namespace radmax {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 2000;

// Continued fraction for I_x(a, b) / (x^a y^b / (a B(a, b))), valid and
// fast when x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
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
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge",
                       std::numeric_limits<double>::quiet_NaN());
}

double front_factor(double a, double b, double x, double y, double lbeta) {
  return std::exp(a * std::log(x) + b * std::log(y) - lbeta) / a;
}

}  // namespace

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("log_beta requires positive arguments");
  }
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double regularized_beta(double a, double b, double x, double y,
                        double log_beta_ab) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("regularized_beta requires a, b > 0");
  }
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw std::invalid_argument("regularized_beta requires x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  const double lbeta = std::isnan(log_beta_ab) ? log_beta(a, b) : log_beta_ab;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front_factor(a, b, x, y, lbeta) * beta_continued_fraction(a, b, x);
  }
  // Symmetry I_x(a, b) = 1 - I_y(b, a); B(a, b) is symmetric.
  return 1.0 -
         front_factor(b, a, y, x, lbeta) * beta_continued_fraction(b, a, y);
}

double regularized_beta(double a, double b, double x) {
  return regularized_beta(a, b, x, 1.0 - x,
                          std::numeric_limits<double>::quiet_NaN());
}

}  // namespace radmax
