#include "radmax/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "radmax/special.hpp"

namespace radmax {

Dimension::Dimension(int d) : d_(d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  const double half = 0.5 * d;
  omega_ = std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
  lbeta_volume_ = log_beta(0.5 * (d + 1), 0.5);
  lbeta_area_ = d > 1 ? log_beta(0.5 * (d - 1), 0.5)
                      : std::numeric_limits<double>::quiet_NaN();
}

double ball_volume(const Dimension& dim, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");
  return dim.unit_ball_volume() * std::pow(r, dim.value());
}

double cap_fraction_from_cos(const Dimension& dim, double one_minus_cos,
                             double one_plus_cos) {
  if (one_minus_cos <= 0.0) return 0.0;
  if (one_plus_cos <= 0.0) return 1.0;
  if (dim.value() == 1) return 0.5;
  const double sin2 = std::min(1.0, one_minus_cos * one_plus_cos);
  const double cos_theta = 0.5 * (one_plus_cos - one_minus_cos);
  const double cos2 = cos_theta * cos_theta;
  const double half_area = 0.5 * regularized_beta(0.5 * (dim.value() - 1), 0.5,
                                                  sin2, cos2,
                                                  dim.log_beta_cap_area());
  return one_minus_cos <= 1.0 ? half_area : 1.0 - half_area;
}

double cap_fraction(const Dimension& dim, double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw std::invalid_argument("cap angle must lie in [0, pi]");
  }
  if (theta == std::numbers::pi) return 1.0;
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  return cap_fraction_from_cos(dim, 2.0 * s * s, 2.0 * c * c);
}

double cap_volume(const Dimension& dim, double radius, double height) {
  if (!(radius > 0.0)) throw std::invalid_argument("cap radius must be positive");
  if (height <= 0.0) return 0.0;
  const double full = ball_volume(dim, radius);
  if (height >= 2.0 * radius) return full;
  const bool minor = height <= radius;
  const double h = minor ? height : 2.0 * radius - height;
  const double x = h * (2.0 * radius - h) / (radius * radius);
  const double rel = (radius - h) / radius;
  const double cap = 0.5 * full *
                     regularized_beta(0.5 * (dim.value() + 1), 0.5, x, rel * rel,
                                      dim.log_beta_cap_volume());
  return minor ? cap : full - cap;
}

SphereIntersection sphere_intersection(double t, double r) {
  if (!(t > 0.0) || !(r > 0.0)) {
    throw std::invalid_argument("sphere radii must be positive");
  }
  SphereIntersection out;
  out.c = 0.5 * (1.0 + t * t - r * r);
  const double outer = (t + r - 1.0) * (t + r + 1.0);  // (t + r)^2 - 1
  const double inner = (1.0 - t + r) * (1.0 + t - r);  // 1 - (t - r)^2
  out.nonempty = outer > 0.0 && inner > 0.0;
  out.rho = out.nonempty ? 0.5 * std::sqrt(outer * inner) : 0.0;
  return out;
}

double lens_volume(const Dimension& dim, double a, double t, double r) {
  if (!(t > 0.0) || !(r > 0.0)) {
    throw std::invalid_argument("lens radii must be positive");
  }
  if (!(a >= 0.0)) throw std::invalid_argument("centre distance must be >= 0");
  if (a >= t + r) return 0.0;
  if (a + r <= t) return ball_volume(dim, r);
  if (a + t <= r) return ball_volume(dim, t);
  // The radical hyperplane sits at x_1 = (a^2 + t^2 - r^2) / (2a); both cap
  // heights are written in product form to avoid cancellation.
  const double two_a = 2.0 * a;
  const double h_t = (r - a + t) * (r + a - t) / two_a;
  const double h_r = (t - a + r) * (t + a - r) / two_a;
  return cap_volume(dim, t, h_t) + cap_volume(dim, r, h_r);
}

AxisBox linf_ball(int d, Rational a, Rational r) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (r <= 0) throw std::invalid_argument("box radius must be positive");
  AxisBox box;
  box.lo.assign(d, -r);
  box.hi.assign(d, r);
  box.lo[0] = a - r;
  box.hi[0] = a + r;
  return box;
}

Rational box_volume(const AxisBox& box) {
  Rational v(1);
  for (std::size_t i = 0; i < box.lo.size(); ++i) v *= box.hi[i] - box.lo[i];
  return v;
}

Rational box_intersection_volume(const AxisBox& x, const AxisBox& y) {
  if (x.lo.size() != y.lo.size()) {
    throw std::invalid_argument("box dimensions differ");
  }
  Rational v(1);
  for (std::size_t i = 0; i < x.lo.size(); ++i) {
    const Rational lo = std::max(x.lo[i], y.lo[i]);
    const Rational hi = std::min(x.hi[i], y.hi[i]);
    if (hi <= lo) return Rational(0);
    v *= hi - lo;
  }
  return v;
}

BoxAverages box_average_geometry(int d) {
  // (3/2)^d must fit the 64-bit rational representation.
  if (d < 1 || d > 32) {
    throw std::invalid_argument("box geometry supports 1 <= d <= 32, got " +
                                std::to_string(d));
  }
  const AxisBox support = linf_ball(d, Rational(0), Rational(1, 2));
  const AxisBox centered = linf_ball(d, Rational(0), Rational(3, 4));
  const AxisBox shifted = linf_ball(d, Rational(3, 4), Rational(1, 2));
  return {box_intersection_volume(support, centered) / box_volume(centered),
          box_intersection_volume(support, shifted) / box_volume(shifted)};
}

}  // namespace radmax
