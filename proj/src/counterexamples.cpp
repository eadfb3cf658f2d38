// l-infinity balls and the restricted planar measure: the settings in which
// the centred-beats-off-centre comparison stops holding.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "radmax/errors.hpp"
#include "radmax/maximal.hpp"
#include "radmax/quadrature.hpp"

namespace radmax {

Rational linf_average_exact(int d, Rational support, Rational a, Rational r) {
  const AxisBox ball = linf_ball(d, a, r);
  return box_intersection_volume(linf_ball(d, Rational(0), support), ball) /
         box_volume(ball);
}

double linf_average(const RadialProfile& g, int d, const BallSpec& ball) {
  if (ball.norm != BallNorm::Infinity) {
    throw std::invalid_argument("linf_average takes l-infinity balls");
  }
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(ball.r > 0.0)) throw std::invalid_argument("ball radius must be positive");
  double height = 0.0;
  double support = 0.0;
  const auto& rep = g.representation();
  if (const auto* pc = std::get_if<PiecewiseConstant>(&rep);
      pc && g.layer_cake().size() <= 1) {
    const auto cake = g.layer_cake();
    if (!cake.empty()) {
      height = cake.front().height;
      support = cake.front().radius;
    }
  } else if (const auto* b = std::get_if<BuiltinProfile>(&rep);
             b && b->kind == BuiltinKind::BallIndicator) {
    height = b->height;
    support = b->length;
  } else {
    throw std::invalid_argument("linf_average supports indicator profiles only");
  }
  if (height == 0.0) return 0.0;
  double overlap = 1.0;
  double volume = 1.0;
  for (int i = 0; i < d; ++i) {
    const double lo = i == 0 ? ball.a - ball.r : -ball.r;
    const double hi = i == 0 ? ball.a + ball.r : ball.r;
    overlap *= std::max(0.0, std::min(hi, support) - std::max(lo, -support));
    volume *= hi - lo;
  }
  return height * overlap / volume;
}

double restricted_measure_average(const BallSpec& ball, double half_angle) {
  if (ball.norm != BallNorm::Euclidean) {
    throw std::invalid_argument("restricted measure average uses Euclidean balls");
  }
  const double a = ball.a;
  const double r = ball.r;
  if (!(a >= 0.0) || !(r > 0.0)) throw std::invalid_argument("invalid ball");
  if (!(half_angle > 0.0)) throw std::invalid_argument("half angle must be positive");

  // Along the ray at polar angle phi the ball occupies s in [s1, s2], the
  // roots of s^2 - 2 a s cos(phi) + a^2 - r^2 = 0; the measure keeps s <= 1.
  auto radial_span = [&](double phi, double& lo, double& hi) {
    const double sn = std::sin(phi);
    const double disc = (r - a * sn) * (r + a * sn);
    if (disc <= 0.0) return false;
    const double root = std::sqrt(disc);
    const double mid = a * std::cos(phi);
    lo = std::max(0.0, mid - root);
    hi = std::min(1.0, mid + root);
    return hi > lo;
  };
  // psi-mass and area densities per unit angle.
  auto mass_density = [&](double phi) {
    double lo = 0.0, hi = 0.0;
    if (!radial_span(phi, lo, hi)) return 0.0;
    auto antiderivative = [](double s) { return s * s * (0.5 - s / 3.0); };
    return antiderivative(hi) - antiderivative(lo);
  };
  auto area_density = [&](double phi) {
    double lo = 0.0, hi = 0.0;
    if (!radial_span(phi, lo, hi)) return 0.0;
    return 0.5 * (hi - lo) * (hi + lo);
  };

  const double pi = std::numbers::pi;
  double phi_max = a > r ? std::asin(r / a) : pi;
  phi_max = std::min(phi_max, half_angle);
  std::vector<double> cuts{0.0};
  // Angles where the ball's boundary crosses |x| = 1, and where the origin
  // sits on the boundary (a = r).
  const double c = (1.0 + a * a - r * r) / (2.0 * a);
  if (a > 0.0 && c > -1.0 && c < 1.0) cuts.push_back(std::acos(c));
  if (a == r) cuts.push_back(0.5 * pi);
  cuts.push_back(phi_max);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [&](double x) { return x > phi_max; }),
             cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  QuadratureOptions options;
  options.abs_tol = 1e-15;
  options.rel_tol = 1e-14;
  double mass = 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const auto m = integrate_smoothed(mass_density, cuts[i], cuts[i + 1], options);
    const auto v = integrate_smoothed(area_density, cuts[i], cuts[i + 1], options);
    if (!m.converged || !v.converged) {
      throw NumericalError("polar quadrature did not converge", std::max(m.error, v.error));
    }
    mass += m.value;
    area += v.value;
  }
  if (!(area > 0.0)) {
    throw std::invalid_argument("ball does not meet the support of the measure");
  }
  return mass / area;
}

}  // namespace radmax
