#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <vector>

namespace radmax {

/// Ambient dimension d >= 1 of R^d, with the constants every volume
/// computation needs precomputed once.
class Dimension {
 public:
  explicit Dimension(int d);

  int value() const noexcept { return d_; }
  /// omega_d = pi^{d/2} / Gamma(d/2 + 1).
  double unit_ball_volume() const noexcept { return omega_; }
  /// Surface area of the unit sphere S^{d-1}, d * omega_d.
  double unit_sphere_area() const noexcept { return d_ * omega_; }

  // log B((d+1)/2, 1/2) and log B((d-1)/2, 1/2); the second is NaN for d = 1.
  double log_beta_cap_volume() const noexcept { return lbeta_volume_; }
  double log_beta_cap_area() const noexcept { return lbeta_area_; }

  friend bool operator==(const Dimension& x, const Dimension& y) {
    return x.d_ == y.d_;
  }

 private:
  int d_;
  double omega_;
  double lbeta_volume_;
  double lbeta_area_;
};

/// Lebesgue measure of a Euclidean ball of radius r > 0.
double ball_volume(const Dimension& dim, double r);

/// Fraction of the surface of S^{d-1} lying within polar angle theta of a
/// pole, theta in [0, pi]. For d = 1 the "sphere" is two points, so the
/// fraction jumps 0 -> 1/2 -> 1.
double cap_fraction(const Dimension& dim, double theta);

/// Same as cap_fraction but parametrised by 1 - cos(theta) and
/// 1 + cos(theta), which callers can usually form without cancellation.
double cap_fraction_from_cos(const Dimension& dim, double one_minus_cos,
                             double one_plus_cos);

/// Volume of the cap of height h in [0, 2R] cut from a ball of radius R.
double cap_volume(const Dimension& dim, double radius, double height);

/// Where the spheres |x| = t and |x - e_1| = r meet (the reference ball has
/// been normalised to radius 1 with the off-centre point at e_1).
struct SphereIntersection {
  double c = 0.0;    // first coordinate of the (d-2)-sphere's centre
  double rho = 0.0;  // its radius
  bool nonempty = false;
};

SphereIntersection sphere_intersection(double t, double r);

/// Volume of B(a e_1, r) intersected with B(0, t).
double lens_volume(const Dimension& dim, double a, double t, double r);

// ---------------------------------------------------------------------------
// Axis-aligned boxes with rational corners (l-infinity balls).

using Rational = boost::rational<std::int64_t>;

struct AxisBox {
  std::vector<Rational> lo;
  std::vector<Rational> hi;
};

/// The l-infinity ball centred at a*e_1 with radius r in dimension d:
/// [a - r, a + r] x [-r, r]^{d-1}.
AxisBox linf_ball(int d, Rational a, Rational r);

Rational box_volume(const AxisBox& box);
Rational box_intersection_volume(const AxisBox& x, const AxisBox& y);

struct BoxAverages {
  Rational centered;  // average of chi_{[-1/2,1/2]^d} over [-3/4, 3/4]^d
  Rational shifted;   // ... over [1/4, 5/4] x [-1/2, 1/2]^{d-1}
};

/// The two averages of the l-infinity comparison that breaks the
/// centred-beats-off-centre inequality once d >= 4. Computed from box
/// intersection volumes, not from a closed form.
BoxAverages box_average_geometry(int d);

inline double to_double(const Rational& q) {
  return boost::rational_cast<double>(q);
}

}  // namespace radmax
