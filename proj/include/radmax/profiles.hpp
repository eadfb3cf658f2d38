#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "radmax/geometry.hpp"

namespace radmax {

/// f = values[k] on (breaks[k-1], breaks[k]] (breaks[-1] = 0), zero beyond
/// the last break. Left-continuous, so {f >= m} is always a closed ball.
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values;
};

/// Linear interpolation through (radii[i], values[i]); constant values[0]
/// below radii[0] and zero beyond radii.back().
struct PiecewiseLinear {
  std::vector<double> radii;
  std::vector<double> values;
};

enum class BuiltinKind {
  BallIndicator,   // 1 on (0, 1]
  Psi,             // (1 - s)_+
  TruncatedPower,  // s^{-gamma} on (0, 1]
  Exponential,     // e^{-s}
};

/// A named analytic profile, evaluated as height * base(s / length).
struct BuiltinProfile {
  BuiltinKind kind = BuiltinKind::BallIndicator;
  double gamma = 0.0;
  double height = 1.0;
  double length = 1.0;
};

struct LevelSet {
  double threshold = 0.0;
  double radius = 0.0;  // {g >= threshold} = B(0, radius)
  bool empty = true;
};

struct LayerCakeTerm {
  double height = 0.0;
  double radius = 0.0;
};

/// A nonnegative, nonincreasing function of the radius on (0, inf). The
/// induced radial function on R^d is g(x) = f(|x|_2).
class RadialProfile {
 public:
  using Representation =
      std::variant<PiecewiseConstant, PiecewiseLinear, BuiltinProfile>;

  /// Throws std::invalid_argument unless breaks are positive and strictly
  /// increasing and values are nonnegative and nonincreasing.
  static RadialProfile piecewise_constant(std::vector<double> breaks,
                                          std::vector<double> values);
  static RadialProfile piecewise_linear(std::vector<double> radii,
                                        std::vector<double> values);
  static RadialProfile builtin(BuiltinProfile spec);

  static RadialProfile ball_indicator();
  static RadialProfile psi();
  static RadialProfile truncated_power(double gamma);
  static RadialProfile exponential();
  static RadialProfile zero();
  /// Indicator of B(0, eps) normalised to unit mass in dimension d.
  static RadialProfile spike(const Dimension& dim, double eps);

  const Representation& representation() const noexcept { return rep_; }
  bool is_piecewise_constant() const noexcept {
    return std::holds_alternative<PiecewiseConstant>(rep_);
  }

  /// f(s) for s > 0 (left-continuous at jumps).
  double operator()(double s) const;
  /// f(s+).
  double right_limit(double s) const;
  /// f(0+); +inf for singular power profiles.
  double sup() const;
  /// Smallest radius beyond which f vanishes, or +inf.
  double support_bound() const;
  /// Exponent of the s^{-gamma} blow-up at the origin, 0 if bounded.
  double origin_exponent() const;
  /// Radii where f or its derivative jumps, ascending.
  std::vector<double> kinks() const;

  /// Integral of g over B(0, s).
  double ball_mass(const Dimension& dim, double s) const;
  /// ||g||_p in R^d; +inf when divergent.
  double lp_norm(const Dimension& dim, double p) const;
  /// {g >= m} = B(0, t) with t = sup{s : f(s) >= m}.
  LevelSet level_set(double m) const;
  /// g = sum_k height_k * chi_{B(0, radius_k)}; piecewise-constant only.
  std::vector<LayerCakeTerm> layer_cake() const;

  RadialProfile scaled(double factor) const;
  /// s -> f(s / lambda).
  RadialProfile dilated(double lambda) const;

  /// Rejects profiles whose g is not locally integrable in R^d.
  void require_locally_integrable(const Dimension& dim) const;

  std::string describe() const;

 private:
  explicit RadialProfile(Representation rep) : rep_(std::move(rep)) {}
  Representation rep_;
};

// Plain-text profile files: '#' comments, then a header line naming the
// representation ("piecewise-constant", "piecewise-linear", or
// "builtin <name> [gamma]"), then one "radius value" record per line for the
// piecewise forms. Builtins accept optional "height x" / "length x" lines.
RadialProfile parse_profile(std::istream& in);
RadialProfile parse_profile_text(std::string_view text);
std::string format_profile(const RadialProfile& profile);

/// Builtin names accepted on the command line: ball-indicator, psi,
/// exponential, power:<gamma>.
RadialProfile builtin_profile_by_name(std::string_view name);

std::string_view builtin_name(BuiltinKind kind);

}  // namespace radmax
