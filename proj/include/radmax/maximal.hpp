#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "radmax/geometry.hpp"
#include "radmax/profiles.hpp"

namespace radmax {

enum class BallNorm { Euclidean, Infinity };

/// A ball whose centre lies at distance `a` from the origin. Radial symmetry
/// makes the direction irrelevant for Euclidean balls; l-infinity balls are
/// taken to be centred on the positive e_1 axis.
struct BallSpec {
  double a = 0.0;
  double r = 1.0;
  BallNorm norm = BallNorm::Euclidean;
};

enum class AveragePath {
  Automatic,        // layer-cake when piecewise-constant, shells otherwise
  LayerCake,        // sum_k h_k |B(a e_1, r) n B(0, t_k)| / |B(r)|
  ShellQuadrature,  // integrate f over shells weighted by cap fractions
};

/// g(x) = f(|x|) on R^d, with the per-dimension quantities that averaging
/// and maximal-function searches reuse.
class RadialFunction {
 public:
  RadialFunction(RadialProfile profile, Dimension dim);

  const RadialProfile& profile() const noexcept { return profile_; }
  const Dimension& dimension() const noexcept { return dim_; }
  double l1_norm() const noexcept { return l1_; }
  /// Smallest L with ||g chi_{B(0, L)}||_1 >= ||g||_1 / 2 (+inf if g = 0).
  double half_mass_radius() const noexcept { return half_mass_radius_; }

  /// Average of g over B(a e_1, r).
  double average(double a, double r, AveragePath path = AveragePath::Automatic) const;
  double centered_average(double r) const;
  double layer_cake_average(double a, double r) const;
  double shell_average(double a, double r) const;

 private:
  RadialProfile profile_;
  Dimension dim_;
  double l1_;
  double half_mass_radius_;
  double support_;
  double origin_exponent_;
  std::vector<double> kinks_;
  std::vector<LayerCakeTerm> cake_;
};

double radial_average(const RadialProfile& g, const Dimension& dim,
                      const BallSpec& ball,
                      AveragePath path = AveragePath::Automatic);

struct LemmaComparison {
  double centered = 0.0;    // average over B(0, R)
  double off_center = 0.0;  // average over B(a e_1, r)
};

/// Both averages of the centred-versus-off-centre comparison. Requires
/// a >= R; inside B(0, R) the comparison genuinely fails.
LemmaComparison lemma_compare(const RadialProfile& g, const Dimension& dim,
                              double R, double a, double r);

struct SearchOptions {
  int grid_size = 256;
  double inner_ratio = 1e-6;  // smallest tried radius, relative to a
  int refinement_rounds = 3;
  int golden_iterations = 12;  // per round
  int max_refined_peaks = 8;
};

struct MaximalEvaluation {
  double a = 0.0;
  double value = 0.0;
  double argmax_r = 0.0;         // meaningful when !argmax_is_limit
  bool argmax_is_limit = true;   // the r -> 0 candidate f(a+) won
  int candidates = 0;
  int refinement_depth = 0;
  double envelope = 0.0;         // ||g||_1 / |B(0, a)|, +inf at a = 0
};

/// M_d g(a e_1) as the best average over a candidate set of radii: the
/// r -> 0 limit f(a+), a log grid, radii that touch the profile's kinks, and
/// golden-section refinement around each grid peak. Always a lower bound.
MaximalEvaluation maximal_value(const RadialFunction& g, double a,
                                const SearchOptions& options = {});
MaximalEvaluation maximal_value(const RadialProfile& g, const Dimension& dim,
                                double a, const SearchOptions& options = {});

/// M_d delta at distance a > 0: 1 / |B(0, a)|.
double delta_maximal(const Dimension& dim, double a);

struct EnvelopeAudit {
  std::uint64_t evaluations = 0;
  std::uint64_t violations = 0;
  double worst_ratio = 0.0;  // max of value / envelope over a > 0
};

/// Process-wide tally of value <= ||g||_1 M_d delta over every
/// maximal_value call made so far.
EnvelopeAudit envelope_audit();
void reset_envelope_audit();

struct DistributionOptions {
  int grid_points = 2048;
  int bisection_steps = 20;
  SearchOptions search;
  unsigned jobs = 1;
};

/// |{M_d g > alpha}| from a uniform radial grid on [0, s_max] with
/// s_max = (||g||_1 / (alpha omega_d))^{1/d}, bisecting every sign change.
double distribution_measure(const RadialFunction& g, double alpha,
                            const DistributionOptions& options = {});

struct DistributionCurve {
  std::vector<double> alphas;
  std::vector<double> measures;
  std::vector<MaximalEvaluation> evaluations;  // every grid/bisection point
};

/// Same quantity for many alphas at once. Grid points are shared: a
/// geometric radial grid spanning all the alphas' s_max values, with
/// per-alpha bisection at each sign change.
DistributionCurve distribution_curve(const RadialFunction& g,
                                     std::span<const double> alphas,
                                     const DistributionOptions& options = {});

// ---------------------------------------------------------------------------
// l-infinity balls and the restricted planar measure.

/// Average of chi_{[-s, s]^d} over the l-infinity ball of radius r centred
/// at a e_1, in exact arithmetic.
Rational linf_average_exact(int d, Rational support, Rational a, Rational r);

/// l-infinity analogue of radial_average for indicator-type profiles
/// (a single step, read as a function of |x|_inf).
double linf_average(const RadialProfile& g, int d, const BallSpec& ball);

/// For d = 2 and mu = Lebesgue measure restricted to B(0, 1): the mu-average
/// of psi(x) = (1 - |x|)_+ over the Euclidean ball `ball`, optionally only
/// over polar angles |phi| <= half_angle. Evaluated by polar quadrature.
double restricted_measure_average(const BallSpec& ball,
                                  double half_angle = 3.14159265358979323846);

}  // namespace radmax
