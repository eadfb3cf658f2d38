#include "radmax/maximal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <stdexcept>

#include "radmax/errors.hpp"
#include "radmax/parallel.hpp"
#include "radmax/quadrature.hpp"

namespace radmax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

std::atomic<std::uint64_t> g_audit_evaluations{0};
std::atomic<std::uint64_t> g_audit_violations{0};
std::atomic<double> g_audit_worst{0.0};

void record_audit(double ratio) {
  ++g_audit_evaluations;
  if (ratio > 1.0 + 1e-9) ++g_audit_violations;
  double seen = g_audit_worst.load();
  while (ratio > seen && !g_audit_worst.compare_exchange_weak(seen, ratio)) {
  }
}

double shell_volume(const Dimension& dim, double lo, double hi) {
  const int d = dim.value();
  return dim.unit_ball_volume() * (std::pow(hi, d) - std::pow(lo, d));
}

}  // namespace

// ---------------------------------------------------------------------------
// Averages

RadialFunction::RadialFunction(RadialProfile profile, Dimension dim)
    : profile_(std::move(profile)), dim_(dim) {
  profile_.require_locally_integrable(dim_);
  l1_ = profile_.lp_norm(dim_, 1.0);
  support_ = profile_.support_bound();
  origin_exponent_ = profile_.origin_exponent();
  kinks_ = profile_.kinks();
  if (profile_.is_piecewise_constant()) cake_ = profile_.layer_cake();
  // Radius of the ball about the origin holding half the mass.
  half_mass_radius_ = kInf;
  if (std::isfinite(l1_) && l1_ > 0.0) {
    double lo = 0.0;
    double hi = kinks_.empty() ? 1.0 : kinks_.back();
    while (profile_.ball_mass(dim_, hi) < 0.5 * l1_) {
      lo = hi;
      hi *= 2.0;
    }
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (profile_.ball_mass(dim_, mid) < 0.5 * l1_ ? lo : hi) = mid;
    }
    half_mass_radius_ = hi;
  }
}

double RadialFunction::centered_average(double r) const {
  return profile_.ball_mass(dim_, r) / ball_volume(dim_, r);
}

double RadialFunction::average(double a, double r, AveragePath path) const {
  if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (!(a >= 0.0)) throw std::invalid_argument("centre distance must be >= 0");
  switch (path) {
    case AveragePath::LayerCake:
      return layer_cake_average(a, r);
    case AveragePath::ShellQuadrature:
      return shell_average(a, r);
    case AveragePath::Automatic:
      break;
  }
  if (a == 0.0) return centered_average(r);
  return profile_.is_piecewise_constant() ? layer_cake_average(a, r)
                                          : shell_average(a, r);
}

double RadialFunction::layer_cake_average(double a, double r) const {
  if (!profile_.is_piecewise_constant()) {
    throw std::invalid_argument("layer-cake path needs a piecewise-constant profile");
  }
  double mass = 0.0;
  for (const auto& term : cake_) {
    mass += term.height * lens_volume(dim_, a, term.radius, r);
  }
  return mass / ball_volume(dim_, r);
}

double RadialFunction::shell_average(double a, double r) const {
  const double volume = ball_volume(dim_, r);
  if (a == 0.0) return profile_.ball_mass(dim_, r) / volume;

  double mass = 0.0;
  const double lo = std::fabs(a - r);
  if (a < r) mass += profile_.ball_mass(dim_, r - a);  // shells lying wholly inside
  const double hi = std::min(a + r, support_);
  if (!(hi > lo)) return mass / volume;

  // Bound on the partial-shell mass, used to set an absolute tolerance.
  const double scale = a > r ? profile_(lo) * volume : profile_.ball_mass(dim_, a + r);
  QuadratureOptions options;
  options.rel_tol = 1e-13;
  options.abs_tol = std::isfinite(scale) ? 1e-15 * scale : 0.0;
  // Averages below ~1e-280 are never compared against anything; without a
  // floor, subnormal integrands (exp(-s) at s ~ 750) cannot reach rel_tol.
  if (std::isfinite(volume)) options.abs_tol = std::max(options.abs_tol, 1e-280 * volume);

  const double area = dim_.unit_sphere_area();
  const int d = dim_.value();
  const double two_a = 2.0 * a;
  const double a_minus_r = a - r;
  const double a_plus_r = a + r;
  auto integrand = [&](double s) {
    if (!(s > lo) || !(s < a + r)) return 0.0;
    // Both factors vanish at s = |a - r|; written as s -/+ (a - r) they stay
    // exact there (the shell's lower limit is that same difference).
    const double omc = (s - a_minus_r) * (a_plus_r - s) / (two_a * s);
    const double opc = (s + a_minus_r) * (a_plus_r + s) / (two_a * s);
    return profile_(s) * area * std::pow(s, d - 1) *
           cap_fraction_from_cos(dim_, omc, opc);
  };

  std::vector<double> cuts{lo};
  for (double k : kinks_) {
    if (k > lo && k < hi) cuts.push_back(k);
  }
  cuts.push_back(hi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double p = cuts[i];
    const double q = cuts[i + 1];
    QuadratureResult piece;
    if (origin_exponent_ > 0.0 && p < 1e-3 * q) {
      // s = p + (q - p) u^k flattens the s^{d-1-gamma} behaviour near 0.
      const double excess = d - origin_exponent_;
      const double k = std::max(1.0, std::ceil(excess) / excess);
      auto mapped = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double s = p + (q - p) * std::pow(u, k);
        return integrand(s) * (q - p) * k * std::pow(u, k - 1.0);
      };
      piece = integrate(mapped, 0.0, 1.0, options);
    } else if (r >= 0.5 * a) {
      piece = integrate_smoothed(integrand, p, q, options);
    } else {
      // Thin shells near s = a: integrate in v = s - a so that nodes are not
      // quantised to ulp(a) relative to a width of order r.
      const double vp = i == 0 ? (a > r ? -r : r - 2.0 * a) : p - a;
      const double vq = q == a + r ? r : q - a;
      auto shifted = [&](double v) {
        const double s = a + v;
        if (!(v > vp) || !(v < r) || !(s > 0.0)) return 0.0;
        const double omc = (r + v) * (r - v) / (two_a * s);
        const double opc = (two_a + v - r) * (two_a + v + r) / (two_a * s);
        return profile_(s) * area * std::pow(s, d - 1) * cap_fraction_from_cos(dim_, omc, opc);
      };
      // Radii near a carry an absolute error of ulp(a), which profiles with
      // a kink or zero close by turn into relative noise of about
      // eps * a / (q - p); asking for more than that cannot converge.
      QuadratureOptions local = options;
      local.rel_tol = std::max(options.rel_tol,
                               64.0 * std::numeric_limits<double>::epsilon() * std::max(a, r) / (vq - vp));
      piece = integrate_smoothed(shifted, vp, vq, local);
    }
    if (!piece.converged) {
      throw NumericalError(
          fmt::format("shell quadrature did not converge on [{}, {}] (a={}, r={})",
                      p, q, a, r),
          piece.error);
    }
    mass += piece.value;
  }
  // The average lies between the values at the nearest and farthest points;
  // quadrature noise near a kink can otherwise step just outside.
  const double nearest = a > r ? profile_(a - r) : profile_.sup();
  return std::clamp(mass / volume, profile_(a + r), nearest);
}

double radial_average(const RadialProfile& g, const Dimension& dim,
                      const BallSpec& ball, AveragePath path) {
  if (ball.norm != BallNorm::Euclidean) {
    throw std::invalid_argument("radial_average takes Euclidean balls; use linf_average");
  }
  return RadialFunction(g, dim).average(ball.a, ball.r, path);
}

LemmaComparison lemma_compare(const RadialProfile& g, const Dimension& dim,
                              double R, double a, double r) {
  if (!(R > 0.0) || !(r > 0.0)) throw std::invalid_argument("radii must be positive");
  if (!(a >= R)) {
    throw std::invalid_argument(
        "the off-centre ball's centre must lie outside the open ball B(0, R)");
  }
  const RadialFunction fn(g, dim);
  return {fn.centered_average(R), fn.average(a, r)};
}

// ---------------------------------------------------------------------------
// Maximal function

MaximalEvaluation maximal_value(const RadialFunction& g, double a,
                                const SearchOptions& options) {
  if (!(a >= 0.0)) throw std::invalid_argument("evaluation radius must be >= 0");
  const auto& f = g.profile();
  const auto& dim = g.dimension();
  MaximalEvaluation ev;
  ev.a = a;
  ev.value = a == 0.0 ? f.sup() : f.right_limit(a);
  ev.argmax_is_limit = true;
  ev.candidates = 1;
  ev.envelope = a > 0.0 ? g.l1_norm() / ball_volume(dim, a) : kInf;
  // Centred averages of a nonincreasing profile never exceed f(0+).
  if (a == 0.0 || g.l1_norm() == 0.0) return ev;

  // Averages over balls of radius r are at most ||g||_1 / |B(r)|, so radii
  // beyond the point where that bound drops under f(a+) cannot win; past
  // a + support the average is exactly ||g||_1 / |B(r)| and decreasing.
  double r_hi = a + f.support_bound();
  if (ev.value > 0.0) {
    r_hi = std::min(r_hi, std::pow(g.l1_norm() / (dim.unit_ball_volume() * ev.value),
                                   1.0 / dim.value()));
  }
  // B(a e_1, a + L) contains the half-mass ball B(0, L), so its average is
  // at least ||g||_1 / (2 |B(a + L)|); larger radii with a smaller bound
  // cannot win either.
  r_hi = std::min(r_hi, std::pow(2.0, 1.0 / dim.value()) * (a + g.half_mass_radius()));
  if (!std::isfinite(r_hi)) {
    throw std::invalid_argument("cannot bound the radius search for this profile");
  }
  const double r_lo = a * options.inner_ratio;

  auto consider = [&](double r, double v) {
    ++ev.candidates;
    if (v > ev.value) {
      ev.value = v;
      ev.argmax_r = r;
      ev.argmax_is_limit = false;
    }
  };

  if (r_hi > r_lo && options.grid_size >= 2) {
    std::vector<double> radii;
    radii.reserve(options.grid_size + 2 * g.profile().kinks().size());
    const double log_span = std::log(r_hi / r_lo);
    for (int i = 0; i < options.grid_size; ++i) {
      radii.push_back(r_lo * std::exp(log_span * i / (options.grid_size - 1)));
    }
    radii.back() = r_hi;
    // Balls that just reach or just swallow a level-set sphere.
    for (double t : f.kinks()) {
      for (double r : {a + t, std::fabs(a - t)}) {
        if (r > r_lo && r < r_hi) radii.push_back(r);
      }
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    std::vector<double> values(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      values[i] = g.average(a, radii[i]);
      consider(radii[i], values[i]);
    }

    // Grid peaks: >= left neighbour, > right neighbour (plateaus count once).
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const bool left_ok = i == 0 || values[i] >= values[i - 1];
      const bool right_ok = i + 1 == radii.size() || values[i] > values[i + 1];
      if (values[i] > 0.0 && left_ok && right_ok) peaks.push_back(i);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t x, std::size_t y) {
      return values[x] > values[y];
    });
    if (peaks.size() > static_cast<std::size_t>(options.max_refined_peaks)) {
      peaks.resize(options.max_refined_peaks);
    }

    for (std::size_t i : peaks) {
      const double outer_lo = radii[i == 0 ? 0 : i - 1];
      const double outer_hi = radii[std::min(i + 1, radii.size() - 1)];
      double lo = outer_lo;
      double hi = outer_hi;
      for (int round = 0; round < options.refinement_rounds && hi > lo; ++round) {
        double x1 = hi - kGolden * (hi - lo);
        double x2 = lo + kGolden * (hi - lo);
        double f1 = g.average(a, x1);
        double f2 = g.average(a, x2);
        consider(x1, f1);
        consider(x2, f2);
        for (int it = 0; it < options.golden_iterations; ++it) {
          if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = g.average(a, x2);
            consider(x2, f2);
          } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = g.average(a, x1);
            consider(x1, f1);
          }
        }
        // Re-bracket around the round's winner for the next round.
        const double best = f1 >= f2 ? x1 : x2;
        const double width = hi - lo;
        lo = std::max(outer_lo, best - 2.0 * width);
        hi = std::min(outer_hi, best + 2.0 * width);
      }
      ev.refinement_depth = options.refinement_rounds;
    }
  }

  record_audit(ev.value / ev.envelope);
  return ev;
}

MaximalEvaluation maximal_value(const RadialProfile& g, const Dimension& dim,
                                double a, const SearchOptions& options) {
  return maximal_value(RadialFunction(g, dim), a, options);
}

double delta_maximal(const Dimension& dim, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("delta maximal function is infinite at 0");
  return 1.0 / ball_volume(dim, a);
}

EnvelopeAudit envelope_audit() {
  return {g_audit_evaluations.load(), g_audit_violations.load(), g_audit_worst.load()};
}

void reset_envelope_audit() {
  g_audit_evaluations = 0;
  g_audit_violations = 0;
  g_audit_worst = 0.0;
}

// ---------------------------------------------------------------------------
// Distribution function

namespace {

double envelope_radius(const RadialFunction& g, double alpha) {
  const auto& dim = g.dimension();
  return std::pow(g.l1_norm() / (alpha * dim.unit_ball_volume()), 1.0 / dim.value());
}

// Measure contributed by [lo, hi] given the indicator at both ends; at a sign
// change the boundary is located by bisection.
template <class Indicator>
double interval_measure(const Dimension& dim, double lo, double hi, bool in_lo,
                        bool in_hi, int steps, Indicator&& inside) {
  if (in_lo == in_hi) return in_lo ? shell_volume(dim, lo, hi) : 0.0;
  double a = lo;
  double b = hi;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (a + b);
    (inside(mid) == in_lo ? a : b) = mid;
  }
  const double boundary = 0.5 * (a + b);
  return in_lo ? shell_volume(dim, lo, boundary) : shell_volume(dim, boundary, hi);
}

}  // namespace

double distribution_measure(const RadialFunction& g, double alpha,
                            const DistributionOptions& options) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!std::isfinite(g.l1_norm())) throw std::invalid_argument("profile is not integrable");
  if (g.l1_norm() == 0.0) return 0.0;
  // Outside B(0, s_max) the extremal bound ||g||_1 M_d delta <= alpha holds.
  const double s_max = envelope_radius(g, alpha);
  const int n = options.grid_points;
  std::vector<double> values(n + 1);
  parallel_for(values.size(), options.jobs, [&](std::size_t i) {
    values[i] = maximal_value(g, s_max * static_cast<double>(i) / n, options.search).value;
  });
  auto inside = [&](double s) { return maximal_value(g, s, options.search).value > alpha; };
  double measure = 0.0;
  for (int i = 0; i < n; ++i) {
    const double lo = s_max * i / n;
    const double hi = s_max * (i + 1) / n;
    measure += interval_measure(g.dimension(), lo, hi, values[i] > alpha,
                                values[i + 1] > alpha, options.bisection_steps, inside);
  }
  return measure;
}

DistributionCurve distribution_curve(const RadialFunction& g,
                                     std::span<const double> alphas,
                                     const DistributionOptions& options) {
  DistributionCurve out;
  out.alphas.assign(alphas.begin(), alphas.end());
  out.measures.assign(alphas.size(), 0.0);
  if (alphas.empty()) return out;
  for (double alpha : alphas) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  }
  if (!std::isfinite(g.l1_norm())) throw std::invalid_argument("profile is not integrable");
  if (g.l1_norm() == 0.0) return out;

  const auto [min_alpha, max_alpha] = std::minmax_element(alphas.begin(), alphas.end());
  const double s_hi = envelope_radius(g, *min_alpha);
  const double s_lo = 1e-4 * envelope_radius(g, *max_alpha);
  const int n = std::max(2, options.grid_points);
  std::vector<double> grid(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    grid[i] = s_lo * std::pow(s_hi / s_lo, static_cast<double>(i - 1) / (n - 1));
  }
  grid[n] = s_hi;

  std::vector<MaximalEvaluation> evals(grid.size());
  parallel_for(grid.size(), options.jobs, [&](std::size_t i) {
    evals[i] = maximal_value(g, grid[i], options.search);
  });
  out.evaluations = evals;

  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const double alpha = alphas[j];
    auto inside = [&](double s) {
      out.evaluations.push_back(maximal_value(g, s, options.search));
      return out.evaluations.back().value > alpha;
    };
    double measure = 0.0;
    for (int i = 0; i < n; ++i) {
      measure += interval_measure(g.dimension(), grid[i], grid[i + 1],
                                  evals[i].value > alpha, evals[i + 1].value > alpha,
                                  options.bisection_steps, inside);
    }
    out.measures[j] = measure;
  }
  return out;
}

}  // namespace radmax
