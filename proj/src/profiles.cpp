#include "radmax/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <stdexcept>

#include "radmax/quadrature.hpp"
#include "radmax/special.hpp"

namespace radmax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_values(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw std::invalid_argument("profile values must be finite and >= 0");
    }
    if (i > 0 && values[i] > values[i - 1]) {
      throw std::invalid_argument(fmt::format(
          "profile must be nonincreasing: value {} at index {} exceeds {}",
          values[i], i, values[i - 1]));
    }
  }
}

void check_radii(const std::vector<double>& radii, bool allow_zero) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const bool ok = std::isfinite(radii[i]) &&
                    (allow_zero ? radii[i] >= 0.0 : radii[i] > 0.0);
    if (!ok) throw std::invalid_argument("profile radii must be finite and positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) {
      throw std::invalid_argument("profile radii must be strictly increasing");
    }
  }
}

// Lower regularized gamma P(n, x) for integer n >= 1, from whichever
// positive-term series is free of cancellation.
double gamma_p_integer(int n, double x) {
  if (x <= 0.0) return 0.0;
  if (x < n + 1.0) {
    // e^{-x} sum_{k >= n} x^k / k!
    double term = std::exp(n * std::log(x) - x - std::lgamma(n + 1.0));
    double sum = term;
    for (int k = n + 1; k < n + 2000; ++k) {
      term *= x / k;
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::min(1.0, sum);
  }
  // 1 - e^{-x} sum_{k < n} x^k / k!
  double term = std::exp(-x);
  double sum = term;
  for (int k = 1; k < n; ++k) {
    term *= x / k;
    sum += term;
  }
  return std::max(0.0, 1.0 - sum);
}

// Integral of f(u) * |S^{d-1}| u^{d-1} over [lo, hi] for a linear f; a single
// GK21 panel is exact for the polynomial degrees that occur when d <= 29.
double linear_shell_mass(const Dimension& dim, double lo, double hi, double v_lo,
                         double v_hi) {
  if (!(hi > lo)) return 0.0;
  const double slope = (v_hi - v_lo) / (hi - lo);
  const double area = dim.unit_sphere_area();
  const int d = dim.value();
  auto f = [&](double u) {
    return (v_lo + slope * (u - lo)) * area * std::pow(u, d - 1);
  };
  if (d <= 29) return gauss_kronrod21(f, lo, hi).value;
  return integrate(f, lo, hi, {0.0, 1e-14, 200}).value;
}

double builtin_base_mass(const Dimension& dim, const BuiltinProfile& b, double x) {
  const int d = dim.value();
  const double omega = dim.unit_ball_volume();
  switch (b.kind) {
    case BuiltinKind::BallIndicator:
      return omega * std::pow(std::min(x, 1.0), d);
    case BuiltinKind::Psi: {
      const double m = std::min(x, 1.0);
      return omega * std::pow(m, d) * (1.0 - d * m / (d + 1.0));
    }
    case BuiltinKind::TruncatedPower: {
      if (b.gamma >= d) return kInf;
      const double m = std::min(x, 1.0);
      return d * omega * std::pow(m, d - b.gamma) / (d - b.gamma);
    }
    case BuiltinKind::Exponential:
      return d * omega * std::exp(std::lgamma(d)) * gamma_p_integer(d, x);
  }
  return 0.0;
}

double builtin_base_lp(const Dimension& dim, const BuiltinProfile& b, double p) {
  const int d = dim.value();
  const double area = dim.unit_sphere_area();
  double pth_power = 0.0;
  switch (b.kind) {
    case BuiltinKind::BallIndicator:
      pth_power = dim.unit_ball_volume();
      break;
    case BuiltinKind::Psi:
      pth_power = area * std::exp(log_beta(d, p + 1.0));
      break;
    case BuiltinKind::TruncatedPower:
      if (b.gamma * p >= d) return kInf;
      pth_power = area / (d - b.gamma * p);
      break;
    case BuiltinKind::Exponential:
      pth_power = area * std::exp(std::lgamma(d) - d * std::log(p));
      break;
  }
  return std::pow(pth_power, 1.0 / p);
}

double builtin_base_value(const BuiltinProfile& b, double x) {
  switch (b.kind) {
    case BuiltinKind::BallIndicator:
      return x <= 1.0 ? 1.0 : 0.0;
    case BuiltinKind::Psi:
      return x < 1.0 ? 1.0 - x : 0.0;
    case BuiltinKind::TruncatedPower:
      return x <= 1.0 ? std::pow(x, -b.gamma) : 0.0;
    case BuiltinKind::Exponential:
      return std::exp(-x);
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

RadialProfile RadialProfile::piecewise_constant(std::vector<double> breaks,
                                                std::vector<double> values) {
  if (breaks.size() != values.size()) {
    throw std::invalid_argument("piecewise-constant profile needs one value per break");
  }
  check_radii(breaks, false);
  check_values(values);
  return RadialProfile(PiecewiseConstant{std::move(breaks), std::move(values)});
}

RadialProfile RadialProfile::piecewise_linear(std::vector<double> radii,
                                              std::vector<double> values) {
  if (radii.size() != values.size() || radii.empty()) {
    throw std::invalid_argument("piecewise-linear profile needs matching, nonempty knots");
  }
  check_radii(radii, true);
  check_values(values);
  return RadialProfile(PiecewiseLinear{std::move(radii), std::move(values)});
}

RadialProfile RadialProfile::builtin(BuiltinProfile spec) {
  if (!(spec.height >= 0.0) || !std::isfinite(spec.height)) {
    throw std::invalid_argument("builtin height must be finite and >= 0");
  }
  if (!(spec.length > 0.0) || !std::isfinite(spec.length)) {
    throw std::invalid_argument("builtin length must be finite and positive");
  }
  if (!(spec.gamma >= 0.0) || !std::isfinite(spec.gamma)) {
    throw std::invalid_argument("power exponent must be finite and >= 0");
  }
  if (spec.kind != BuiltinKind::TruncatedPower) spec.gamma = 0.0;
  return RadialProfile(spec);
}

RadialProfile RadialProfile::ball_indicator() {
  return builtin({BuiltinKind::BallIndicator});
}
RadialProfile RadialProfile::psi() { return builtin({BuiltinKind::Psi}); }
RadialProfile RadialProfile::truncated_power(double gamma) {
  return builtin({BuiltinKind::TruncatedPower, gamma});
}
RadialProfile RadialProfile::exponential() {
  return builtin({BuiltinKind::Exponential});
}
RadialProfile RadialProfile::zero() { return piecewise_constant({}, {}); }

RadialProfile RadialProfile::spike(const Dimension& dim, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("spike radius must be positive");
  return piecewise_constant({eps}, {1.0 / ball_volume(dim, eps)});
}

// ---------------------------------------------------------------------------
// Pointwise queries

double RadialProfile::operator()(double s) const {
  return std::visit(
      Overloaded{
          [&](const PiecewiseConstant& pc) {
            auto it = std::lower_bound(pc.breaks.begin(), pc.breaks.end(), s);
            return it == pc.breaks.end() ? 0.0
                                         : pc.values[it - pc.breaks.begin()];
          },
          [&](const PiecewiseLinear& pl) {
            if (s <= pl.radii.front()) return pl.values.front();
            if (s > pl.radii.back()) return 0.0;
            auto it = std::lower_bound(pl.radii.begin(), pl.radii.end(), s);
            const std::size_t i = it - pl.radii.begin();
            const double w = (s - pl.radii[i - 1]) / (pl.radii[i] - pl.radii[i - 1]);
            return pl.values[i - 1] + w * (pl.values[i] - pl.values[i - 1]);
          },
          [&](const BuiltinProfile& b) {
            return b.height * builtin_base_value(b, s / b.length);
          },
      },
      rep_);
}

double RadialProfile::right_limit(double s) const {
  return std::visit(
      Overloaded{
          [&](const PiecewiseConstant& pc) {
            auto it = std::upper_bound(pc.breaks.begin(), pc.breaks.end(), s);
            return it == pc.breaks.end() ? 0.0
                                         : pc.values[it - pc.breaks.begin()];
          },
          [&](const PiecewiseLinear& pl) {
            return s >= pl.radii.back() ? 0.0 : (*this)(s);
          },
          [&](const BuiltinProfile& b) {
            const double x = s / b.length;
            if (b.kind == BuiltinKind::Exponential || b.kind == BuiltinKind::Psi) {
              return b.height * builtin_base_value(b, x);
            }
            return x < 1.0 ? b.height * builtin_base_value(b, x) : 0.0;
          },
      },
      rep_);
}

double RadialProfile::sup() const {
  return std::visit(
      Overloaded{
          [](const PiecewiseConstant& pc) {
            return pc.values.empty() ? 0.0 : pc.values.front();
          },
          [](const PiecewiseLinear& pl) { return pl.values.front(); },
          [](const BuiltinProfile& b) {
            if (b.kind == BuiltinKind::TruncatedPower && b.gamma > 0.0 &&
                b.height > 0.0) {
              return kInf;
            }
            return b.height;
          },
      },
      rep_);
}

double RadialProfile::support_bound() const {
  return std::visit(
      Overloaded{
          [](const PiecewiseConstant& pc) {
            for (std::size_t k = pc.values.size(); k-- > 0;) {
              if (pc.values[k] > 0.0) return pc.breaks[k];
            }
            return 0.0;
          },
          [](const PiecewiseLinear& pl) {
            if (pl.values.back() > 0.0) return pl.radii.back();
            for (std::size_t i = 0; i < pl.values.size(); ++i) {
              if (pl.values[i] == 0.0) return pl.radii[i];
            }
            return pl.radii.back();
          },
          [](const BuiltinProfile& b) {
            if (b.height == 0.0) return 0.0;
            return b.kind == BuiltinKind::Exponential ? kInf : b.length;
          },
      },
      rep_);
}

double RadialProfile::origin_exponent() const {
  const auto* b = std::get_if<BuiltinProfile>(&rep_);
  return b && b->kind == BuiltinKind::TruncatedPower ? b->gamma : 0.0;
}

std::vector<double> RadialProfile::kinks() const {
  return std::visit(
      Overloaded{
          [](const PiecewiseConstant& pc) { return pc.breaks; },
          [](const PiecewiseLinear& pl) {
            std::vector<double> out;
            for (double r : pl.radii) {
              if (r > 0.0) out.push_back(r);
            }
            return out;
          },
          [](const BuiltinProfile& b) {
            return b.kind == BuiltinKind::Exponential ? std::vector<double>{}
                                                      : std::vector<double>{b.length};
          },
      },
      rep_);
}

// ---------------------------------------------------------------------------
// Integrals

double RadialProfile::ball_mass(const Dimension& dim, double s) const {
  if (!(s > 0.0)) return 0.0;
  const int d = dim.value();
  return std::visit(
      Overloaded{
          [&](const PiecewiseConstant& pc) {
            double mass = 0.0;
            double inner = 0.0;
            for (std::size_t k = 0; k < pc.breaks.size() && inner < s; ++k) {
              const double outer = std::min(s, pc.breaks[k]);
              mass += pc.values[k] * (std::pow(outer, d) - std::pow(inner, d));
              inner = pc.breaks[k];
            }
            return dim.unit_ball_volume() * mass;
          },
          [&](const PiecewiseLinear& pl) {
            const double core = std::min(s, pl.radii.front());
            double mass = core > 0.0 ? pl.values.front() * ball_volume(dim, core) : 0.0;
            for (std::size_t i = 1; i < pl.radii.size(); ++i) {
              const double lo = pl.radii[i - 1];
              if (lo >= s) break;
              const double hi = std::min(s, pl.radii[i]);
              const double w = (hi - lo) / (pl.radii[i] - lo);
              const double v_hi = pl.values[i - 1] + w * (pl.values[i] - pl.values[i - 1]);
              mass += linear_shell_mass(dim, lo, hi, pl.values[i - 1], v_hi);
            }
            return mass;
          },
          [&](const BuiltinProfile& b) {
            if (b.height == 0.0) return 0.0;
            return b.height * std::pow(b.length, d) *
                   builtin_base_mass(dim, b, s / b.length);
          },
      },
      rep_);
}

double RadialProfile::lp_norm(const Dimension& dim, double p) const {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
  const int d = dim.value();
  return std::visit(
      Overloaded{
          [&](const PiecewiseConstant& pc) {
            double sum = 0.0;
            double inner = 0.0;
            for (std::size_t k = 0; k < pc.breaks.size(); ++k) {
              sum += std::pow(pc.values[k], p) *
                     (std::pow(pc.breaks[k], d) - std::pow(inner, d));
              inner = pc.breaks[k];
            }
            return std::pow(dim.unit_ball_volume() * sum, 1.0 / p);
          },
          [&](const PiecewiseLinear& pl) {
            if (p == 1.0) return ball_mass(dim, pl.radii.back());
            double sum = std::pow(pl.values.front(), p) *
                         dim.unit_ball_volume() * std::pow(pl.radii.front(), d);
            const double area = dim.unit_sphere_area();
            for (std::size_t i = 1; i < pl.radii.size(); ++i) {
              const double lo = pl.radii[i - 1];
              const double hi = pl.radii[i];
              const double v0 = pl.values[i - 1];
              const double slope = (pl.values[i] - v0) / (hi - lo);
              auto f = [&](double u) {
                const double v = std::max(0.0, v0 + slope * (u - lo));
                return std::pow(v, p) * area * std::pow(u, d - 1);
              };
              sum += integrate_smoothed(f, lo, hi, {0.0, 1e-13, 500}).value;
            }
            return std::pow(sum, 1.0 / p);
          },
          [&](const BuiltinProfile& b) {
            if (b.height == 0.0) return 0.0;
            return b.height * std::pow(b.length, d / p) * builtin_base_lp(dim, b, p);
          },
      },
      rep_);
}

LevelSet RadialProfile::level_set(double m) const {
  if (!(m > 0.0)) throw std::invalid_argument("level threshold must be positive");
  LevelSet out;
  out.threshold = m;
  auto found = [&](double t) {
    out.radius = t;
    out.empty = !(t > 0.0);
    return out;
  };
  return std::visit(
      Overloaded{
          [&](const PiecewiseConstant& pc) {
            double t = 0.0;
            for (std::size_t k = 0; k < pc.values.size() && pc.values[k] >= m; ++k) {
              t = pc.breaks[k];
            }
            return found(t);
          },
          [&](const PiecewiseLinear& pl) {
            if (pl.values.front() < m) return found(0.0);
            if (pl.values.back() >= m) return found(pl.radii.back());
            std::size_t i = 0;
            while (pl.values[i + 1] >= m) ++i;
            const double frac = (pl.values[i] - m) / (pl.values[i] - pl.values[i + 1]);
            return found(pl.radii[i] + frac * (pl.radii[i + 1] - pl.radii[i]));
          },
          [&](const BuiltinProfile& b) {
            if (b.height == 0.0) return found(0.0);
            const double q = m / b.height;
            double t = 0.0;
            switch (b.kind) {
              case BuiltinKind::BallIndicator:
                t = q <= 1.0 ? 1.0 : 0.0;
                break;
              case BuiltinKind::Psi:
                t = q < 1.0 ? 1.0 - q : 0.0;
                break;
              case BuiltinKind::TruncatedPower:
                t = b.gamma > 0.0 ? std::min(1.0, std::pow(q, -1.0 / b.gamma))
                                  : (q <= 1.0 ? 1.0 : 0.0);
                break;
              case BuiltinKind::Exponential:
                t = q < 1.0 ? -std::log(q) : 0.0;
                break;
            }
            return found(b.length * t);
          },
      },
      rep_);
}

std::vector<LayerCakeTerm> RadialProfile::layer_cake() const {
  const auto* pc = std::get_if<PiecewiseConstant>(&rep_);
  if (!pc) {
    throw std::invalid_argument("layer-cake decomposition needs a piecewise-constant profile");
  }
  std::vector<LayerCakeTerm> terms;
  for (std::size_t k = 0; k < pc->values.size(); ++k) {
    const double next = k + 1 < pc->values.size() ? pc->values[k + 1] : 0.0;
    const double h = pc->values[k] - next;
    if (h > 0.0) terms.push_back({h, pc->breaks[k]});
  }
  return terms;
}

// ---------------------------------------------------------------------------

RadialProfile RadialProfile::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scale factor must be finite and >= 0");
  }
  return std::visit(
      Overloaded{
          [&](PiecewiseConstant pc) {
            for (double& v : pc.values) v *= factor;
            return RadialProfile(std::move(pc));
          },
          [&](PiecewiseLinear pl) {
            for (double& v : pl.values) v *= factor;
            return RadialProfile(std::move(pl));
          },
          [&](BuiltinProfile b) {
            b.height *= factor;
            return RadialProfile(b);
          },
      },
      rep_);
}

RadialProfile RadialProfile::dilated(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("dilation factor must be finite and positive");
  }
  return std::visit(
      Overloaded{
          [&](PiecewiseConstant pc) {
            for (double& t : pc.breaks) t *= lambda;
            return RadialProfile(std::move(pc));
          },
          [&](PiecewiseLinear pl) {
            for (double& t : pl.radii) t *= lambda;
            return RadialProfile(std::move(pl));
          },
          [&](BuiltinProfile b) {
            b.length *= lambda;
            return RadialProfile(b);
          },
      },
      rep_);
}

void RadialProfile::require_locally_integrable(const Dimension& dim) const {
  if (origin_exponent() >= dim.value()) {
    throw std::invalid_argument(fmt::format(
        "s^-{} is not locally integrable in dimension {}", origin_exponent(),
        dim.value()));
  }
}

std::string RadialProfile::describe() const {
  return std::visit(
      Overloaded{
          [](const PiecewiseConstant& pc) {
            return fmt::format("piecewise-constant({} steps)", pc.values.size());
          },
          [](const PiecewiseLinear& pl) {
            return fmt::format("piecewise-linear({} knots)", pl.values.size());
          },
          [](const BuiltinProfile& b) {
            std::string name(builtin_name(b.kind));
            if (b.kind == BuiltinKind::TruncatedPower) {
              name += fmt::format(":{}", b.gamma);
            }
            if (b.height != 1.0 || b.length != 1.0) {
              name += fmt::format("(height={}, length={})", b.height, b.length);
            }
            return name;
          },
      },
      rep_);
}

std::string_view builtin_name(BuiltinKind kind) {
  switch (kind) {
    case BuiltinKind::BallIndicator:
      return "ball-indicator";
    case BuiltinKind::Psi:
      return "psi";
    case BuiltinKind::TruncatedPower:
      return "power";
    case BuiltinKind::Exponential:
      return "exponential";
  }
  return "unknown";
}

}  // namespace radmax
