#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace radmax {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

namespace gk21 {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
// Odd indices of kNodes are the Gauss abscissae.
inline constexpr std::array<double, 11> kNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

}  // namespace gk21

/// One Gauss-Kronrod 21 panel. The error estimate is |K21 - G10|.
template <class F>
QuadratureResult gauss_kronrod21(F&& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * gk21::kKronrodWeights[10];
  double gauss = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * gk21::kNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += gk21::kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += gk21::kGaussWeights[j / 2] * pair;
  }
  QuadratureResult out;
  out.value = kronrod * half;
  out.error = std::fabs((kronrod - gauss) * half);
  out.evaluations = 21;
  return out;
}

/// Globally adaptive bisection driven by GK21 panels: the panel with the
/// largest error estimate is split until the summed estimate meets
/// max(abs_tol, rel_tol * |value|) or the interval budget runs out.
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi,
                           const QuadratureOptions& options = {}) {
  struct Panel {
    double lo, hi;
    QuadratureResult r;
  };
  if (!(hi > lo)) return {};
  std::vector<Panel> panels;
  panels.push_back({lo, hi, gauss_kronrod21(f, lo, hi)});
  QuadratureResult total = panels.front().r;
  const double min_width = 1e-14 * std::max(std::fabs(lo), std::fabs(hi));
  while (total.error > std::max(options.abs_tol,
                                options.rel_tol * std::fabs(total.value))) {
    if (static_cast<int>(panels.size()) >= options.max_intervals) {
      total.converged = false;
      break;
    }
    auto worst = std::max_element(
        panels.begin(), panels.end(),
        [](const Panel& x, const Panel& y) { return x.r.error < y.r.error; });
    const double a = worst->lo;
    const double b = worst->hi;
    const double mid = 0.5 * (a + b);
    if (b - a <= min_width) {
      total.converged = false;
      break;
    }
    Panel left{a, mid, gauss_kronrod21(f, a, mid)};
    Panel right{mid, b, gauss_kronrod21(f, mid, b)};
    *worst = left;
    panels.push_back(right);
    total.evaluations += 42;
    total.value = 0.0;
    total.error = 0.0;
    for (const auto& p : panels) {
      total.value += p.r.value;
      total.error += p.r.error;
    }
  }
  // Sum in left-to-right order so the result does not depend on the
  // refinement history.
  std::sort(panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
  total.value = 0.0;
  for (const auto& p : panels) total.value += p.r.value;
  return total;
}

/// Integrates over [lo, hi] after the substitution
/// s = lo + (hi - lo)(3u^2 - 2u^3), whose Jacobian vanishes at both ends.
/// Square-root type endpoint behaviour (shell/cap boundaries) becomes smooth.
template <class F>
QuadratureResult integrate_smoothed(F&& f, double lo, double hi,
                                    const QuadratureOptions& options = {}) {
  const double width = hi - lo;
  auto g = [&](double u) {
    const double s = lo + width * u * u * (3.0 - 2.0 * u);
    const double jac = 6.0 * width * u * (1.0 - u);
    return jac == 0.0 ? 0.0 : f(s) * jac;
  };
  return integrate(g, 0.0, 1.0, options);
}

}  // namespace radmax
