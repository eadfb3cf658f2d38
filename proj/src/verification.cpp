#include "radmax/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "radmax/parallel.hpp"
#include "radmax/special.hpp"

namespace radmax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::seed_seq make_seed(std::uint64_t seed, std::uint64_t index) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(index >> 32)};
}

void finalize(VerificationReport& report) {
  report.passed = report.worst_margin >= -report.tolerance;
}

// Keeps the cell with the smallest margin; ties go to the lowest index so
// the result does not depend on evaluation order.
struct WorstTracker {
  double margin = kInf;
  std::size_t index = 0;
  bool any = false;
  void offer(double m, std::size_t i) {
    if (!any || m < margin || (m == margin && i < index)) {
      margin = m;
      index = i;
      any = true;
    }
  }
};

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t index) {
  auto seq = make_seed(seed, index);
  engine_.seed(seq);
}

double TrialRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double TrialRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double TrialRng::log_uniform(double lo, double hi) {
  return std::exp(uniform(std::log(lo), std::log(hi)));
}

int TrialRng::integer(int lo, int hi) {
  const double span = static_cast<double>(hi) - lo + 1.0;
  return std::min(hi, lo + static_cast<int>(std::floor(uniform() * span)));
}

RadialProfile random_step_profile(TrialRng& rng, int min_steps, int max_steps,
                                  double min_break, double max_break) {
  const int n = rng.integer(min_steps, max_steps);
  std::vector<double> breaks;
  while (static_cast<int>(breaks.size()) < n) {
    const double b = rng.log_uniform(min_break, max_break);
    if (std::find(breaks.begin(), breaks.end(), b) == breaks.end()) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> heights(n);
  for (double& h : heights) h = rng.log_uniform(1e-3, 1.0);
  std::vector<double> values(n);
  double acc = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    acc += heights[k];
    values[k] = acc;
  }
  return RadialProfile::piecewise_constant(std::move(breaks), std::move(values));
}

std::vector<RadialProfile> default_suite(const Dimension& dim, const SuiteOptions& options) {
  std::vector<RadialProfile> suite;
  suite.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    TrialRng rng(options.seed, i);
    RadialProfile shape = random_step_profile(rng, options.min_steps, options.max_steps,
                                              options.min_break, options.max_break);
    const double mass = shape.ball_mass(dim, shape.support_bound());
    suite.push_back(shape.scaled(1.0 / mass));
  }
  return suite;
}

// ---------------------------------------------------------------------------

WeakTypeResult weak_type_battery(std::span<const RadialProfile> suite, const Dimension& dim,
                                 const WeakTypeOptions& options) {
  struct Slot {
    std::vector<WeakTypeCell> cells;
    EnvelopeAudit audit;
  };
  std::vector<Slot> slots(suite.size());
  DistributionOptions dist = options.distribution;
  dist.jobs = 1;

  parallel_for(suite.size(), options.jobs, [&](std::size_t i) {
    std::vector<double> alphas = options.alphas;
    if (alphas.empty()) {
      TrialRng rng(options.seed, i);
      alphas.resize(options.alphas_per_profile);
      const double unit = options.alphas_relative_to_sup ? suite[i].sup() : 1.0;
      for (double& a : alphas) a = unit * rng.log_uniform(options.alpha_min, options.alpha_max);
    }
    const RadialFunction g(suite[i], dim);
    Slot& slot = slots[i];
    if (g.l1_norm() == 0.0) {
      for (double a : alphas) slot.cells.push_back({i, a, 0.0, 0.0});
      return;
    }
    const DistributionCurve curve = distribution_curve(g, alphas, dist);
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      const double ratio = alphas[j] * curve.measures[j] / g.l1_norm();
      slot.cells.push_back({i, alphas[j], curve.measures[j], ratio});
    }
    for (const auto& e : curve.evaluations) {
      if (!(e.a > 0.0)) continue;
      const double r = e.value / e.envelope;
      ++slot.audit.evaluations;
      if (r > 1.0 + 1e-9) ++slot.audit.violations;
      slot.audit.worst_ratio = std::max(slot.audit.worst_ratio, r);
    }
  });

  WeakTypeResult out;
  out.report.battery = "weak-type";
  out.report.tolerance = options.tolerance;
  out.report.seed = options.seed;
  WorstTracker worst;
  for (auto& slot : slots) {
    for (const auto& c : slot.cells) {
      worst.offer(1.0 - c.ratio, out.cells.size());
      if (c.measure > 0.0) ++out.nonvacuous;
      out.cells.push_back(c);
    }
    out.audit.evaluations += slot.audit.evaluations;
    out.audit.violations += slot.audit.violations;
    out.audit.worst_ratio = std::max(out.audit.worst_ratio, slot.audit.worst_ratio);
  }
  out.report.trials = out.cells.size();
  out.report.worst_margin = worst.any ? worst.margin : 1.0;
  if (worst.any) {
    const auto& c = out.cells[worst.index];
    out.report.worst_case = {{"dimension", dim.value()},
                             {"profile", static_cast<double>(c.profile)},
                             {"alpha", c.alpha},
                             {"measure", c.measure},
                             {"ratio", c.ratio}};
  }
  finalize(out.report);
  return out;
}

// ---------------------------------------------------------------------------

double corollary_constant(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (std::isinf(p)) return 2.0;
  return std::pow(2.0, (p - 1.0) / p) * std::pow(p / (p - 1.0), 1.0 / p);
}

std::vector<double> maximal_lp_norms(const RadialFunction& g, std::span<const double> p_values,
                                     const LpOptions& options) {
  for (double p : p_values) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be finite and exceed 1");
  }
  const RadialProfile& f = g.profile();
  const Dimension& dim = g.dimension();
  const int d = dim.value();
  const double sup = f.sup();
  const double l1 = g.l1_norm();
  if (!std::isfinite(sup)) throw std::invalid_argument("unbounded profile: no head bound for the maximal function");
  if (!std::isfinite(l1)) throw std::invalid_argument("profile is not integrable");
  std::vector<double> norms(p_values.size(), 0.0);
  if (l1 == 0.0 || p_values.empty()) return norms;

  // Below the first kink of a step profile M g = sup f exactly; otherwise
  // M g <= sup f bounds the head from above.
  const auto kinks = f.kinks();
  double s_lo = kinks.empty() ? 1.0 : kinks.front();
  if (!f.is_piecewise_constant()) s_lo *= 1e-3;
  const double support = f.support_bound();
  const double spread = std::isfinite(support) ? support : (kinks.empty() ? 1.0 : kinks.back());

  const double omega = dim.unit_ball_volume();
  const double area = dim.unit_sphere_area();
  std::vector<double> acc(p_values.size());
  for (std::size_t j = 0; j < p_values.size(); ++j) {
    acc[j] = std::pow(sup, p_values[j]) * omega * std::pow(s_lo, d);
  }
  // Envelope tail: int_S^inf (l1 / (omega s^d))^p S_d s^{d-1} ds.
  auto envelope_tail = [&](double p, double s) {
    return area * std::pow(l1 / omega, p) * std::pow(s, d * (1.0 - p)) / (d * (p - 1.0));
  };

  const double step = std::pow(10.0, 1.0 / std::max(1, options.points_per_decade));
  const double log_step = std::log(step);
  const int batch = 64;
  const double s_cap = s_lo * std::pow(10.0, options.max_decades);
  auto integrand = [&](double p, double s, double m) {
    return std::pow(m, p) * area * std::pow(s, d);  // times d(log s)
  };

  double prev_s = s_lo;
  double prev_m = maximal_value(g, s_lo, options.search).value;
  double tail_s = s_cap;
  bool done = false;
  while (!done) {
    std::vector<double> s(batch);
    for (int k = 0; k < batch; ++k) s[k] = prev_s * std::pow(step, k + 1);
    std::vector<double> m(batch);
    parallel_for(s.size(), options.jobs,
                 [&](std::size_t k) { m[k] = maximal_value(g, s[k], options.search).value; });
    for (int k = 0; k < batch && !done; ++k) {
      for (std::size_t j = 0; j < p_values.size(); ++j) {
        const double p = p_values[j];
        acc[j] += 0.5 * log_step * (integrand(p, prev_s, prev_m) + integrand(p, s[k], m[k]));
      }
      prev_s = s[k];
      prev_m = m[k];
      // Stop once the envelope tail is pinned down: past the support the
      // maximal function lies between l1 / |B(s + spread)| and l1 / |B(s)|,
      // so the gap between the two tails bounds the correction's slack.
      if (s[k] > spread) {
        done = true;
        for (std::size_t j = 0; j < p_values.size(); ++j) {
          const double p = p_values[j];
          const double shrink = 1.0 - std::pow(s[k] / (s[k] + spread), d * p);
          if (envelope_tail(p, s[k]) * shrink > options.tail_fraction * acc[j]) done = false;
        }
      }
      if (s[k] >= s_cap) done = true;
      tail_s = s[k];
    }
  }
  for (std::size_t j = 0; j < p_values.size(); ++j) {
    const double p = p_values[j];
    norms[j] = std::pow(acc[j] + envelope_tail(p, tail_s), 1.0 / p);
  }
  return norms;
}

LpResult lp_bound_battery(std::span<const RadialProfile> suite, const Dimension& dim,
                          std::span<const double> p_values, const LpOptions& options) {
  std::vector<double> bounds;
  for (double p : p_values) bounds.push_back(corollary_constant(p));
  std::vector<std::vector<LpCell>> slots(suite.size());
  LpOptions inner = options;
  inner.jobs = 1;
  parallel_for(suite.size(), options.jobs, [&](std::size_t i) {
    const RadialFunction g(suite[i], dim);
    std::vector<double> gp;
    for (double p : p_values) {
      const double n = suite[i].lp_norm(dim, p);
      if (!std::isfinite(n)) {
        throw std::invalid_argument("divergent L^p norm for profile " + std::to_string(i) +
                                    " at p = " + std::to_string(p));
      }
      gp.push_back(n);
    }
    const auto mp = maximal_lp_norms(g, p_values, inner);
    for (std::size_t j = 0; j < p_values.size(); ++j) {
      const double ratio = gp[j] > 0.0 ? mp[j] / gp[j] : 0.0;
      slots[i].push_back({i, p_values[j], mp[j], gp[j], ratio, bounds[j]});
    }
  });

  LpResult out;
  out.report.battery = "lp";
  out.report.tolerance = options.tolerance;
  WorstTracker worst;
  for (auto& slot : slots) {
    for (const auto& c : slot) {
      worst.offer((c.bound - c.ratio) / c.bound, out.cells.size());
      out.cells.push_back(c);
    }
  }
  out.report.trials = out.cells.size();
  out.report.worst_margin = worst.any ? worst.margin : 1.0;
  if (worst.any) {
    const auto& c = out.cells[worst.index];
    out.report.worst_case = {{"dimension", dim.value()},
                             {"profile", static_cast<double>(c.profile)},
                             {"p", c.p},
                             {"ratio", c.ratio},
                             {"bound", c.bound}};
  }
  finalize(out.report);
  return out;
}

// ---------------------------------------------------------------------------

double closed_form_lower_bound(int d, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  return std::pow(1.0 + 1.0 / ((p - 1.0) * std::exp2(d * p)), 1.0 / p);
}

double envelope_lower_bound(int d, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  // int_1^inf (s + 1)^{-dp} s^{d-1} ds, with w = s / (1 + s).
  const double a = d * (p - 1.0);
  const double b = d;
  const double lb = log_beta(a, b);
  const double tail = std::exp(lb) * regularized_beta(a, b, 0.5, 0.5, lb);
  return std::pow(1.0 + d * tail, 1.0 / p);
}

std::vector<ConstantEstimate> lower_bound_curve(const Dimension& dim,
                                                std::span<const double> p_values) {
  std::vector<ConstantEstimate> out;
  for (double p : p_values) {
    ConstantEstimate e;
    e.p = p;
    e.d = dim.value();
    e.lower = envelope_lower_bound(e.d, p);
    e.closed_form_lower = closed_form_lower_bound(e.d, p);
    e.upper = corollary_constant(p);
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------

CounterexampleDetails counterexample_details(std::span<const int> dims) {
  CounterexampleDetails out;
  const Dimension line(1);
  const RadialProfile psi = RadialProfile::psi();
  const double eps = out.perturbation;
  out.psi_full = radial_average(psi, line, {0.0, 1.0});
  out.psi_shifted = radial_average(psi, line, {0.25, 0.75});
  out.psi_perturbed = radial_average(psi, line, {0.25 + eps / 2, 0.75 + eps / 2});
  out.restricted_centered = restricted_measure_average({0.0, 1.0});
  out.restricted_shifted = restricted_measure_average({1.0, 1.0});
  out.sector = restricted_measure_average({0.0, 1.0}, std::numbers::pi / 3);
  for (int d : dims) {
    const BoxAverages box = box_average_geometry(d);
    out.linf.push_back({d, box.centered, box.shifted});
  }
  return out;
}

VerificationReport counterexample_suite(std::span<const int> dims) {
  const CounterexampleDetails c = counterexample_details(dims);
  VerificationReport report;
  report.battery = "counterexamples";
  report.tolerance = -1e-12;

  struct Check {
    std::string name;
    double margin;
    std::vector<std::pair<std::string, double>> record;
  };
  std::vector<Check> checks;
  checks.push_back({"interval", c.psi_shifted - c.psi_full,
                    {{"centered", c.psi_full}, {"shifted", c.psi_shifted}}});
  checks.push_back({"interval-perturbed", c.psi_perturbed - c.psi_full,
                    {{"centered", c.psi_full}, {"shifted", c.psi_perturbed}, {"epsilon", c.perturbation}}});
  checks.push_back({"restricted-measure", c.restricted_shifted - c.restricted_centered,
                    {{"centered", c.restricted_centered}, {"shifted", c.restricted_shifted}}});
  for (const auto& box : c.linf) {
    // The construction beats the centred ball exactly when d >= 4.
    const Rational gap = box.d >= 4 ? box.shifted - box.centered : box.centered - box.shifted;
    checks.push_back({"linf-d" + std::to_string(box.d), to_double(gap),
                      {{"dimension", box.d},
                       {"centered", to_double(box.centered)},
                       {"shifted", to_double(box.shifted)}}});
  }

  WorstTracker worst;
  for (std::size_t i = 0; i < checks.size(); ++i) worst.offer(checks[i].margin, i);
  report.trials = checks.size();
  report.worst_margin = worst.margin;
  report.worst_case = checks[worst.index].record;
  report.worst_case.insert(report.worst_case.begin(),
                           {"check", static_cast<double>(worst.index)});
  finalize(report);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

RadialProfile random_lemma_profile(TrialRng& rng, int d) {
  const double u = rng.uniform();
  const double height = rng.log_uniform(1e-2, 1e2);
  const double length = rng.log_uniform(1e-2, 1e2);
  if (u < 0.6) {
    return random_step_profile(rng, 1, 8, 1e-2, 1e2);
  }
  if (u < 0.7) {
    return RadialProfile::builtin({BuiltinKind::Psi, 0.0, height, length});
  }
  if (u < 0.8) {
    return RadialProfile::builtin({BuiltinKind::Exponential, 0.0, height, length});
  }
  if (u < 0.9) {
    const double gamma = rng.uniform(0.0, 0.9 * d);
    return RadialProfile::builtin({BuiltinKind::TruncatedPower, gamma, height, length});
  }
  const int n = rng.integer(2, 6);
  std::vector<double> radii(n), values(n);
  for (double& r : radii) r = rng.log_uniform(1e-2, 1e2);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  values.resize(radii.size());
  double acc = 0.0;
  for (std::size_t k = values.size(); k-- > 0;) {
    acc += rng.log_uniform(1e-3, 1.0);
    values[k] = acc;
  }
  if (rng.uniform() < 0.5) values.back() = 0.0;
  return RadialProfile::piecewise_linear(std::move(radii), std::move(values));
}

}  // namespace

VerificationReport lemma_battery(const LemmaOptions& options) {
  struct Cell {
    int d = 1;
    double R = 0.0, a = 0.0, r = 0.0;
    double centered = 0.0, off = 0.0, margin = 0.0;
  };
  std::vector<Cell> cells(options.trials);
  parallel_for(cells.size(), options.jobs, [&](std::size_t i) {
    TrialRng rng(options.seed, i);
    Cell& c = cells[i];
    c.d = rng.integer(1, std::max(1, options.max_dim));
    const RadialProfile g = random_lemma_profile(rng, c.d);
    c.R = rng.log_uniform(1e-2, 1e2);
    c.a = rng.uniform() < 0.2 ? c.R : c.R * (1.0 + std::pow(10.0, rng.uniform(-3.0, 1.0)));
    c.r = c.R * std::pow(10.0, rng.uniform(-2.0, 2.0));
    const LemmaComparison cmp = lemma_compare(g, Dimension(c.d), c.R, c.a, c.r);
    c.centered = cmp.centered;
    c.off = cmp.off_center;
    if (c.centered > 0.0) {
      c.margin = (c.centered - c.off) / c.centered;
    } else {
      c.margin = c.off > 0.0 ? -kInf : 0.0;
    }
  });

  VerificationReport report;
  report.battery = "lemma";
  report.trials = cells.size();
  report.tolerance = options.tolerance;
  report.seed = options.seed;
  WorstTracker worst;
  for (std::size_t i = 0; i < cells.size(); ++i) worst.offer(cells[i].margin, i);
  report.worst_margin = worst.any ? worst.margin : 0.0;
  if (worst.any) {
    const Cell& c = cells[worst.index];
    report.worst_case = {{"trial", static_cast<double>(worst.index)},
                         {"dimension", c.d},
                         {"R", c.R},
                         {"a", c.a},
                         {"r", c.r},
                         {"centered", c.centered},
                         {"off_center", c.off}};
  }
  finalize(report);
  return report;
}

}  // namespace radmax
