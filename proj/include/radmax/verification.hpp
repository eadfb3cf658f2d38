#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radmax/maximal.hpp"

namespace radmax {

/// Outcome of one inequality battery. Margins are slacks: nonnegative means
/// the inequality held. passed == (worst_margin >= -tolerance); a negative
/// tolerance therefore demands strictly positive slack.
struct VerificationReport {
  std::string battery;
  std::uint64_t trials = 0;
  double worst_margin = 0.0;
  std::vector<std::pair<std::string, double>> worst_case;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  bool passed = false;
};

/// Bounds on an operator norm: the weak-(1,1) constant (p = 0 marks it) or
/// the strong (p, p) constant on radial decreasing functions.
struct ConstantEstimate {
  double p = 0.0;
  bool weak_type = false;
  int d = 1;
  double lower = 0.0;
  double upper = 0.0;
  double closed_form_lower = 0.0;
};

/// Deterministic stream for trial `index` of a battery seeded with `seed`;
/// independent of how trials are scheduled.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t index);
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double log_uniform(double lo, double hi);
  int integer(int lo, int hi);  // inclusive

 private:
  std::mt19937_64 engine_;
};

struct SuiteOptions {
  std::size_t count = 100;
  std::uint64_t seed = 20240601;
  int min_steps = 1;
  int max_steps = 8;
  double min_break = 1e-2;
  double max_break = 1e2;
};

/// Random piecewise-constant profiles normalised to ||g||_1 = 1 in `dim`.
/// The same seed produces the same shapes in every dimension.
std::vector<RadialProfile> default_suite(const Dimension& dim,
                                         const SuiteOptions& options = {});

/// A random piecewise-constant shape (not normalised).
RadialProfile random_step_profile(TrialRng& rng, int min_steps, int max_steps,
                                  double min_break, double max_break);

struct WeakTypeOptions {
  std::vector<double> alphas;  // empty: draw alphas_per_profile per profile
  std::size_t alphas_per_profile = 20;
  double alpha_min = 1e-3;
  double alpha_max = 1e3;
  bool alphas_relative_to_sup = false;  // draw alpha / sup f instead of alpha
  double tolerance = 1e-2;
  std::uint64_t seed = 20240601;
  DistributionOptions distribution;
  unsigned jobs = 1;
};

struct WeakTypeCell {
  std::size_t profile = 0;
  double alpha = 0.0;
  double measure = 0.0;
  double ratio = 0.0;  // alpha |{M g > alpha}| / ||g||_1
};

struct WeakTypeResult {
  VerificationReport report;
  std::vector<WeakTypeCell> cells;
  std::size_t nonvacuous = 0;  // cells with a nonempty level set
  EnvelopeAudit audit;         // over the evaluations made by this battery
};

/// alpha |{M_d g > alpha}| <= ||g||_1 for every profile and alpha.
WeakTypeResult weak_type_battery(std::span<const RadialProfile> suite,
                                 const Dimension& dim,
                                 const WeakTypeOptions& options = {});

/// 2^{(p-1)/p} (p / (p-1))^{1/p}.
double corollary_constant(double p);

struct LpOptions {
  int points_per_decade = 32;
  double tail_fraction = 1e-6;
  double max_decades = 80.0;
  double tolerance = 1e-2;
  SearchOptions search;
  unsigned jobs = 1;
};

struct LpCell {
  std::size_t profile = 0;
  double p = 0.0;
  double maximal_norm = 0.0;  // upper-corrected ||M g||_p
  double profile_norm = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
};

struct LpResult {
  VerificationReport report;
  std::vector<LpCell> cells;
};

/// ||M_d g||_p <= corollary_constant(p) ||g||_p, with ||M_d g||_p computed
/// by log-radial quadrature of the searched maximal function plus
/// upper-bound corrections for the head (M <= sup f) and the tail
/// (M <= ||g||_1 M_d delta).
LpResult lp_bound_battery(std::span<const RadialProfile> suite,
                          const Dimension& dim, std::span<const double> p_values,
                          const LpOptions& options = {});

/// Upper-corrected ||M_d g||_p for a single profile and several p.
std::vector<double> maximal_lp_norms(const RadialFunction& g,
                                     std::span<const double> p_values,
                                     const LpOptions& options = {});

/// For f = chi_{B(0,1)}: the closed-form lower bound on c_{p,d}, the bound
/// from integrating the (|x| + 1)^{-d} envelope exactly, and the corollary
/// constant as the upper bound.
std::vector<ConstantEstimate> lower_bound_curve(const Dimension& dim,
                                                std::span<const double> p_values);
double closed_form_lower_bound(int d, double p);
double envelope_lower_bound(int d, double p);

struct LinfComparison {
  int d = 1;
  Rational centered;
  Rational shifted;
};

struct CounterexampleDetails {
  double psi_full = 0.0;       // psi averaged over [-1, 1]
  double psi_shifted = 0.0;    // over [-1/2, 1]
  double psi_perturbed = 0.0;  // over [-1/2, 1 + epsilon]
  double perturbation = 1e-3;
  double restricted_centered = 0.0;  // mu-average over B(0, 1)
  double restricted_shifted = 0.0;   // mu-average over B(e_1, 1)
  double sector = 0.0;               // over the cone |phi| <= pi/3 of B(0, 1)
  std::vector<LinfComparison> linf;
};

CounterexampleDetails counterexample_details(std::span<const int> dims);

/// All three reproductions must hold with strictly positive margin.
VerificationReport counterexample_suite(std::span<const int> dims);

struct LemmaOptions {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 7;
  int max_dim = 6;
  double tolerance = 1e-9;
  unsigned jobs = 1;
};

/// Random (g, d, R, a >= R, r) instances of avg_{B(0,R)} g >= avg_{B(a e_1, r)} g.
/// Margins are relative to the centred average.
VerificationReport lemma_battery(const LemmaOptions& options = {});

}  // namespace radmax
