#include "radmax/cli.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "radmax/errors.hpp"
#include "radmax/maximal.hpp"
#include "radmax/report.hpp"
#include "radmax/verification.hpp"

namespace radmax {

namespace {

std::vector<double> parse_reals(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument(fmt::format("malformed {} entry: '{}'", what, item));
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(fmt::format("empty {} list", what));
  return out;
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_reals(text, "dimension")) {
    if (v != std::floor(v) || v < 1 || v > 1000) {
      throw std::invalid_argument(fmt::format("invalid dimension: {}", v));
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

RadialProfile resolve_profile(const std::string& source, const Dimension& dim) {
  if (source.starts_with("spike:")) {
    const auto eps = parse_reals(source.substr(6), "spike width");
    if (eps.size() != 1) throw std::invalid_argument("spike takes one width");
    return RadialProfile::spike(dim, eps.front());
  }
  std::error_code ec;
  if (std::filesystem::is_regular_file(source, ec)) {
    std::ifstream in(source);
    if (!in) throw std::invalid_argument("cannot open profile file: " + source);
    return parse_profile(in);
  }
  try {
    return builtin_profile_by_name(source);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(
        fmt::format("'{}' is neither a readable profile file nor a builtin ({})", source, e.what()));
  }
}

struct Common {
  std::string format = "table";
  std::string out_path;
  std::uint64_t seed = 20240601;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "table, csv or jsonl")
      ->check(CLI::IsMember({"table", "csv", "jsonl"}));
  cmd->add_option("--out", c.out_path, "write records to this file instead of stdout");
  cmd->add_option("--seed", c.seed, "random seed (always recorded)");
}

class Sink {
 public:
  Sink(const Common& c, std::ostream& fallback) {
    if (!c.out_path.empty()) {
      file_ = std::make_unique<std::ofstream>(c.out_path);
      if (!*file_) throw std::invalid_argument("cannot write " + c.out_path);
    }
    writer_.emplace(parse_output_format(c.format), file_ ? *file_ : fallback);
  }
  RecordWriter& writer() { return *writer_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::optional<RecordWriter> writer_;
};

// ---------------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string profile;
  int dim = 1;
  std::string points;
  int grid = 256;
};

int cmd_eval(const EvalArgs& args, std::ostream& out) {
  const Dimension dim(args.dim);
  const RadialProfile profile = resolve_profile(args.profile, dim);
  profile.require_locally_integrable(dim);
  const auto points = parse_reals(args.points, "point");
  for (double a : points) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("points must be finite and >= 0");
  }
  SearchOptions search;
  search.grid_size = args.grid;
  const RadialFunction g(profile, dim);
  Sink sink(args.common, out);
  for (double a : points) {
    const MaximalEvaluation e = maximal_value(g, a, search);
    sink.writer().write({{"schema", std::string(kSchemaVersion)},
                         {"command", std::string("eval")},
                         {"dim", std::int64_t{args.dim}},
                         {"profile", args.profile},
                         {"a", e.a},
                         {"value", e.value},
                         {"argmax_r", e.argmax_is_limit ? 0.0 : e.argmax_r},
                         {"argmax_is_limit", e.argmax_is_limit},
                         {"envelope", e.envelope},
                         {"seed", static_cast<std::int64_t>(args.common.seed)}});
  }
  sink.writer().finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::string battery;
  std::string dims;
  std::optional<std::uint64_t> trials;
  std::optional<double> tol;
  std::size_t suite_size = 100;
  std::size_t alphas = 20;
  std::string alpha_range = "1e-3,1e3";
  bool relative_alphas = false;
  std::string p_values = "1.25,1.5,2,4";
  std::string profile;
  unsigned jobs = 1;
  int max_dim = 6;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  const std::string& b = args.battery;
  const bool all = b == "all";
  Sink sink(args.common, out);
  bool passed = true;
  auto emit = [&](const VerificationReport& r) {
    sink.writer().write(report_record(r, parse_output_format(args.common.format)));
    if (!r.passed) {
      passed = false;
      err << fmt::format("battery {} failed: worst margin {:.6g} below -{:.3g}\n", r.battery,
                         r.worst_margin, r.tolerance);
    }
  };
  auto suite_for = [&](const Dimension& dim) {
    if (!args.profile.empty()) {
      RadialProfile p = resolve_profile(args.profile, dim);
      p.require_locally_integrable(dim);
      return std::vector<RadialProfile>{p};
    }
    SuiteOptions s;
    s.count = args.suite_size;
    s.seed = args.common.seed;
    return default_suite(dim, s);
  };

  try {
    if (all || b == "lemma") {
      LemmaOptions o;
      o.seed = args.common.seed;
      if (args.trials) o.trials = *args.trials;
      if (args.tol) o.tolerance = *args.tol;
      o.max_dim = args.max_dim;
      o.jobs = args.jobs;
      emit(lemma_battery(o));
    }
    if (all || b == "weak-type") {
      const auto dims = parse_dims(args.dims.empty() ? "1,2,3,5" : args.dims);
      EnvelopeAudit audit;
      for (int d : dims) {
        const Dimension dim(d);
        const auto suite = suite_for(dim);
        WeakTypeOptions o;
        o.seed = args.common.seed;
        o.alphas_per_profile = args.alphas;
        const auto range = parse_reals(args.alpha_range, "alpha range");
        if (range.size() != 2 || !(range[0] > 0.0) || !(range[1] >= range[0])) {
          throw std::invalid_argument("alpha range must be lo,hi with 0 < lo <= hi");
        }
        o.alpha_min = range[0];
        o.alpha_max = range[1];
        o.alphas_relative_to_sup = args.relative_alphas;
        o.jobs = args.jobs;
        if (args.tol) o.tolerance = *args.tol;
        const WeakTypeResult r = weak_type_battery(suite, dim, o);
        emit(r.report);
        audit.evaluations += r.audit.evaluations;
        audit.violations += r.audit.violations;
        audit.worst_ratio = std::max(audit.worst_ratio, r.audit.worst_ratio);
      }
      VerificationReport env;
      env.battery = "envelope";
      env.trials = audit.evaluations;
      env.worst_margin = 1.0 - audit.worst_ratio;
      env.worst_case = {{"worst_ratio", audit.worst_ratio},
                        {"violations", static_cast<double>(audit.violations)}};
      env.tolerance = 1e-9;
      env.seed = args.common.seed;
      env.passed = env.worst_margin >= -env.tolerance;
      emit(env);
    }
    if (all || b == "lp") {
      const auto dims = parse_dims(args.dims.empty() ? "1,2,3,5" : args.dims);
      const auto ps = parse_reals(args.p_values, "p");
      for (double p : ps) {
        if (!(p > 1.0)) throw std::invalid_argument("every p must exceed 1");
      }
      for (int d : dims) {
        const Dimension dim(d);
        LpOptions o;
        o.jobs = args.jobs;
        if (args.tol) o.tolerance = *args.tol;
        LpResult r = lp_bound_battery(suite_for(dim), dim, ps, o);
        r.report.seed = args.common.seed;
        emit(r.report);
      }
    }
    if (all || b == "counterexamples") {
      const auto dims = parse_dims(args.dims.empty() ? "1,2,3,4,5,6" : args.dims);
      VerificationReport r = counterexample_suite(dims);
      r.seed = args.common.seed;
      emit(r);
    }
  } catch (...) {
    sink.writer().finish();
    throw;
  }
  sink.writer().finish();
  return passed ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------

struct TableArgs {
  Common common;
  int dim = 2;
  std::string p_values = "1.001,1.01,1.1,1.25,1.5,2,3,4,8";
};

int cmd_table(const TableArgs& args, std::ostream& out) {
  const Dimension dim(args.dim);
  const auto ps = parse_reals(args.p_values, "p");
  for (double p : ps) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("every p must be finite and exceed 1");
  }
  Sink sink(args.common, out);
  for (const ConstantEstimate& e : lower_bound_curve(dim, ps)) {
    sink.writer().write({{"schema", std::string(kSchemaVersion)},
                         {"command", std::string("table")},
                         {"dim", std::int64_t{e.d}},
                         {"p", e.p},
                         {"corollary_constant", e.upper},
                         {"closed_form_lower_bound", e.closed_form_lower},
                         {"computed_lower_bound", e.lower},
                         {"product_with_(p-1)/p", e.closed_form_lower * (e.p - 1.0) / e.p},
                         {"seed", static_cast<std::int64_t>(args.common.seed)}});
  }
  sink.writer().finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  Common common;
  std::string profile;
  int dim = 1;
};

int cmd_profile_check(const CheckArgs& args, std::ostream& out) {
  const Dimension dim(args.dim);
  const RadialProfile p = resolve_profile(args.profile, dim);
  p.require_locally_integrable(dim);
  Sink sink(args.common, out);
  sink.writer().write({{"schema", std::string(kSchemaVersion)},
                       {"command", std::string("profile-check")},
                       {"profile", args.profile},
                       {"description", p.describe()},
                       {"dim", std::int64_t{args.dim}},
                       {"sup", p.sup()},
                       {"support", p.support_bound()},
                       {"l1_norm", p.ball_mass(dim, std::numeric_limits<double>::infinity())},
                       {"valid", true}});
  sink.writer().finish();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Centred maximal functions of radial decreasing functions"};
  app.name("radmax");
  app.require_subcommand(1);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "maximal function at distances a from the origin");
  add_common(eval_cmd, eval.common);
  eval_cmd->add_option("--profile", eval.profile, "builtin name, spike:<eps> or file")->required();
  eval_cmd->add_option("--dim", eval.dim, "ambient dimension")->check(CLI::Range(1, 1000));
  eval_cmd->add_option("--points", eval.points, "comma-separated distances")->required();
  eval_cmd->add_option("--grid", eval.grid, "radii in the search grid")->check(CLI::Range(2, 1 << 20));

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "run verification batteries");
  add_common(verify_cmd, verify.common);
  verify_cmd->add_option("battery", verify.battery, "lemma, weak-type, lp, counterexamples or all")
      ->required()
      ->check(CLI::IsMember({"lemma", "weak-type", "lp", "counterexamples", "all"}));
  verify_cmd->add_option("--dims,--dim", verify.dims, "comma-separated dimensions");
  verify_cmd->add_option("--trials", verify.trials, "lemma trials");
  verify_cmd->add_option("--tol", verify.tol, "override the battery tolerance");
  verify_cmd->add_option("--suite-size", verify.suite_size, "profiles in the random suite");
  verify_cmd->add_option("--alphas", verify.alphas, "alpha values per profile");
  verify_cmd->add_option("--alpha-range", verify.alpha_range, "lo,hi for the log-uniform alphas");
  verify_cmd->add_flag("--relative-alphas", verify.relative_alphas,
                       "scale the alpha range by each profile's supremum");
  verify_cmd->add_option("--p-values", verify.p_values, "comma-separated exponents");
  verify_cmd->add_option("--profile", verify.profile, "use one profile instead of the suite");
  verify_cmd->add_option("--jobs", verify.jobs, "worker threads (0 = all cores)");
  verify_cmd->add_option("--max-dim", verify.max_dim, "largest dimension in the lemma battery")
      ->check(CLI::Range(1, 64));

  TableArgs table;
  auto* table_cmd = app.add_subcommand("table", "bounds on the L^p operator norm");
  add_common(table_cmd, table.common);
  table_cmd->add_option("--dim", table.dim, "ambient dimension")->check(CLI::Range(1, 1000));
  table_cmd->add_option("--p-values", table.p_values, "comma-separated exponents");

  CheckArgs check;
  auto* profile_cmd = app.add_subcommand("profile", "profile utilities");
  profile_cmd->require_subcommand(1);
  auto* check_cmd = profile_cmd->add_subcommand("check", "validate a profile");
  add_common(check_cmd, check.common);
  check_cmd->add_option("--profile", check.profile, "builtin name, spike:<eps> or file")->required();
  check_cmd->add_option("--dim", check.dim, "ambient dimension")->check(CLI::Range(1, 1000));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    if (verify_cmd->parsed()) return cmd_verify(verify, out, err);
    if (table_cmd->parsed()) return cmd_table(table, out);
    if (check_cmd->parsed()) return cmd_profile_check(check, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace radmax
