#include "opspace/cli.hpp"

#include "opspace/acceptance.hpp"
#include "opspace/atlas.hpp"
#include "opspace/duality.hpp"
#include "opspace/norms.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <limits>
#include <ostream>

namespace opspace {
namespace {

struct HelpRequest {
  std::string text;
};

enum Flag : unsigned {
  kSpace = 1u << 0,
  kInput = 1u << 1,
  kLevel = 1u << 2,
  kTol = 1u << 3,
  kGrid = 1u << 4,
  kSamples = 1u << 5,
  kSeed = 1u << 6,
  kMaxIter = 1u << 7,
  kMode = 1u << 8,
  kQuick = 1u << 9,
};

struct CommandInfo {
  const char* name;
  const char* help;
  unsigned flags;
  bool seed_required;
};

// One command, one library operation.
const CommandInfo kCommands[] = {
    {"norm", "operator norm of an element of M_n(V)", kSpace | kInput | kLevel, false},
    {"regnorm", "regularization norm with positive completion witnesses",
     kSpace | kInput | kLevel | kTol | kMaxIter, false},
    {"nu", "modified numerical radius bounds", kSpace | kInput | kLevel | kTol | kGrid, false},
    {"dualnorm", "cb-norm of a matrix functional", kSpace | kInput | kTol | kSamples | kSeed,
     false},
    {"cp-check", "complete positivity of a matrix functional",
     kSpace | kInput | kTol | kSamples | kSeed, false},
    {"extend", "CP / UCP extension of a matrix functional to the ambient algebra",
     kSpace | kInput | kTol | kMode, false},
    {"regularity", "empirical regularity profile", kSpace | kLevel | kTol | kSamples | kSeed, true},
    {"os-constant", "empirical operator-system constant",
     kSpace | kLevel | kTol | kGrid | kSamples | kSeed, true},
    {"bidual-check", "isometry and order checks against the bidual",
     kSpace | kLevel | kTol | kSamples | kSeed, true},
    {"l1-probe", "the two-dimensional l1 probe", kTol | kGrid | kSamples | kSeed, true},
    {"selftest", "run the acceptance suite", kSeed | kQuick, false},
};

const CommandInfo& info(const std::string& name) {
  for (const CommandInfo& c : kCommands)
    if (name == c.name) return c;
  throw UsageError("unknown command '" + name + "'");
}

bool element_command(const std::string& c) { return c == "norm" || c == "regnorm" || c == "nu"; }
bool functional_command(const std::string& c) {
  return c == "dualnorm" || c == "cp-check" || c == "extend";
}

struct Raw {
  std::string space, input, level, format = "json", out, mode = "cp";
  double tol = kDefaultTol;
  int grid = 64, samples = 0, max_iter = 200;
  std::uint64_t seed = 0;
  bool quick = false;
};

void build_app(CLI::App& app, Raw& raw) {
  app.require_subcommand(1);
  for (const CommandInfo& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    if (c.flags & kSpace) sub->add_option("--space", raw.space, "full:k, diag:m, corner:m or user:path");
    if (c.flags & kInput)
      sub->add_option("--input", raw.input, "JSON file, or inline JSON")->required();
    if (c.flags & kLevel) sub->add_option("--level", raw.level, "matrix level, or a list such as 1,2");
    if (c.flags & kTol) sub->add_option("--tol", raw.tol, "solver tolerance")->check(CLI::Range(1e-14, 1e-3));
    if (c.flags & kGrid)
      sub->add_option("--grid", raw.grid, "phase grid size (at least 8)")->check(CLI::Range(8, 4096));
    if (c.flags & kSamples)
      sub->add_option("--samples", raw.samples, "number of random samples")->check(CLI::Range(1, 5000));
    if (c.flags & kSeed) {
      CLI::Option* o = sub->add_option("--seed", raw.seed, "random seed");
      if (c.seed_required) o->required();
    }
    if (c.flags & kMaxIter)
      sub->add_option("--max-iter", raw.max_iter, "solver iteration limit")->check(CLI::Range(1, 10000));
    if (c.flags & kMode) sub->add_option("--mode", raw.mode, "cp or ucp")->check(CLI::IsMember({"cp", "ucp"}));
    if (c.flags & kQuick) sub->add_flag("--quick", raw.quick, "reduced sample counts");
    sub->add_option("--format", raw.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", raw.out, "write the report here instead of stdout");
  }
}

std::vector<Index> parse_levels(const std::string& text) {
  std::vector<Index> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw UsageError("--level: '" + text + "' is not a level or a comma-separated list of levels");
    if (v < 1 || v > Caps{}.max_level)
      throw UsageError("--level: " + item + " outside the cap 1.." + std::to_string(Caps{}.max_level));
    out.push_back(v);
    pos = comma + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Json load_input(const std::string& input) {
  const auto first = input.find_first_not_of(" \t\n");
  if (first != std::string::npos && (input[first] == '{' || input[first] == '[')) {
    try {
      return Json::parse(input);
    } catch (const std::exception& e) {
      throw UsageError(std::string("--input: inline JSON does not parse: ") + e.what());
    }
  }
  try {
    return read_json_file(input);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--input: ") + e.what());
  }
}

// An element file is either a bare {re, im} matrix or {"space", "matrix"}.
const Json& element_matrix(const Json& j) {
  if (j.is_object() && j.contains("matrix")) return j["matrix"];
  return j;
}

LevelElement input_element(const CommandSpec& s) {
  return element_from_json(s.resolved_space, element_matrix(s.input_json));
}

MatrixFunctional input_functional(const CommandSpec& s) {
  return functional_from_json(s.resolved_space, s.input_json);
}

using Clock = std::chrono::steady_clock;

double finite_or_inf(bool infinite, double v) {
  return infinite ? std::numeric_limits<double>::infinity() : v;
}

Json levels_json(const std::vector<Index>& levels) {
  Json j = Json::array();
  for (Index l : levels) j.push_back(l);
  return j;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const CommandInfo& c : kCommands) v.emplace_back(c.name);
    return v;
  }();
  return names;
}

CommandSpec parse_command(const std::vector<std::string>& args) {
  CLI::App app{"Operator-space norms, cones and dual checks at desk scale.", "opspace"};
  Raw raw;
  build_app(app, raw);
  // Friendlier messages than CLI11's for the two commonest mistakes.
  if (!args.empty() && !args.front().starts_with("-")) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), args.front()) == names.end()) {
      std::string all;
      for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
      throw UsageError("unknown command '" + args.front() + "' (one of " + all + ")");
    }
    const CLI::App* sub = app.get_subcommand(args.front());
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (!args[i].starts_with("--")) continue;
      const std::string flag = args[i].substr(0, args[i].find('='));
      if (flag != "--help" && sub->get_option_no_throw(flag) == nullptr)
        throw UsageError(flag + ": not accepted by " + args.front());
    }
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    throw HelpRequest{subs.empty() ? app.help() : subs.front()->help()};
  } catch (const CLI::ParseError& e) {
    if (args.empty()) throw UsageError("a command is required: " + app.help());
    throw UsageError(e.what());
  }

  CommandSpec s;
  const CLI::App* sub = app.get_subcommands().front();
  s.command = sub->get_name();
  const CommandInfo& ci = info(s.command);
  s.tol = raw.tol;
  s.grid = raw.grid;
  s.samples = raw.samples;
  s.max_iter = raw.max_iter;
  s.format = raw.format == "csv" ? OutputFormat::csv : OutputFormat::json;
  s.out = raw.out;
  s.mode = raw.mode;
  s.quick = raw.quick;
  s.space = raw.space;
  s.input = raw.input;
  if ((ci.flags & kSeed) && sub->get_option("--seed")->count() > 0) s.seed = raw.seed;
  if (!raw.level.empty()) s.levels = parse_levels(raw.level);

  if (ci.flags & kInput) {
    s.input_json = load_input(raw.input);
    if (s.input_json.is_object() && s.input_json.contains("space")) {
      if (!s.input_json["space"].is_string())
        throw UsageError("--input: \"space\" must be a selector string");
      const std::string from_file = s.input_json["space"].get<std::string>();
      if (s.space.empty())
        s.space = from_file;
      else if (s.space != from_file)
        throw UsageError("--space: " + s.space + " disagrees with the input's space " + from_file);
    }
  }
  if ((ci.flags & kSpace) && s.space.empty())
    throw UsageError("--space is required (or a \"space\" field in the input)");
  if (!s.space.empty()) {
    try {
      s.resolved_space = make_example(s.space);
    } catch (const Error& e) {
      throw UsageError(std::string("--space: ") + e.what());
    }
  }

  if (element_command(s.command)) {
    try {
      const LevelElement x = input_element(s);
      if (!s.levels.empty() && (s.levels.size() != 1 || s.levels.front() != x.level()))
        throw UsageError("--level: input is at level " + std::to_string(x.level()));
      s.levels = {x.level()};
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(std::string("--input: ") + e.what());
    }
  } else if (functional_command(s.command)) {
    try {
      const MatrixFunctional f = input_functional(s);
      check_caps(*s.resolved_space, f.size());
      s.levels = {f.size()};
    } catch (const Error& e) {
      throw UsageError(std::string("--input: ") + e.what());
    }
  } else if (ci.flags & kLevel) {
    if (s.levels.empty()) s.levels = {1, 2};
    try {
      for (Index l : s.levels) check_caps(*s.resolved_space, l);
    } catch (const Error& e) {
      throw UsageError(std::string("--level: ") + e.what());
    }
  }
  return s;
}

Outcome execute(const CommandSpec& s) {
  const auto t0 = Clock::now();
  Report rep;
  rep.op = s.command;
  rep.space = s.space;
  rep.level = s.levels.empty() ? 0 : s.levels.back();
  rep.seed = s.seed;
  rep.tolerances = {{"tol", s.tol},
                    {"feas_tol", std::min(s.tol, 1e-8)},
                    {"gap_tol", std::min(s.tol, 1e-8)},
                    {"max_iter", s.max_iter}};
  int code = 0;
  auto samples_or = [&](int d) { return s.samples > 0 ? s.samples : d; };
  auto seed_or_zero = [&]() -> std::uint64_t {
    if (!s.seed) return 0;
    return *s.seed;
  };
  auto mark_undecided = [&](bool undecided) {
    if (undecided) {
      rep.status = "undecided";
      code = 2;
    }
  };

  if (s.command == "norm") {
    const LevelElement x = input_element(s);
    const ConeMembershipResult cm = cone_member(x, s.tol);
    rep.value = level_norm(x);
    rep.status = "ok";
    rep.witness_residuals = {{"subspace_residual", x.reconstruction_residual()}};
    rep.details = {{"cone_member", to_string(cm.member)},
                   {"min_eigenvalue", cm.min_eigenvalue},
                   {"hermitian_defect", hermitian_defect(x.concrete())}};
  } else if (s.command == "regnorm") {
    const LevelElement x = input_element(s);
    const RegResult r = reg_norm(x, s.tol, s.max_iter);
    rep.value = finite_or_inf(r.infinite, r.value);
    rep.status = r.infinite ? "infinite" : "optimal";
    rep.witness_residuals = {{"psd_residual", r.psd_residual},
                             {"subspace_residual", r.subspace_residual},
                             {"value_residual", r.value_residual},
                             {"certificate_margin", r.certificate_margin}};
    rep.details = {{"norm", level_norm(x)}, {"solver_status", conic::to_string(r.status)}};
    if (r.a) rep.details["a"] = element_to_json(*r.a);
    if (r.d) rep.details["d"] = element_to_json(*r.d);
    mark_undecided(r.undecided);
  } else if (s.command == "nu") {
    const LevelElement x = input_element(s);
    const NuResult r = nu(x, s.grid, s.tol);
    const double norm = level_norm(x);
    rep.value = r.upper;
    rep.status = "bracketed";
    rep.tolerances["grid"] = s.grid;
    rep.witness_residuals = {{"upper_minus_norm", r.upper - norm},
                             {"functional_trace_norm", r.t1.size() ? trace_norm(r.t1) : 0.0}};
    rep.details = {{"lower", r.lower},       {"upper", r.upper}, {"norm", norm},
                   {"theta", r.theta},       {"grid", r.grid},
                   {"solver_status", conic::to_string(r.status)}};
    if (r.t1.size()) rep.details["t1"] = matrix_to_json(r.t1);
    if (r.t2.size()) rep.details["t2"] = matrix_to_json(r.t2);
    mark_undecided(r.undecided);
  } else if (s.command == "dualnorm") {
    const MatrixFunctional f = input_functional(s);
    rep.seed = seed_or_zero();
    const DualNormResult r = dual_cb_norm(f, samples_or(64), seed_or_zero(), s.tol);
    rep.value = r.value;
    rep.status = "optimal";
    rep.witness_residuals = {{"max_residual", r.max_residual},
                             {"sampled_minus_value", r.sampled_lower - r.value}};
    rep.details = {{"lower", r.lower},
                   {"upper", r.upper},
                   {"sampled_lower", r.sampled_lower},
                   {"samples", r.samples},
                   {"solver_status", conic::to_string(r.status)}};
    mark_undecided(r.undecided);
  } else if (s.command == "cp-check") {
    const MatrixFunctional f = input_functional(s);
    rep.seed = seed_or_zero();
    const CpResult r = cp_membership(f, s.tol, samples_or(64), seed_or_zero());
    rep.status = to_string(r.verdict);
    rep.witness_residuals = {{"choi_residual", r.choi_residual},
                             {"choi_min_eigenvalue", r.choi_min_eigenvalue},
                             {"violation_eigenvalue", r.violation_eigenvalue}};
    rep.details = {{"trivial_cone", r.trivial_cone}, {"note", r.note}};
    if (r.choi_witness) rep.details["choi_witness"] = matrix_to_json(*r.choi_witness);
    if (r.violation) rep.details["violation"] = element_to_json(*r.violation);
    if (r.verdict == CpVerdict::undecided) code = 2;
  } else if (s.command == "extend") {
    const MatrixFunctional f = input_functional(s);
    const ExtendResult r = arveson_extend(f, s.mode == "ucp" ? ExtendMode::ucp : ExtendMode::cp, s.tol);
    rep.status = r.feasible ? "feasible" : "infeasible";
    rep.witness_residuals = {{"restriction_residual", r.restriction_residual},
                             {"unital_residual", r.unital_residual},
                             {"choi_min_eigenvalue", r.choi_min_eigenvalue},
                             {"certificate_margin", r.certificate_margin}};
    rep.details = {{"mode", s.mode}, {"solver_status", conic::to_string(r.status)}};
    if (r.choi.size()) rep.details["choi"] = matrix_to_json(r.choi);
    mark_undecided(r.undecided);
  } else if (s.command == "regularity") {
    const RegularityProfile p =
        regularity_profile(s.resolved_space, s.levels, samples_or(50), *s.seed, s.tol);
    rep.value = finite_or_inf(p.non_regular, p.empirical_K);
    rep.status = p.non_regular ? "non_regular" : "estimate";
    rep.witness_residuals = {{"condition1_violations", p.condition1_violations}};
    rep.details = {{"levels", levels_json(p.levels)},
                   {"samples", p.samples},
                   {"infinite_ratios", p.infinite_ratios},
                   {"condition1_checks", p.condition1_checks},
                   {"undecided", p.undecided}};
    if (p.worst_direction) rep.details["worst_direction"] = element_to_json(*p.worst_direction);
    mark_undecided(p.undecided > 0);
  } else if (s.command == "os-constant") {
    const OsConstantResult r =
        os_constant_estimate(s.resolved_space, s.levels, samples_or(20), s.grid, *s.seed, s.tol);
    rep.value = finite_or_inf(r.infinite, r.estimate);
    rep.status = "estimate";
    rep.tolerances["grid"] = s.grid;
    rep.witness_residuals = {{"max_nu_excess", r.max_nu_excess}};
    rep.details = {{"levels", levels_json(s.levels)}, {"samples", r.samples}, {"undecided", r.undecided}};
    mark_undecided(r.undecided > 0);
  } else if (s.command == "bidual-check") {
    const BidualReport b = bidual_check(s.resolved_space, s.levels, samples_or(10), *s.seed, s.tol);
    const bool ok = b.max_isometry_residual <= 1e-5 && b.order_cone_failures == 0 &&
                    b.separation_successes == b.separation_samples;
    rep.value = b.max_isometry_residual;
    rep.status = ok ? "consistent" : "inconsistent";
    rep.witness_residuals = {{"max_isometry_residual", b.max_isometry_residual},
                             {"order_cone_failures", b.order_cone_failures}};
    rep.details = {{"levels", levels_json(b.levels)},
                   {"isometry_samples", b.isometry_samples},
                   {"order_cone_samples", b.order_cone_samples},
                   {"separation_samples", b.separation_samples},
                   {"separation_successes", b.separation_successes},
                   {"undecided", b.undecided}};
    mark_undecided(b.undecided > 0);
  } else if (s.command == "l1-probe") {
    rep.space = "diag:2";
    const L1ProbeReport p = l1_two_probe(samples_or(20), *s.seed, s.grid, s.tol);
    rep.value = p.estimate;
    rep.status = "estimate";
    rep.tolerances["grid"] = s.grid;
    rep.witness_residuals = {{"estimate_below_one", std::max(0.0, 1.0 - p.estimate)}};
    rep.details = {{"unit_norm", p.unit_norm},
                   {"max_gap", p.max_gap},
                   {"samples", p.samples},
                   {"undecided", p.undecided}};
    mark_undecided(p.undecided > 0);
  } else if (s.command == "selftest") {
    AcceptanceOptions opts;
    opts.quick = s.quick;
    if (s.seed) opts.seed = *s.seed;
    rep.seed = opts.seed;
    rep.space = "atlas";
    const auto results = run_acceptance(opts);
    Json crit = Json::array();
    int passed = 0;
    for (const CriterionResult& r : results) {
      passed += r.pass ? 1 : 0;
      crit.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail},
                      {"seconds", r.seconds}});
    }
    rep.value = passed;
    rep.status = passed == static_cast<int>(results.size()) ? "pass" : "fail";
    rep.details = {{"quick", s.quick}, {"criteria", crit}};
    if (rep.status == "fail") code = 1;
  } else {
    throw UsageError("unknown command '" + s.command + "'");
  }
  rep.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return {rep.to_json(), code};
}

std::string render(const Json& report, OutputFormat format) {
  if (format == OutputFormat::csv) return report_to_csv(report);
  return report.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto fail = [&](const char* kind, const std::string& command, const std::string& msg) {
    Json j = {{"op", command}, {"status", "error"}, {"error", {{"kind", kind}, {"message", msg}}}};
    err << j.dump(2) << "\n";
    return 1;
  };
  CommandSpec spec;
  try {
    spec = parse_command(args);
  } catch (const HelpRequest& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    return fail("usage", args.empty() ? "" : args.front(), e.what());
  }
  try {
    const Outcome o = execute(spec);
    const std::string text = render(o.report, spec.format);
    if (spec.out.empty()) {
      out << text;
    } else {
      std::ofstream f(spec.out);
      if (!f) return fail("io", spec.command, "cannot write " + spec.out);
      f << text;
    }
    return o.exit_code;
  } catch (const std::exception& e) {
    return fail("runtime", spec.command, e.what());
  }
}

}  // namespace opspace
