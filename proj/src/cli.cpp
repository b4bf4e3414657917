#include "tsfrac/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "tsfrac/config.hpp"
#include "tsfrac/errors.hpp"
#include "tsfrac/fracops.hpp"
#include "tsfrac/gronwall.hpp"
#include "tsfrac/solver.hpp"
#include "tsfrac/verify.hpp"

namespace tsfrac {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string subcommand;
  std::string config_path;
  fs::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> instances;
  bool check = false;
  bool verbose = false;
};

struct Tolerances {
  double tol;
  double series_tol;
  int max_iter;
  int max_terms;
};

Tolerances read_tolerances(const Config& cfg) {
  Tolerances t{cfg.number_or("tol", 1e-10), cfg.number_or("series_tol", 1e-12),
               cfg.integer_or("max_iter", 1000), cfg.integer_or("max_terms", 10000)};
  if (!(t.tol > 0.0) || !(t.series_tol > 0.0)) throw IoError("tolerances must be positive");
  if (t.max_iter < 1 || t.max_terms < 1) throw IoError("max_iter and max_terms must be positive");
  return t;
}

Config load_config(const RunConfig& run, bool required) {
  if (run.config_path.empty()) {
    if (required) throw IoError("--config is required for '" + run.subcommand + "'");
    return Config{};
  }
  return Config::load(run.config_path);
}

/// Output files are written through a temporary name so a failed run leaves no partial file.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
      throw IoError("cannot create output directory " + dir_.string());
  }

  void write(const std::string& name, const std::string& content) const {
    const fs::path target = dir_ / name;
    const fs::path tmp = dir_ / (name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw IoError("cannot write " + tmp.string());
      f << content;
      if (!f) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot move output into place: " + target.string());
  }

 private:
  fs::path dir_;
};

std::vector<double> parse_orders(const std::string& text) {
  std::vector<double> orders;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw IoError("empty entry in orders list");
    try {
      orders.push_back(parse_double(item.substr(b, e - b + 1)));
    } catch (const ArgumentError&) {
      throw IoError("orders entry is not a number: '" + item + "'");
    }
  }
  if (orders.empty()) throw IoError("no orders given");
  return orders;
}

/// constant(c) or file:<csv>
GridFunction load_function(const Config& cfg, const std::string& key, const GridPtr& grid) {
  const std::string spec = cfg.get(key);
  if (spec.rfind("file:", 0) == 0) {
    const auto path = cfg.resolve(spec.substr(5));
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_function_csv(in, grid);
  }
  if (spec.rfind("constant(", 0) == 0 && spec.back() == ')') {
    try {
      return GridFunction::constant(grid, parse_double(spec.substr(9, spec.size() - 10)));
    } catch (const ArgumentError&) {
    }
  }
  throw IoError("config key '" + key + "' must be constant(c) or file:<path>, got '" + spec + "'");
}

void print_hypothesis(std::ostream& out) {
  out << "hypothesis: y(t) <= u(t) + v(t) * sum_{t0 <= tau < t} h_{alpha-1}(t, sigma(tau)) "
         "y(tau) mu(tau)  (y inside the integral)\n";
}

int run_powfun(const RunConfig& run, std::ostream& out) {
  const Config cfg = load_config(run, true);
  const GridPtr grid = load_grid(cfg);
  const std::vector<double> orders =
      parse_orders(cfg.has("orders") ? cfg.get("orders") : cfg.get("alpha"));
  const OutputDir dir(run.out_dir);

  std::vector<std::pair<std::string, std::string>> files;
  std::ostringstream summary;
  summary << "grid_kind = " << kind_name(grid->kind()) << '\n'
          << "points = " << grid->size() << '\n';
  for (double alpha : orders) {
    const PowerFunctionTable table = power_table(grid, alpha);
    std::ostringstream csv;
    write_table_csv(csv, table);
    files.emplace_back("powfun_alpha_" + format_double(alpha) + ".csv", csv.str());
    summary << "order = " << format_double(alpha) << '\n';
    if (run.check) {
      if (alpha > 0.0) {
        const double r = max_semigroup_residual(*grid, alpha, 1);
        out << "max_semigroup_residual alpha=" << format_double(alpha)
            << " k=1: " << format_double(r) << '\n';
        summary << "max_semigroup_residual = " << format_double(r) << '\n';
      } else {
        out << "max_semigroup_residual alpha=" << format_double(alpha)
            << ": skipped (needs alpha > 0)\n";
      }
    }
  }
  for (const auto& [name, content] : files) dir.write(name, content);
  dir.write("summary.txt", summary.str());
  out << "wrote " << files.size() << " table(s) to " << run.out_dir.string() << '\n';
  return kExitOk;
}

int run_solve(const RunConfig& run, std::ostream& out) {
  const Config cfg = load_config(run, true);
  const GridPtr grid = load_grid(cfg);
  const CauchyProblem problem = load_problem(cfg, grid);
  const Tolerances tol = read_tolerances(cfg);
  const OutputDir dir(run.out_dir);

  std::vector<std::string> extra;
  const double sampled = sample_lipschitz(problem, run.seed.value_or(0));
  if (sampled > problem.rhs.lipschitz * (1.0 + 1e-9) + 1e-12)
    extra.push_back("sampled Lipschitz ratio " + format_double(sampled) +
                    " exceeds declared L = " + format_double(problem.rhs.lipschitz));
  if (problem.rhs.lipschitz >= problem.eta)
    extra.push_back("L / eta >= 1: contraction is not certified");

  SolveResult result{GridFunction::constant(grid, 0.0)};
  int status = kExitOk;
  std::string failure;
  try {
    result = picard_solve(problem, tol.tol, tol.max_iter);
  } catch (const NonConvergenceError& e) {
    result = e.partial();
    status = kExitNumerical;
    failure = e.what();
  }
  result.warnings.insert(result.warnings.end(), extra.begin(), extra.end());

  std::ostringstream csv, summary;
  write_function_csv(csv, result.solution);
  summary << "alpha = " << format_double(problem.alpha) << '\n'
          << "w = " << format_double(problem.w) << '\n'
          << "eta = " << format_double(problem.eta) << '\n'
          << "L = " << format_double(problem.rhs.lipschitz) << '\n'
          << "representation = "
          << (problem.representation == Representation::RlType ? "rl-type" : "caputo-type")
          << '\n';
  write_solve_summary(summary, result);
  dir.write("solution.csv", csv.str());
  dir.write("summary.txt", summary.str());

  out << summary.str();
  if (status != kExitOk) out << "error: " << failure << '\n';
  return status;
}

int run_gronwall(const RunConfig& run, std::ostream& out) {
  const Config cfg = load_config(run, true);
  const GridPtr grid = load_grid(cfg);
  const Tolerances tol = read_tolerances(cfg);
  GronwallInput input{load_function(cfg, "u", grid), load_function(cfg, "v", grid),
                      cfg.number("alpha"), 0.0,
                      static_cast<std::size_t>(cfg.integer_or("t0_index", 0))};
  double vmax = 0.0;
  for (std::size_t i = input.v.defined().begin; i < input.v.defined().end; ++i)
    vmax = std::max(vmax, input.v[i]);
  input.bound_v = cfg.number_or("B", vmax);
  try {
    input.validate();
  } catch (const std::exception& e) {
    throw IoError(std::string("invalid Gronwall data: ") + e.what());
  }
  if (run.verbose) print_hypothesis(out);
  const OutputDir dir(run.out_dir);

  int status = kExitOk;
  std::string failure;
  BoundReport report{input.u};
  try {
    report = gronwall_bound(input, tol.series_tol, tol.max_terms);
  } catch (const TruncationFailure& e) {
    report = e.partial();
    status = kExitNumerical;
    failure = e.what();
  }

  // y = fixed-point | file:<csv>; absent means bound only.
  if (status == kExitOk && cfg.has("y")) {
    const std::string yspec = cfg.get("y");
    const GridFunction y = yspec == "fixed-point" ? gronwall_fixed_point(input, 1e-12)
                                                  : load_function(cfg, "y", grid);
    const double dtol = cfg.number_or("dominance_tol", 1e-8);
    if (verify_dominance(input, y, report, dtol) == Verdict::Fail) {
      status = kExitNumerical;
      failure = "bound violated at " + std::to_string(report.violations.size()) + " point(s)";
    }
  }

  std::ostringstream csv, summary;
  write_report_csv(csv, report, input.u);
  summary << "alpha = " << format_double(input.alpha) << '\n'
          << "B = " << format_double(input.bound_v) << '\n';
  write_report_summary(summary, report);
  dir.write("bound.csv", csv.str());
  dir.write("summary.txt", summary.str());
  out << summary.str();
  if (status != kExitOk) out << "error: " << failure << '\n';
  return status;
}

int run_depend(const RunConfig& run, std::ostream& out) {
  const Config cfg = load_config(run, true);
  const GridPtr grid = load_grid(cfg);
  const Tolerances tol = read_tolerances(cfg);
  DependenceInput input{load_problem(cfg, grid), load_problem(cfg, grid, "_bar"), 0.0};
  input.lipschitz = input.problem_a.rhs.lipschitz;
  if (run.verbose) print_hypothesis(out);
  const OutputDir dir(run.out_dir);

  const DependenceReport r =
      dependence_certify(input, tol.tol, tol.series_tol, tol.max_iter, tol.max_terms);

  std::ostringstream csv, summary;
  csv << "t,u,v,diff,H,bound,slack\n";
  const auto pts = grid->points();
  const IndexRange range = r.bound.bound.defined();
  for (std::size_t i = range.begin; i < range.end; ++i) {
    if (!r.bound.slack->is_defined(i)) continue;
    csv << format_double(pts[i]) << ',' << format_double(r.solution_a.solution[i]) << ','
        << format_double(r.solution_b.solution[i]) << ','
        << format_double((*r.bound.actual)[i]) << ',' << format_double(r.H[i]) << ','
        << format_double(r.bound.bound[i]) << ',' << format_double((*r.bound.slack)[i]) << '\n';
  }
  summary << "L = " << format_double(input.lipschitz) << '\n'
          << "iterations_u = " << r.solution_a.iterations << '\n'
          << "iterations_v = " << r.solution_b.iterations << '\n';
  write_report_summary(summary, r.bound);
  dir.write("dependence.csv", csv.str());
  dir.write("summary.txt", summary.str());
  out << summary.str();
  return r.bound.passed() ? kExitOk : kExitNumerical;
}

int run_verify(const RunConfig& run, std::ostream& out) {
  const Config cfg = load_config(run, false);
  VerifyOptions options;
  if (cfg.has("seed")) {
    const double s = cfg.number("seed");
    if (s < 0 || s != static_cast<double>(static_cast<std::uint64_t>(s)))
      throw IoError("seed must be a nonnegative integer");
    options.seed = static_cast<std::uint64_t>(s);
  }
  if (run.seed) options.seed = *run.seed;
  int instances = cfg.integer_or("instances", options.gronwall_instances);
  if (run.instances) instances = *run.instances;
  if (instances < 1) throw IoError("--instances must be at least 1");
  options.gronwall_instances = instances;
  options.solver_instances = std::max(1, instances / 4);

  // An extra grid from the config is loaded before anything runs.
  std::optional<GridPtr> extra;
  if (cfg.has("grid")) extra = load_grid(cfg);
  const OutputDir dir(run.out_dir);

  VerifyReport report = run_verify_suite(options);
  if (extra) {
    const TimeScaleGrid& g = **extra;
    for (int k = 1; k <= 2; ++k) {
      const std::string name = "config grid integer semigroup k=" + std::to_string(k);
      try {
        const double r = max_semigroup_residual(g, 1.0, k);
        report.rows.push_back({"semigroup", name, 0, r <= 1e-8 ? "pass" : "fail",
                               "value=" + format_double(r) + " limit=1e-08"});
      } catch (const std::exception& e) {
        report.rows.push_back({"semigroup", name, 0, "fail", std::string("exception: ") + e.what()});
      }
    }
  }

  std::ostringstream csv, summary;
  write_verify_csv(csv, report);
  summary << "seed = " << options.seed << '\n'
          << "gronwall_instances = " << options.gronwall_instances << '\n'
          << "solver_instances = " << options.solver_instances << '\n';
  write_verify_summary(summary, report);
  dir.write("verify.csv", csv.str());
  dir.write("summary.txt", summary.str());

  if (run.verbose) {
    print_hypothesis(out);
    for (const auto& r : report.rows)
      out << r.status << "  " << r.suite << " / " << r.invariant << " / " << r.seed << "  "
          << r.detail << '\n';
  }
  out << summary.str();
  return report.all_passed() ? kExitOk : kExitNumerical;
}

int dispatch(const RunConfig& run, std::ostream& out) {
  if (run.subcommand == "powfun") return run_powfun(run, out);
  if (run.subcommand == "solve") return run_solve(run, out);
  if (run.subcommand == "gronwall") return run_gronwall(run, out);
  if (run.subcommand == "depend") return run_depend(run, out);
  return run_verify(run, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional calculus and Gronwall bounds on time scales", "tsfrac"};
  app.require_subcommand(1);
  RunConfig run;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int instances = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"powfun", "Tabulate generalized power functions"},
      {"solve", "Solve a fractional Cauchy problem by Picard iteration"},
      {"gronwall", "Evaluate the fractional Gronwall bound"},
      {"depend", "Certify continuous dependence on data"},
      {"verify", "Run the invariant verification suite"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", run.config_path, "Configuration file (key = value)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--instances", instances, "Number of randomized instances");
    sub->add_flag("--check", run.check, "Report semigroup residuals");
    sub->add_flag("--verbose", run.verbose, "Print interpretation and per-row detail");
    subs.push_back(sub);
  }

  std::vector<const char*> argv{"tsfrac"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    run.subcommand = sub->get_name();
    if (sub->count("--seed")) run.seed = seed;
    if (sub->count("--instances")) run.instances = instances;
  }
  run.out_dir = out_dir;

  try {
    return dispatch(run, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const TruncationFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const RhsEvaluationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const UnsupportedScaleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const HypothesisError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace tsfrac
