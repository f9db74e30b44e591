#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

#include "pucell/cell_grid.hpp"
#include "pucell/io.hpp"
#include "pucell/metrics_bench.hpp"
#include "pucell/testdata.hpp"

namespace pucell::cli {

namespace {

const CLI::Validator kPositive(
    [](const std::string& text) -> std::string {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used == text.size() && v > 0) return {};
      } catch (const std::exception&) {
      }
      return "must be a positive integer, got '" + text + "'";
    },
    "POSITIVE");

struct RawOptions {
  std::string kernel = "wendland";
  std::optional<double> shape;
  std::string policy = "nearest";
  std::optional<double> sweep_min;
  std::optional<double> sweep_max;
  bool d_given = false;
};

void add_sizes(CLI::App* cmd, RunConfig& cfg, RawOptions& raw, bool with_d) {
  cmd->add_option("--n", cfg.n, "number of Halton nodes")->check(kPositive);
  if (with_d) {
    cmd->add_option("--d", cfg.d, "number of subdomain centres (perfect square)")
        ->check(kPositive)
        ->each([&raw](const std::string&) { raw.d_given = true; });
  }
  cmd->add_option("--side", cfg.side, "evaluation grid side")->check(kPositive);
}

void add_kernel(CLI::App* cmd, RawOptions& raw, bool with_shape = true) {
  cmd->add_option("--kernel", raw.kernel, "gaussian or wendland")
      ->check(CLI::IsMember({"gaussian", "wendland"}));
  if (with_shape) {
    cmd->add_option("--shape", raw.shape, "alpha^2 for gaussian, c for wendland");
  }
}

void add_fit_flags(CLI::App* cmd, RunConfig& cfg, RawOptions& raw) {
  cmd->add_option("--policy", raw.policy, "uncovered evaluation points: error or nearest")
      ->check(CLI::IsMember({"error", "nearest"}));
  cmd->add_flag("--parallel", cfg.parallel, "fit local systems on several threads");
}

void add_out(CLI::App* cmd, RunConfig& cfg, bool required = false) {
  auto* opt = cmd->add_option("--out", cfg.out, "output path");
  if (required) opt->required();
}

bool is_perfect_square(std::size_t v) {
  const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v))));
  return r * r == v;
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(4) << v;
  return s.str();
}

std::string secs(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v << " s";
  return s.str();
}

template <class Fn>
void with_output_file(const std::optional<std::string>& path, Fn&& fn) {
  if (!path) return;
  std::ofstream file(*path);
  if (!file) throw Error("cannot open '" + *path + "' for writing");
  fn(file);
  file.flush();
  if (!file) throw Error("failed writing '" + *path + "'");
}

DatasetSpec dataset_of(const RunConfig& cfg) { return {cfg.n, cfg.d, cfg.side}; }

ExperimentOptions experiment_of(const RunConfig& cfg) {
  ExperimentOptions options;
  options.policy = cfg.policy;
  options.parallel = cfg.parallel;
  return options;
}

void print_report(std::ostream& out, const BenchReport& r) {
  out << "n = " << r.n << ", d = " << r.d << ", s = " << r.s << ", kernel = "
      << to_string(r.kernel.family) << " (shape " << r.kernel.shape << ")\n"
      << "RMSE = " << sci(r.rmse) << '\n'
      << "fit time = " << secs(r.fit_time) << ", eval time = " << secs(r.eval_time) << '\n'
      << "mean subdomain size = " << r.mean_subdomain_size
      << ", empty subdomains = " << r.empty_subdomains << ", max overlap = " << r.max_overlap
      << ", uncovered = " << r.uncovered_count << ", degraded fits = " << r.degraded_subdomains
      << '\n';
}

int run_gen(const RunConfig& cfg, std::ostream& out) {
  const PointList nodes = halton(cfg.n);
  const std::vector<double> values = cfg.franke ? franke(nodes) : std::vector<double>{};
  write_points_csv_file(*cfg.out, nodes, values);
  out << "wrote " << nodes.size() << " Halton nodes to " << *cfg.out << '\n';
  return kExitOk;
}

int run_fit(const RunConfig& cfg, std::ostream& out) {
  PointTable table = read_points_csv_file(*cfg.nodes);
  std::vector<double> values;
  if (cfg.franke) {
    values = franke(table.points);
  } else if (table.values) {
    values = std::move(*table.values);
  } else {
    throw Error("'" + *cfg.nodes + "' has no value column; add one or pass --franke");
  }
  PointList centers = cfg.centers ? read_points_csv_file(*cfg.centers).points : grid_centers(cfg.d);

  BuildOptions options;
  options.policy = cfg.policy;
  options.parallel = cfg.parallel;
  const auto start = std::chrono::steady_clock::now();
  const PUModel model =
      PUModel::build(std::move(table.points), std::move(values), std::move(centers), cfg.kernel, options);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out << "n = " << model.nodes().size() << ", d = " << model.centers().size()
      << ", radius = " << model.radius() << ", kernel = " << to_string(cfg.kernel.family)
      << " (shape " << cfg.kernel.shape << ")\n"
      << "mean subdomain size = " << model.mean_subdomain_size()
      << ", empty subdomains = " << model.empty_subdomains()
      << ", degraded fits = " << model.degraded_subdomains() << '\n'
      << "fit time = " << secs(elapsed) << '\n';
  if (cfg.out) {
    write_model_file(*cfg.out, model);
    out << "wrote model to " << *cfg.out << '\n';
  }
  return kExitOk;
}

int run_eval(const RunConfig& cfg, std::ostream& out) {
  const PUModel model = read_model_file(*cfg.model);
  const PointList points = cfg.nodes ? read_points_csv_file(*cfg.nodes).points : grid_points(cfg.side);
  EvalStats stats;
  const std::vector<double> approx = model.evaluate(points, &stats);
  out << "evaluated " << points.size() << " points, uncovered = " << stats.uncovered_count
      << ", max overlap = " << stats.max_overlap << '\n';
  if (cfg.franke) out << "RMSE = " << sci(rmse(franke(points), approx)) << '\n';
  with_output_file(cfg.out, [&](std::ostream& file) { write_points_csv(file, points, approx); });
  return kExitOk;
}

int run_accuracy(const RunConfig& cfg, std::ostream& out) {
  const BenchReport report = run_accuracy_experiment(dataset_of(cfg), cfg.kernel, experiment_of(cfg));
  print_report(out, report);
  with_output_file(cfg.out, [&](std::ostream& file) { write_report_csv(file, {&report, 1}); });
  return kExitOk;
}

int run_sweep(const RunConfig& cfg, std::ostream& out) {
  const std::vector<double> shapes = equispaced(cfg.sweep_min, cfg.sweep_max, cfg.sweep_count);
  const std::vector<SweepPoint> curve =
      run_shape_sweep(dataset_of(cfg), cfg.kernel.family, shapes, experiment_of(cfg));
  out << "shape sweep, kernel = " << to_string(cfg.kernel.family) << ", n = " << cfg.n
      << ", d = " << cfg.d << '\n';
  std::size_t failed = 0;
  for (const SweepPoint& p : curve) {
    out << "  " << std::setw(10) << p.shape << "  "
        << (p.failed ? std::string("failed (ill-conditioned)") : sci(p.rmse)) << '\n';
    if (p.failed) ++failed;
  }
  out << "failed fits = " << failed << '\n';
  with_output_file(cfg.out, [&](std::ostream& file) { write_sweep_csv(file, curve); });
  return kExitOk;
}

int run_timing(const RunConfig& cfg, std::ostream& out) {
  const BenchReport report =
      run_timing_experiment(dataset_of(cfg), cfg.kernel, cfg.repeats, experiment_of(cfg));
  print_report(out, report);
  out << "search time (cell) = " << secs(report.search_time_cell)
      << ", search time (brute force) = " << secs(report.search_time_brute)
      << ", ratio = " << std::setprecision(3) << report.speedup() << '\n'
      << "search paths agree = " << (report.paths_identical ? "yes" : "NO") << '\n';
  with_output_file(cfg.out, [&](std::ostream& file) { write_report_csv(file, {&report, 1}); });
  return kExitOk;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  RawOptions raw;
  CLI::App app{"Partition-of-unity RBF interpolation with cell-based search", "pucell"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "write Halton nodes as CSV");
  gen->add_option("--n", cfg.n, "number of Halton nodes")->check(kPositive);
  gen->add_flag("--franke", cfg.franke, "append Franke values as a third column");
  add_out(gen, cfg, true);

  auto* fit = app.add_subcommand("fit", "fit a model to a node file");
  fit->add_option("--nodes", cfg.nodes, "node CSV (x,y[,f])")->required();
  fit->add_option("--centers", cfg.centers, "centre CSV (x,y); default is a grid of --d centres");
  fit->add_option("--d", cfg.d, "number of grid centres (perfect square)")
      ->check(kPositive)
      ->each([&raw](const std::string&) { raw.d_given = true; });
  fit->add_flag("--franke", cfg.franke, "use Franke values instead of the file's third column");
  add_kernel(fit, raw);
  add_fit_flags(fit, cfg, raw);
  add_out(fit, cfg);

  auto* eval = app.add_subcommand("eval", "evaluate a fitted model");
  eval->add_option("--model", cfg.model, "model file written by fit")->required();
  eval->add_option("--nodes", cfg.nodes, "evaluation points CSV; default is the --side grid");
  eval->add_option("--side", cfg.side, "evaluation grid side")->check(kPositive);
  eval->add_flag("--franke", cfg.franke, "report RMSE against Franke's function");
  add_out(eval, cfg);

  auto* accuracy = app.add_subcommand("accuracy", "RMSE of one configuration on Franke's function");
  add_sizes(accuracy, cfg, raw, true);
  add_kernel(accuracy, raw);
  add_fit_flags(accuracy, cfg, raw);
  add_out(accuracy, cfg);

  auto* sweep = app.add_subcommand("sweep", "RMSE over equispaced shape parameters");
  add_sizes(sweep, cfg, raw, true);
  add_kernel(sweep, raw, false);
  add_fit_flags(sweep, cfg, raw);
  sweep->add_option("--sweep-min", raw.sweep_min, "smallest shape value");
  sweep->add_option("--sweep-max", raw.sweep_max, "largest shape value");
  sweep->add_option("--sweep-count", cfg.sweep_count, "number of shape values")
      ->check(kPositive);
  add_out(sweep, cfg);

  auto* timing = app.add_subcommand("timing", "cell search versus linear scan");
  add_sizes(timing, cfg, raw, true);
  add_kernel(timing, raw);
  add_fit_flags(timing, cfg, raw);
  timing->add_option("--repeats", cfg.repeats, "best-of repeats")->check(kPositive);
  add_out(timing, cfg);

  if (args.empty()) throw UsageError(app.help());
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    throw HelpRequested(subs.empty() ? app.help() : subs.front()->help());
  } catch (const CLI::ParseError& e) {
    std::string text = e.what();
    const auto* selected = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    throw UsageError(text + "\n" + selected->help());
  }
  const std::string name = app.get_subcommands().front()->get_name();
  if (name == "gen") cfg.command = Command::Gen;
  else if (name == "fit") cfg.command = Command::Fit;
  else if (name == "eval") cfg.command = Command::Eval;
  else if (name == "accuracy") cfg.command = Command::Accuracy;
  else if (name == "sweep") cfg.command = Command::Sweep;
  else cfg.command = Command::Timing;

  cfg.kernel.family = parse_kernel_family(raw.kernel);
  const double default_shape = cfg.kernel.family == KernelFamily::Gaussian ? 50.0 : 1.0;
  cfg.kernel.shape = raw.shape.value_or(default_shape);
  if (!(cfg.kernel.shape > 0.0) || !std::isfinite(cfg.kernel.shape)) {
    throw UsageError("--shape: must be positive");
  }
  cfg.policy = raw.policy == "error" ? UncoveredPolicy::Error : UncoveredPolicy::NearestLocal;

  if (cfg.kernel.family == KernelFamily::Gaussian) {
    cfg.sweep_min = raw.sweep_min.value_or(1.0);
    cfg.sweep_max = raw.sweep_max.value_or(100.0);
  } else {
    cfg.sweep_min = raw.sweep_min.value_or(0.1);
    cfg.sweep_max = raw.sweep_max.value_or(2.0);
  }
  if (!(cfg.sweep_min > 0.0)) throw UsageError("--sweep-min: must be positive");
  if (!(cfg.sweep_max >= cfg.sweep_min)) throw UsageError("--sweep-max: must be >= --sweep-min");

  const bool uses_grid_centers = cfg.command == Command::Accuracy || cfg.command == Command::Sweep ||
                                 cfg.command == Command::Timing ||
                                 (cfg.command == Command::Fit && !cfg.centers);
  if (uses_grid_centers && !is_perfect_square(cfg.d)) {
    throw UsageError("--d: grid centres need a perfect square, got " + std::to_string(cfg.d));
  }
  if (cfg.command == Command::Fit && cfg.centers && raw.d_given) {
    throw UsageError("--d: cannot be combined with --centers");
  }
  if (cfg.side < 2) throw UsageError("--side: must be at least 2");
  return cfg;
}

int run(const RunConfig& config, std::ostream& out) {
  switch (config.command) {
    case Command::Gen:
      return run_gen(config, out);
    case Command::Fit:
      return run_fit(config, out);
    case Command::Eval:
      return run_eval(config, out);
    case Command::Accuracy:
      return run_accuracy(config, out);
    case Command::Sweep:
      return run_sweep(config, out);
    case Command::Timing:
      return run_timing(config, out);
  }
  return kExitUsage;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_args(args);
  } catch (const HelpRequested& help) {
    out << help.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    return run(config, out);
  } catch (const IllConditioned& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DuplicatePoints& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const EmptySubdomain& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace pucell::cli
