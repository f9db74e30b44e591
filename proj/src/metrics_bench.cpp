#include "pucell/metrics_bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "pucell/cell_grid.hpp"
#include "pucell/errors.hpp"

namespace pucell {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Hit count and index checksum, so both search paths can be compared and
// the work cannot be optimized away.
struct Tally {
  std::size_t hits = 0;
  std::size_t checksum = 0;
  friend bool operator==(const Tally&, const Tally&) = default;
};

Tally localize_cell(const Dataset& data, double radius) {
  Tally tally;
  std::vector<std::size_t> buffer;
  const auto collect = [&](std::size_t i, const Point2&) { buffer.push_back(i); };

  const CellGrid node_grid = CellGrid::build(data.nodes, radius);
  for (const Point2& c : data.centers) {
    buffer.clear();
    node_grid.for_each_within(c, radius, collect);
    tally.hits += buffer.size();
    for (std::size_t i : buffer) tally.checksum += i;
  }
  const CellGrid center_grid = CellGrid::build(data.centers, radius);
  for (const Point2& p : data.eval_points) {
    buffer.clear();
    center_grid.for_each_within(p, radius, collect);
    tally.hits += buffer.size();
    for (std::size_t j : buffer) tally.checksum += j;
  }
  return tally;
}

Tally localize_brute(const Dataset& data, double radius) {
  Tally tally;
  std::vector<std::size_t> buffer;
  const auto scan = [&](std::span<const Point2> points, const Point2& center) {
    buffer.clear();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (within_radius(points[i], center, radius)) buffer.push_back(i);
    }
    tally.hits += buffer.size();
    for (std::size_t i : buffer) tally.checksum += i;
  };
  for (const Point2& c : data.centers) scan(data.nodes, c);
  for (const Point2& p : data.eval_points) scan(data.centers, p);
  return tally;
}

bool same_model(const PUModel& a, const PUModel& b) {
  const auto la = a.locals();
  const auto lb = b.locals();
  if (la.size() != lb.size()) return false;
  for (std::size_t j = 0; j < la.size(); ++j) {
    if (la[j].node_indices != lb[j].node_indices) return false;
    if (la[j].coeffs.size() != lb[j].coeffs.size()) return false;
    for (Eigen::Index k = 0; k < la[j].coeffs.size(); ++k) {
      if (la[j].coeffs[k] != lb[j].coeffs[k]) return false;
    }
  }
  return true;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

double rmse(std::span<const double> exact, std::span<const double> approx) {
  if (exact.empty()) throw InvalidArgument("rmse needs at least one value");
  if (exact.size() != approx.size()) {
    throw InvalidArgument("rmse length mismatch: " + std::to_string(exact.size()) + " vs " +
                          std::to_string(approx.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double e = exact[i] - approx[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(exact.size()));
}

Dataset make_dataset(const DatasetSpec& spec) {
  validate(spec);
  Dataset data;
  data.nodes = halton(spec.n);
  data.values = franke(data.nodes);
  data.centers = grid_centers(spec.d);
  data.eval_points = grid_points(spec.s_side);
  data.exact = franke(data.eval_points);
  return data;
}

double BenchReport::speedup() const {
  if (search_time_cell <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return search_time_brute / search_time_cell;
}

BenchReport run_accuracy_experiment(const DatasetSpec& spec, const KernelSpec& kernel,
                                    const ExperimentOptions& options) {
  return run_accuracy_experiment(make_dataset(spec), kernel, options);
}

BenchReport run_accuracy_experiment(const Dataset& data, const KernelSpec& kernel,
                                    const ExperimentOptions& options) {
  BenchReport report;
  report.n = data.nodes.size();
  report.d = data.centers.size();
  report.s = data.eval_points.size();
  report.kernel = kernel;

  BuildOptions build;
  build.policy = options.policy;
  build.parallel = options.parallel;

  auto start = Clock::now();
  const PUModel model = PUModel::build(data.nodes, data.values, data.centers, kernel, build);
  report.fit_time = seconds_since(start);

  EvalStats stats;
  start = Clock::now();
  const std::vector<double> approx = model.evaluate(data.eval_points, &stats);
  report.eval_time = seconds_since(start);

  report.rmse = rmse(data.exact, approx);
  report.uncovered_count = stats.uncovered_count;
  report.max_overlap = stats.max_overlap;
  report.mean_subdomain_size = model.mean_subdomain_size();
  report.empty_subdomains = model.empty_subdomains();
  report.degraded_subdomains = model.degraded_subdomains();
  return report;
}

std::vector<double> equispaced(double lo, double hi, std::size_t count) {
  if (count == 0) throw InvalidArgument("sweep needs at least one value");
  if (count == 1) return {lo};
  std::vector<double> values(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) values[i] = lo + step * static_cast<double>(i);
  values.back() = hi;
  return values;
}

std::vector<SweepPoint> run_shape_sweep(const DatasetSpec& spec, KernelFamily family,
                                        std::span<const double> shapes,
                                        const ExperimentOptions& options) {
  if (shapes.empty()) throw InvalidArgument("sweep needs at least one shape value");
  for (double s : shapes) validate(KernelSpec{family, s});

  const Dataset data = make_dataset(spec);
  std::vector<SweepPoint> curve;
  curve.reserve(shapes.size());
  for (double shape : shapes) {
    SweepPoint point;
    point.shape = shape;
    try {
      point.rmse = run_accuracy_experiment(data, KernelSpec{family, shape}, options).rmse;
      if (!std::isfinite(point.rmse)) {
        point.failed = true;
        point.reason = "non-finite rmse";
        point.rmse = std::numeric_limits<double>::quiet_NaN();
      }
    } catch (const IllConditioned& e) {
      point.failed = true;
      point.reason = e.what();
    }
    curve.push_back(std::move(point));
  }
  return curve;
}

BenchReport run_timing_experiment(const DatasetSpec& spec, const KernelSpec& kernel,
                                  unsigned repeats, const ExperimentOptions& options) {
  if (repeats == 0) throw InvalidArgument("repeats must be at least 1");
  const Dataset data = make_dataset(spec);
  const double radius = subdomain_radius(data.centers.size());

  double best_cell = std::numeric_limits<double>::infinity();
  double best_brute = std::numeric_limits<double>::infinity();
  Tally cell_tally;
  Tally brute_tally;
  for (unsigned r = 0; r < repeats; ++r) {
    auto start = Clock::now();
    cell_tally = localize_cell(data, radius);
    best_cell = std::min(best_cell, seconds_since(start));

    start = Clock::now();
    brute_tally = localize_brute(data, radius);
    best_brute = std::min(best_brute, seconds_since(start));
  }

  BenchReport report = run_accuracy_experiment(data, kernel, options);
  report.search_time_cell = best_cell;
  report.search_time_brute = best_brute;

  BuildOptions build;
  build.policy = options.policy;
  build.parallel = options.parallel;
  const PUModel cell_model = PUModel::build(data.nodes, data.values, data.centers, kernel, build);
  build.search = SearchMethod::BruteForce;
  const PUModel brute_model = PUModel::build(data.nodes, data.values, data.centers, kernel, build);
  report.paths_identical = cell_tally == brute_tally && same_model(cell_model, brute_model) &&
                           cell_model.evaluate(data.eval_points) ==
                               brute_model.evaluate(data.eval_points);
  return report;
}

void write_report_csv(std::ostream& out, std::span<const BenchReport> reports) {
  out << "n,d,s,kernel,shape,rmse,fit_time,eval_time,search_time_cell,search_time_brute,"
         "speedup,uncovered_count,max_overlap,mean_subdomain_size,empty_subdomains,"
         "degraded_subdomains,paths_identical\n";
  for (const BenchReport& r : reports) {
    out << r.n << ',' << r.d << ',' << r.s << ',' << to_string(r.kernel.family) << ','
        << format_double(r.kernel.shape) << ',' << format_double(r.rmse) << ','
        << format_double(r.fit_time) << ',' << format_double(r.eval_time) << ','
        << format_double(r.search_time_cell) << ',' << format_double(r.search_time_brute) << ','
        << format_double(r.speedup()) << ',' << r.uncovered_count << ',' << r.max_overlap << ','
        << format_double(r.mean_subdomain_size) << ',' << r.empty_subdomains << ','
        << r.degraded_subdomains << ',' << (r.paths_identical ? 1 : 0) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> sweep) {
  out << "shape,rmse,failed\n";
  for (const SweepPoint& p : sweep) {
    out << format_double(p.shape) << ',' << format_double(p.rmse) << ',' << (p.failed ? 1 : 0)
        << '\n';
  }
}

}  // namespace pucell
