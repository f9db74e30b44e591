#include "pucell/pu_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "pucell/errors.hpp"

namespace pucell {

namespace {

constexpr double kPivotFloor = 1e-12;
constexpr int kRefinementSteps = 3;

std::string subdomain_label(std::size_t subdomain) {
  return subdomain == kNoSubdomain ? std::string("local system")
                                   : "subdomain " + std::to_string(subdomain);
}

double residual_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& c, const Eigen::VectorXd& f) {
  return (a * c - f).lpNorm<Eigen::Infinity>();
}

// Refinement on a near-singular system can wander; keep the best iterate.
template <class Factorization>
Eigen::VectorXd solve_refined(const Factorization& factor, const Eigen::MatrixXd& a,
                              const Eigen::VectorXd& f, double tolerance) {
  Eigen::VectorXd best = factor.solve(f);
  if (!best.allFinite()) return best;
  double best_residual = residual_norm(a, best, f);
  Eigen::VectorXd c = best;
  for (int step = 0; step < kRefinementSteps && best_residual > tolerance; ++step) {
    c += factor.solve(f - a * c);
    if (!c.allFinite()) break;
    const double r = residual_norm(a, c, f);
    if (r < best_residual) {
      best = c;
      best_residual = r;
    }
  }
  return best;
}

void check_points(std::span<const Point2> points, const char* what) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!in_unit_square(points[i])) {
      throw OutOfDomain(std::string(what) + " " + std::to_string(i) +
                            " lies outside the unit square",
                        i);
    }
  }
}

}  // namespace

LocalFit fit_local_detailed(std::span<const Point2> nodes, std::span<const double> values,
                            const KernelSpec& kernel, std::size_t subdomain) {
  if (nodes.empty()) {
    throw EmptySubdomain(subdomain_label(subdomain) + " contains no nodes", subdomain);
  }
  if (nodes.size() != values.size()) {
    throw InvalidArgument(subdomain_label(subdomain) + ": " + std::to_string(nodes.size()) +
                          " nodes but " + std::to_string(values.size()) + " values");
  }
  const Eigen::MatrixXd a = kernel_matrix(nodes, kernel);
  const Eigen::Map<const Eigen::VectorXd> f(values.data(), static_cast<Eigen::Index>(values.size()));
  const double scale = std::max(1.0, f.lpNorm<Eigen::Infinity>());
  const double tolerance = kResidualTarget * scale;

  Eigen::VectorXd c;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  bool spd_ok = llt.info() == Eigen::Success;
  if (spd_ok) {
    const auto l = llt.matrixLLT().diagonal();
    spd_ok = (l.array() * l.array()).minCoeff() >= kPivotFloor;
  }
  if (spd_ok) {
    c = solve_refined(llt, a, f, tolerance);
  } else {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    c = solve_refined(lu, a, f, tolerance);
  }

  if (!c.allFinite()) {
    throw IllConditioned(subdomain_label(subdomain) + ": factorization produced non-finite coefficients",
                         subdomain);
  }
  LocalFit fit;
  fit.residual = residual_norm(a, c, f);
  if (fit.residual > kResidualAccept * scale) {
    std::ostringstream msg;
    msg << subdomain_label(subdomain) << ": residual " << fit.residual << " exceeds "
        << kResidualAccept * scale << " (" << nodes.size() << " nodes)";
    throw IllConditioned(msg.str(), subdomain);
  }
  fit.degraded = fit.residual > tolerance;
  fit.coeffs = std::move(c);
  return fit;
}

double weight(const Point2& p, const Point2& center, double radius) {
  const double r = distance(p, center);
  if (r >= radius) return 0.0;
  const double t = r / radius;
  const double u = 1.0 - t;
  const double u2 = u * u;
  return u2 * u2 * (4.0 * t + 1.0);
}

double eval_local(const LocalInterpolant& local, std::span<const Point2> model_nodes,
                  const KernelSpec& kernel, const Point2& p) {
  double sum = 0.0;
  for (std::size_t k = 0; k < local.node_indices.size(); ++k) {
    const double r = distance(p, model_nodes[local.node_indices[k]]);
    sum += local.coeffs[static_cast<Eigen::Index>(k)] * kernel_value_unchecked(kernel, r);
  }
  return sum;
}

PUModel PUModel::build(PointList nodes, std::vector<double> values, PointList centers,
                       const KernelSpec& kernel, const BuildOptions& options) {
  validate(kernel);
  if (nodes.size() != values.size()) {
    throw InvalidArgument(std::to_string(nodes.size()) + " nodes but " +
                          std::to_string(values.size()) + " values");
  }
  if (centers.empty()) throw InvalidArgument("at least one subdomain centre is required");
  check_points(nodes, "node");
  check_points(centers, "centre");

  PUModel model;
  model.kernel_ = kernel;
  model.policy_ = options.policy;
  model.search_ = options.search;
  model.radius_ = subdomain_radius(centers.size());
  model.nodes_ = std::move(nodes);
  model.values_ = std::move(values);
  model.centers_ = std::move(centers);

  const std::size_t d = model.centers_.size();
  model.locals_.resize(d);

  CellGrid node_grid;
  if (options.search == SearchMethod::Cell) {
    node_grid = CellGrid::build(model.nodes_, model.radius_);
  }
  for (std::size_t j = 0; j < d; ++j) {
    LocalInterpolant& local = model.locals_[j];
    local.center = model.centers_[j];
    local.radius = model.radius_;
    local.node_indices = options.search == SearchMethod::Cell
                             ? node_grid.range_query(local.center, model.radius_)
                             : brute_force_range_query(model.nodes_, local.center, model.radius_);
  }
  if (model.empty_subdomains() == d) {
    throw EmptySubdomain("every subdomain is empty; no node lies within radius " +
                         std::to_string(model.radius_) + " of any centre");
  }

  const auto fit_one = [&model](std::size_t j) {
    LocalInterpolant& local = model.locals_[j];
    if (!local.fitted()) return;
    PointList local_nodes;
    std::vector<double> local_values;
    local_nodes.reserve(local.node_indices.size());
    local_values.reserve(local.node_indices.size());
    for (std::size_t i : local.node_indices) {
      local_nodes.push_back(model.nodes_[i]);
      local_values.push_back(model.values_[i]);
    }
    LocalFit fit = fit_local_detailed(local_nodes, local_values, model.kernel_, j);
    local.coeffs = std::move(fit.coeffs);
    local.residual = fit.residual;
    local.degraded = fit.degraded;
  };

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  if (!options.parallel || threads <= 1 || d < 2) {
    for (std::size_t j = 0; j < d; ++j) fit_one(j);
  } else {
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, d));
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_subdomain = kNoSubdomain;
    std::exception_ptr error;
    {
      std::vector<std::jthread> pool;
      pool.reserve(threads);
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
          for (std::size_t j = next++; j < d; j = next++) {
            try {
              fit_one(j);
            } catch (...) {
              // Report the lowest failing subdomain, as the serial loop would.
              std::lock_guard lock(error_mutex);
              if (j < error_subdomain) {
                error_subdomain = j;
                error = std::current_exception();
              }
            }
          }
        });
      }
    }
    if (error) std::rethrow_exception(error);
  }

  model.index_centers();
  return model;
}

PUModel PUModel::from_parts(KernelSpec kernel, double radius, UncoveredPolicy policy,
                            PointList nodes, std::vector<double> values, PointList centers,
                            std::vector<LocalInterpolant> locals, SearchMethod search) {
  validate(kernel);
  if (!(radius > 0.0)) throw InvalidArgument("subdomain radius must be positive");
  if (nodes.size() != values.size()) throw InvalidArgument("node and value counts differ");
  if (centers.size() != locals.size()) throw InvalidArgument("centre and subdomain counts differ");
  if (centers.empty()) throw InvalidArgument("at least one subdomain centre is required");
  check_points(nodes, "node");
  check_points(centers, "centre");
  for (std::size_t j = 0; j < locals.size(); ++j) {
    const LocalInterpolant& local = locals[j];
    if (local.node_indices.size() != static_cast<std::size_t>(local.coeffs.size())) {
      throw InvalidArgument("subdomain " + std::to_string(j) + ": index and coefficient counts differ");
    }
    for (std::size_t i : local.node_indices) {
      if (i >= nodes.size()) {
        throw InvalidArgument("subdomain " + std::to_string(j) + " references node " +
                              std::to_string(i) + " which does not exist");
      }
    }
  }

  PUModel model;
  model.kernel_ = kernel;
  model.radius_ = radius;
  model.policy_ = policy;
  model.search_ = search;
  model.nodes_ = std::move(nodes);
  model.values_ = std::move(values);
  model.centers_ = std::move(centers);
  model.locals_ = std::move(locals);
  for (std::size_t j = 0; j < model.locals_.size(); ++j) {
    model.locals_[j].center = model.centers_[j];
    model.locals_[j].radius = radius;
  }
  model.index_centers();
  return model;
}

void PUModel::index_centers() {
  if (search_ == SearchMethod::Cell) center_grid_ = CellGrid::build(centers_, radius_);
}

std::vector<std::size_t> PUModel::covering(const Point2& p) const {
  std::vector<std::size_t> hits = search_ == SearchMethod::Cell
                                      ? center_grid_.range_query(p, radius_)
                                      : brute_force_range_query(centers_, p, radius_);
  std::erase_if(hits, [this](std::size_t j) { return !locals_[j].fitted(); });
  return hits;
}

std::optional<std::size_t> PUModel::nearest_fitted(const Point2& p) const {
  std::optional<std::size_t> best;
  double best_d2 = 0.0;
  for (std::size_t j = 0; j < locals_.size(); ++j) {
    if (!locals_[j].fitted()) continue;
    const double d2 = squared_distance(p, centers_[j]);
    if (!best || d2 < best_d2) {
      best = j;
      best_d2 = d2;
    }
  }
  return best;
}

std::vector<std::pair<std::size_t, double>> PUModel::normalized_weights(const Point2& p) const {
  std::vector<std::pair<std::size_t, double>> out;
  double total = 0.0;
  for (std::size_t j : covering(p)) {
    const double w = weight(p, centers_[j], radius_);
    out.emplace_back(j, w);
    total += w;
  }
  if (total > 0.0) {
    for (auto& [j, w] : out) w /= total;
  }
  return out;
}

Evaluation PUModel::evaluate_detailed(const Point2& p) const {
  if (!in_unit_square(p)) {
    throw OutOfDomain("evaluation point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") lies outside the unit square");
  }
  Evaluation result;
  const std::vector<std::size_t> cover = covering(p);
  result.overlap = cover.size();

  double weight_sum = 0.0;
  double blended = 0.0;
  std::vector<double> weights;
  weights.reserve(cover.size());
  for (std::size_t j : cover) {
    const double w = weight(p, centers_[j], radius_);
    weights.push_back(w);
    weight_sum += w;
  }
  // A point sitting exactly on the rim of every covering disk has zero total
  // weight and is handled like an uncovered point.
  if (weight_sum > 0.0) {
    double total = 0.0;
    for (std::size_t k = 0; k < cover.size(); ++k) {
      if (weights[k] == 0.0) continue;
      const double normalized = weights[k] / weight_sum;
      total += normalized;
      blended += normalized * eval_local(locals_[cover[k]], nodes_, kernel_, p);
    }
    result.value = blended;
    result.weight_total = total;
    return result;
  }

  if (policy_ == UncoveredPolicy::Error) {
    throw UncoveredPoint("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                         ") is not covered by any subdomain");
  }
  const auto nearest = nearest_fitted(p);
  // build() guarantees at least one fitted subdomain.
  result.value = eval_local(locals_[*nearest], nodes_, kernel_, p);
  result.uncovered = true;
  result.weight_total = 1.0;
  return result;
}

std::vector<double> PUModel::evaluate(std::span<const Point2> points, EvalStats* stats) const {
  std::vector<double> out(points.size());
  EvalStats local_stats;
  const auto eval_at = [&](std::size_t i) {
    const Evaluation e = evaluate_detailed(points[i]);
    out[i] = e.value;
    local_stats.max_overlap = std::max(local_stats.max_overlap, e.overlap);
    if (e.uncovered) ++local_stats.uncovered_count;
  };
  if (search_ == SearchMethod::Cell) {
    // Walk the evaluation points cell by cell, as the centres are stored.
    const CellGrid eval_grid = CellGrid::build(points, radius_);
    for (std::size_t i : eval_grid.perm()) eval_at(i);
  } else {
    for (std::size_t i = 0; i < points.size(); ++i) eval_at(i);
  }
  if (stats != nullptr) *stats = local_stats;
  return out;
}

std::size_t PUModel::empty_subdomains() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      locals_.begin(), locals_.end(), [](const LocalInterpolant& l) { return !l.fitted(); }));
}

std::size_t PUModel::degraded_subdomains() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      locals_.begin(), locals_.end(), [](const LocalInterpolant& l) { return l.degraded; }));
}

double PUModel::mean_subdomain_size() const noexcept {
  if (locals_.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& l : locals_) total += l.node_indices.size();
  return static_cast<double>(total) / static_cast<double>(locals_.size());
}

PointList grid_centers(std::size_t d) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
  if (d == 0 || side * side != d) {
    throw InvalidArgument("grid centres need a positive perfect-square count, got " +
                          std::to_string(d));
  }
  PointList centers;
  centers.reserve(d);
  const double h = 1.0 / static_cast<double>(side);
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t i = 0; i < side; ++i) {
      centers.push_back({(static_cast<double>(i) + 0.5) * h, (static_cast<double>(j) + 0.5) * h});
    }
  }
  return centers;
}

}  // namespace pucell
