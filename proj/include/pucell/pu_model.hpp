#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pucell/cell_grid.hpp"
#include "pucell/kernels.hpp"
#include "pucell/point.hpp"

namespace pucell {

enum class UncoveredPolicy { Error, NearestLocal };
enum class SearchMethod { Cell, BruteForce };

/// One subdomain: a closed disk and the RBF interpolant fitted on the nodes
/// inside it. An empty node list marks the subdomain as unfitted.
struct LocalInterpolant {
  Point2 center;
  double radius = 0.0;
  std::vector<std::size_t> node_indices;
  Eigen::VectorXd coeffs;
  // |A c - f|_inf achieved by the fit; 0 when unknown (e.g. read from file).
  double residual = 0.0;
  bool degraded = false;

  bool fitted() const noexcept { return !node_indices.empty(); }
};

inline constexpr std::size_t kNoSubdomain = std::numeric_limits<std::size_t>::max();

struct LocalFit {
  Eigen::VectorXd coeffs;
  double residual = 0.0;
  // Residual above the target bound but within the acceptance bound.
  bool degraded = false;
};

/// Residual bounds, relative to max(1, |f|_inf).
inline constexpr double kResidualTarget = 1e-8;
inline constexpr double kResidualAccept = 1e-6;

/// Solves A c = f for the local system built from `nodes`.
///
/// Uses a Cholesky factorization; when a pivot drops below 1e-12 it falls
/// back to fully pivoted LU, then applies up to three steps of iterative
/// refinement. Residuals up to kResidualTarget are clean. Flat Gaussian
/// systems can have a rounding floor above that, since their coefficients
/// grow to 1e7 and beyond; residuals up to kResidualAccept are then kept
/// but marked degraded. Anything worse throws IllConditioned. Also throws
/// EmptySubdomain or DuplicatePoints; `subdomain` only labels the error.
LocalFit fit_local_detailed(std::span<const Point2> nodes, std::span<const double> values,
                            const KernelSpec& kernel, std::size_t subdomain = kNoSubdomain);

inline Eigen::VectorXd fit_local(std::span<const Point2> nodes, std::span<const double> values,
                                 const KernelSpec& kernel, std::size_t subdomain = kNoSubdomain) {
  return fit_local_detailed(nodes, values, kernel, subdomain).coeffs;
}

/// Unnormalized Wendland C2 weight (1-t)_+^4 (4t+1) with t = |p - center| / radius.
double weight(const Point2& p, const Point2& center, double radius);

/// sum_k coeffs[k] * phi(|p - node_k|) over the nodes of `local`.
double eval_local(const LocalInterpolant& local, std::span<const Point2> model_nodes,
                  const KernelSpec& kernel, const Point2& p);

struct BuildOptions {
  UncoveredPolicy policy = UncoveredPolicy::NearestLocal;
  SearchMethod search = SearchMethod::Cell;
  bool parallel = false;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Result of evaluating the model at one point.
struct Evaluation {
  double value = 0.0;
  // Number of fitted subdomains whose closed disk contains the point.
  std::size_t overlap = 0;
  // Set when no subdomain covered the point and the nearest local was used.
  bool uncovered = false;
  // Sum of the normalized weights; 1 up to rounding on covered points.
  double weight_total = 0.0;
};

struct EvalStats {
  std::size_t uncovered_count = 0;
  std::size_t max_overlap = 0;
};

/// Partition-of-unity interpolant: local RBF interpolants on disks of radius
/// sqrt(2/d) around the centres, blended with Shepard-normalized compactly
/// supported weights. Immutable once built; evaluation is thread-safe.
class PUModel {
 public:
  /// Throws InvalidArgument for mismatched sizes or no centres, OutOfDomain
  /// for points outside the unit square, EmptySubdomain when every subdomain
  /// is empty, and propagates fit_local errors.
  static PUModel build(PointList nodes, std::vector<double> values, PointList centers,
                       const KernelSpec& kernel, const BuildOptions& options = {});

  /// Reassembles a model from previously fitted parts (used by model files).
  static PUModel from_parts(KernelSpec kernel, double radius, UncoveredPolicy policy,
                            PointList nodes, std::vector<double> values, PointList centers,
                            std::vector<LocalInterpolant> locals,
                            SearchMethod search = SearchMethod::Cell);

  double evaluate(const Point2& p) const { return evaluate_detailed(p).value; }

  /// Throws OutOfDomain for p outside the unit square and UncoveredPoint when
  /// the policy is Error and no subdomain covers p.
  Evaluation evaluate_detailed(const Point2& p) const;

  /// Evaluates a batch; results are in input order.
  std::vector<double> evaluate(std::span<const Point2> points, EvalStats* stats = nullptr) const;

  /// Normalized weights of the subdomains covering p, paired with their
  /// subdomain index in ascending order.
  std::vector<std::pair<std::size_t, double>> normalized_weights(const Point2& p) const;

  const KernelSpec& kernel() const noexcept { return kernel_; }
  double radius() const noexcept { return radius_; }
  UncoveredPolicy policy() const noexcept { return policy_; }
  SearchMethod search() const noexcept { return search_; }
  std::span<const Point2> nodes() const noexcept { return nodes_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const Point2> centers() const noexcept { return centers_; }
  std::span<const LocalInterpolant> locals() const noexcept { return locals_; }

  std::size_t empty_subdomains() const noexcept;
  // Fitted subdomains whose residual missed kResidualTarget.
  std::size_t degraded_subdomains() const noexcept;
  // Mean m_j over all subdomains, empty ones included.
  double mean_subdomain_size() const noexcept;

 private:
  void index_centers();
  // Fitted subdomains covering p, ascending.
  std::vector<std::size_t> covering(const Point2& p) const;
  std::optional<std::size_t> nearest_fitted(const Point2& p) const;

  KernelSpec kernel_;
  double radius_ = 0.0;
  UncoveredPolicy policy_ = UncoveredPolicy::NearestLocal;
  SearchMethod search_ = SearchMethod::Cell;
  PointList nodes_;
  std::vector<double> values_;
  PointList centers_;
  std::vector<LocalInterpolant> locals_;
  CellGrid center_grid_;
};

/// Uniform sqrt(d) x sqrt(d) grid of centres with spacing 1/sqrt(d), offset by
/// half a spacing from the boundary. Throws InvalidArgument unless d is a
/// positive perfect square.
PointList grid_centers(std::size_t d);

}  // namespace pucell
