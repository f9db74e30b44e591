#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pucell/point.hpp"

namespace pucell {

/// Subdomain radius sqrt(2/d) for d subdomains over the unit square. This
/// targets roughly four nodes per subdomain centre on nearly uniform data.
double subdomain_radius(std::size_t d);

/// Strips per axis, ceil(1/delta). Any delta > 0 is accepted; delta >= 1
/// yields a single strip.
std::size_t strip_count(double delta);

/// 1-based (v, w) cell address: v counts strips along x, w along y.
struct CellIndex {
  std::size_t v = 1;
  std::size_t w = 1;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Cell containing p. Coordinates equal to 1 clamp into strip q.
/// Throws OutOfDomain for points outside [0,1]^2.
CellIndex cell_index(const Point2& p, std::size_t q, double delta_cell);

struct QueryStats {
  std::size_t cells_visited = 0;
  std::size_t points_tested = 0;
};

/// Points of the unit square bucketed into a q x q grid of square cells.
///
/// Points are ordered by y, then by x inside each horizontal strip, so every
/// cell owns one contiguous run of the sorted array; cell_start() is the
/// offset table over those runs, with cells numbered (w-1)*q + (v-1). The
/// grid is immutable after construction.
class CellGrid {
 public:
  CellGrid() = default;

  /// Throws OutOfDomain (with the offending input index) for points outside
  /// the unit square and InvalidArgument for a non-positive delta.
  static CellGrid build(std::span<const Point2> points, double delta);

  std::size_t q() const noexcept { return q_; }
  double delta_cell() const noexcept { return delta_cell_; }
  std::size_t size() const noexcept { return sorted_.size(); }

  std::span<const Point2> sorted_points() const noexcept { return sorted_; }
  std::span<const std::size_t> cell_start() const noexcept { return cell_start_; }
  // perm()[k] is the input index of sorted_points()[k].
  std::span<const std::size_t> perm() const noexcept { return perm_; }

  std::size_t cell_number(CellIndex c) const noexcept { return (c.w - 1) * q_ + (c.v - 1); }
  std::size_t cell_count(CellIndex c) const noexcept {
    const std::size_t k = cell_number(c);
    return cell_start_[k + 1] - cell_start_[k];
  }

  /// Input indices of all points p with |p - center| <= radius, ascending.
  /// Inspects the (2i*+1)^2 cells around the centre's cell, clamped to the
  /// grid, with i* = ceil(radius / delta_cell).
  std::vector<std::size_t> range_query(const Point2& center, double radius,
                                       QueryStats* stats = nullptr) const;

  /// Same search as range_query, but calls fn(input_index, point) for each
  /// hit in sorted order without allocating.
  template <class Fn>
  void for_each_within(const Point2& center, double radius, Fn&& fn,
                       QueryStats* stats = nullptr) const;

 private:
  struct Window {
    std::size_t v_lo, v_hi, w_lo, w_hi;
  };
  Window window(const Point2& center, double radius) const;

  std::size_t q_ = 0;
  double delta_cell_ = 0.0;
  std::vector<Point2> sorted_;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> perm_;
};

/// Linear scan over all points; input indices ascending.
std::vector<std::size_t> brute_force_range_query(std::span<const Point2> points,
                                                 const Point2& center, double radius);

template <class Fn>
void CellGrid::for_each_within(const Point2& center, double radius, Fn&& fn,
                               QueryStats* stats) const {
  const Window win = window(center, radius);
  std::size_t tested = 0;
  for (std::size_t w = win.w_lo; w <= win.w_hi; ++w) {
    // Cells of one strip are adjacent in the sorted array, so the whole
    // v-range of a row is a single contiguous run.
    const std::size_t begin = cell_start_[(w - 1) * q_ + (win.v_lo - 1)];
    const std::size_t end = cell_start_[(w - 1) * q_ + win.v_hi];
    tested += end - begin;
    for (std::size_t k = begin; k < end; ++k) {
      if (within_radius(sorted_[k], center, radius)) fn(perm_[k], sorted_[k]);
    }
  }
  if (stats != nullptr) {
    stats->cells_visited += (win.v_hi - win.v_lo + 1) * (win.w_hi - win.w_lo + 1);
    stats->points_tested += tested;
  }
}

}  // namespace pucell
