#include "pucell/cell_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pucell/errors.hpp"

namespace pucell {

namespace {

// Keeps q*q cell offsets addressable without exhausting memory.
constexpr std::size_t kMaxStrips = 1u << 14;

std::size_t strip_of(double coord, std::size_t q, double delta_cell) {
  const auto s = static_cast<std::size_t>(std::floor(coord / delta_cell)) + 1;
  return std::min(s, q);
}

}  // namespace

double subdomain_radius(std::size_t d) {
  if (d == 0) throw InvalidArgument("subdomain count must be at least 1");
  return std::sqrt(2.0 / static_cast<double>(d));
}

std::size_t strip_count(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("strip width must be positive, got " + std::to_string(delta));
  }
  const double q = std::ceil(1.0 / delta);
  if (q > static_cast<double>(kMaxStrips)) {
    throw InvalidArgument("strip width " + std::to_string(delta) + " gives too many strips");
  }
  return static_cast<std::size_t>(q);
}

CellIndex cell_index(const Point2& p, std::size_t q, double delta_cell) {
  if (!in_unit_square(p)) {
    throw OutOfDomain("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") lies outside the unit square");
  }
  return {strip_of(p.x, q, delta_cell), strip_of(p.y, q, delta_cell)};
}

CellGrid CellGrid::build(std::span<const Point2> points, double delta) {
  CellGrid grid;
  grid.q_ = strip_count(delta);
  grid.delta_cell_ = delta;
  const std::size_t q = grid.q_;
  const std::size_t n = points.size();

  for (std::size_t i = 0; i < n; ++i) {
    if (!in_unit_square(points[i])) {
      throw OutOfDomain("point " + std::to_string(i) + " lies outside the unit square", i);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Order along y; ties fall back to x and then the input index.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Point2& pa = points[a];
    const Point2& pb = points[b];
    if (pa.y != pb.y) return pa.y < pb.y;
    if (pa.x != pb.x) return pa.x < pb.x;
    return a < b;
  });

  std::vector<std::size_t> strip(n);
  for (std::size_t k = 0; k < n; ++k) strip[k] = strip_of(points[order[k]].y, q, delta);

  // Within every horizontal strip, order along x.
  const auto by_x = [&](std::size_t a, std::size_t b) {
    const Point2& pa = points[a];
    const Point2& pb = points[b];
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return a < b;
  };
  for (std::size_t begin = 0; begin < n;) {
    std::size_t end = begin;
    while (end < n && strip[end] == strip[begin]) ++end;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
              order.begin() + static_cast<std::ptrdiff_t>(end), by_x);
    begin = end;
  }

  grid.cell_start_.assign(q * q + 1, 0);
  grid.sorted_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Point2& p = points[order[k]];
    const CellIndex c{strip_of(p.x, q, delta), strip[k]};
    ++grid.cell_start_[grid.cell_number(c) + 1];
    grid.sorted_.push_back(p);
  }
  std::partial_sum(grid.cell_start_.begin(), grid.cell_start_.end(), grid.cell_start_.begin());
  grid.perm_ = std::move(order);
  return grid;
}

CellGrid::Window CellGrid::window(const Point2& center, double radius) const {
  if (!(radius >= 0.0)) throw InvalidArgument("query radius must be nonnegative");
  const CellIndex c = cell_index(center, q_, delta_cell_);
  const auto reach = static_cast<std::size_t>(
      std::min(std::ceil(radius / delta_cell_), static_cast<double>(q_)));
  Window win;
  win.v_lo = c.v > reach ? c.v - reach : 1;
  win.w_lo = c.w > reach ? c.w - reach : 1;
  win.v_hi = std::min(c.v + reach, q_);
  win.w_hi = std::min(c.w + reach, q_);
  return win;
}

std::vector<std::size_t> CellGrid::range_query(const Point2& center, double radius,
                                               QueryStats* stats) const {
  std::vector<std::size_t> hits;
  for_each_within(center, radius, [&](std::size_t index, const Point2&) { hits.push_back(index); },
                  stats);
  std::sort(hits.begin(), hits.end());
  return hits;
}

std::vector<std::size_t> brute_force_range_query(std::span<const Point2> points,
                                                 const Point2& center, double radius) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (within_radius(points[i], center, radius)) hits.push_back(i);
  }
  return hits;
}

}  // namespace pucell
