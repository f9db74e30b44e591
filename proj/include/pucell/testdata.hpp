#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pucell/point.hpp"

namespace pucell {

struct DatasetSpec {
  std::size_t n = 4225;     // Halton nodes
  std::size_t d = 1024;     // subdomain centres (perfect square)
  std::size_t s_side = 33;  // evaluation grid is s_side x s_side
};

void validate(const DatasetSpec& spec);

/// Radical inverse of `index` in `base`.
double radical_inverse(std::size_t index, unsigned base);

/// First `count` points of the 2-D Halton sequence in bases (2, 3), starting
/// at index 1 so the origin is skipped.
PointList halton(std::size_t count);

/// Franke's bivariate test function.
double franke(double x, double y);

std::vector<double> franke(std::span<const Point2> points);

/// side x side grid (i/(side-1), j/(side-1)) including the boundary, x
/// varying fastest. Throws InvalidArgument for side < 2.
PointList grid_points(std::size_t side);

}  // namespace pucell
