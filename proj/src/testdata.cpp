#include "pucell/testdata.hpp"

#include <cmath>
#include <string>

#include "pucell/errors.hpp"

namespace pucell {

void validate(const DatasetSpec& spec) {
  if (spec.n == 0 || spec.d == 0 || spec.s_side == 0) {
    throw InvalidArgument("dataset sizes must be positive");
  }
}

double radical_inverse(std::size_t index, unsigned base) {
  const double inv_base = 1.0 / base;
  double scale = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return result;
}

PointList halton(std::size_t count) {
  PointList points;
  points.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    points.push_back({radical_inverse(i, 2), radical_inverse(i, 3)});
  }
  return points;
}

double franke(double x, double y) {
  const double a = 9.0 * x;
  const double b = 9.0 * y;
  const double t1 = 0.75 * std::exp(-((a - 2) * (a - 2) + (b - 2) * (b - 2)) / 4.0);
  const double t2 = 0.75 * std::exp(-(a + 1) * (a + 1) / 49.0 - (b + 1) / 10.0);
  const double t3 = 0.5 * std::exp(-((a - 7) * (a - 7) + (b - 3) * (b - 3)) / 4.0);
  const double t4 = -0.2 * std::exp(-(a - 4) * (a - 4) - (b - 7) * (b - 7));
  return t1 + t2 + t3 + t4;
}

std::vector<double> franke(std::span<const Point2> points) {
  std::vector<double> values;
  values.reserve(points.size());
  for (const Point2& p : points) values.push_back(franke(p.x, p.y));
  return values;
}

PointList grid_points(std::size_t side) {
  if (side < 2) {
    throw InvalidArgument("evaluation grid side must be at least 2, got " + std::to_string(side));
  }
  PointList points;
  points.reserve(side * side);
  const auto last = static_cast<double>(side - 1);
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t i = 0; i < side; ++i) {
      points.push_back({static_cast<double>(i) / last, static_cast<double>(j) / last});
    }
  }
  return points;
}

}  // namespace pucell
