#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pucell/point.hpp"
#include "pucell/pu_model.hpp"

namespace pucell {

/// Points read from CSV: `x,y` or `x,y,f` per line, no header. All lines
/// must have the same column count.
struct PointTable {
  PointList points;
  std::optional<std::vector<double>> values;
};

/// Throws ParseError (with the 1-based line number) for wrong column counts,
/// non-numeric fields and coordinates outside [0,1]. Blank lines are skipped.
PointTable read_points_csv(std::istream& in);
PointTable read_points_csv_file(const std::string& path);

/// Writes with 17 significant digits so values round-trip exactly.
void write_points_csv(std::ostream& out, std::span<const Point2> points,
                      std::span<const double> values = {});
void write_points_csv_file(const std::string& path, std::span<const Point2> points,
                           std::span<const double> values = {});

/// Plain-text model file; see README for the layout.
void write_model(std::ostream& out, const PUModel& model);
PUModel read_model(std::istream& in);
void write_model_file(const std::string& path, const PUModel& model);
PUModel read_model_file(const std::string& path);

}  // namespace pucell
