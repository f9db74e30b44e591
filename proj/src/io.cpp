#include "pucell/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pucell/errors.hpp"

namespace pucell {

namespace {

constexpr const char* kModelMagic = "pucell-model";
constexpr int kModelVersion = 1;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line) + ": '" + std::string(field) +
                         "' is not a number",
                     line);
  }
  return value;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

// Token reader for the model file, tracking line numbers for errors.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string word() {
    while (pos_ >= tokens_.size()) {
      std::string text;
      if (!std::getline(in_, text)) throw ParseError("unexpected end of model file", line_);
      ++line_;
      tokens_.clear();
      pos_ = 0;
      std::istringstream split(text);
      for (std::string t; split >> t;) tokens_.push_back(t);
    }
    return tokens_[pos_++];
  }

  void expect(const std::string& keyword) {
    const std::string got = word();
    if (got != keyword) {
      throw ParseError("line " + std::to_string(line_) + ": expected '" + keyword + "', got '" +
                           got + "'",
                       line_);
    }
  }

  double number() { return parse_field(word(), line_); }

  std::size_t count() {
    const std::string t = word();
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw ParseError("line " + std::to_string(line_) + ": '" + t + "' is not a count", line_);
    }
    return v;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

PointTable read_points_csv(std::istream& in) {
  PointTable table;
  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  for (std::string text; std::getline(in, text);) {
    ++line_no;
    const std::string_view line = trim(text);
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 2 or 3 columns, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(columns) + " columns like the first row, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const Point2 p{parse_field(fields[0], line_no), parse_field(fields[1], line_no)};
    if (!in_unit_square(p)) {
      throw ParseError("line " + std::to_string(line_no) + ": point lies outside the unit square",
                       line_no);
    }
    table.points.push_back(p);
    if (columns == 3) values.push_back(parse_field(fields[2], line_no));
  }
  if (columns == 3) table.values = std::move(values);
  return table;
}

PointTable read_points_csv_file(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_points_csv(in);
}

void write_points_csv(std::ostream& out, std::span<const Point2> points,
                      std::span<const double> values) {
  if (!values.empty() && values.size() != points.size()) {
    throw InvalidArgument("point and value counts differ");
  }
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << points[i].x << ',' << points[i].y;
    if (!values.empty()) out << ',' << values[i];
    out << '\n';
  }
  out.precision(old_precision);
}

void write_points_csv_file(const std::string& path, std::span<const Point2> points,
                           std::span<const double> values) {
  std::ofstream out = open_out(path);
  write_points_csv(out, points, values);
  finish(out, path);
}

void write_model(std::ostream& out, const PUModel& model) {
  const auto old_precision = out.precision(17);
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "kernel " << to_string(model.kernel().family) << ' ' << model.kernel().shape << '\n';
  out << "radius " << model.radius() << '\n';
  out << "policy " << (model.policy() == UncoveredPolicy::Error ? "error" : "nearest") << '\n';
  const auto nodes = model.nodes();
  const auto values = model.values();
  out << "nodes " << nodes.size() << '\n';
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out << nodes[i].x << ' ' << nodes[i].y << ' ' << values[i] << '\n';
  }
  const auto centers = model.centers();
  out << "centers " << centers.size() << '\n';
  for (const Point2& c : centers) out << c.x << ' ' << c.y << '\n';
  const auto locals = model.locals();
  for (std::size_t j = 0; j < locals.size(); ++j) {
    out << "subdomain " << j << ' ' << locals[j].node_indices.size() << '\n';
    for (std::size_t k = 0; k < locals[j].node_indices.size(); ++k) {
      out << locals[j].node_indices[k] << ' ' << locals[j].coeffs[static_cast<Eigen::Index>(k)]
          << '\n';
    }
  }
  out.precision(old_precision);
}

PUModel read_model(std::istream& in) {
  TokenReader reader(in);
  reader.expect(kModelMagic);
  if (reader.count() != kModelVersion) {
    throw ParseError("unsupported model file version", reader.line());
  }
  reader.expect("kernel");
  KernelSpec kernel;
  try {
    kernel.family = parse_kernel_family(reader.word());
  } catch (const InvalidArgument& e) {
    throw ParseError("line " + std::to_string(reader.line()) + ": " + e.what(), reader.line());
  }
  kernel.shape = reader.number();
  reader.expect("radius");
  const double radius = reader.number();
  reader.expect("policy");
  const std::string policy_name = reader.word();
  UncoveredPolicy policy;
  if (policy_name == "error") {
    policy = UncoveredPolicy::Error;
  } else if (policy_name == "nearest") {
    policy = UncoveredPolicy::NearestLocal;
  } else {
    throw ParseError("line " + std::to_string(reader.line()) + ": unknown policy '" +
                         policy_name + "'",
                     reader.line());
  }

  reader.expect("nodes");
  const std::size_t n = reader.count();
  PointList nodes(n);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].x = reader.number();
    nodes[i].y = reader.number();
    values[i] = reader.number();
  }
  reader.expect("centers");
  const std::size_t d = reader.count();
  PointList centers(d);
  for (auto& c : centers) {
    c.x = reader.number();
    c.y = reader.number();
  }
  std::vector<LocalInterpolant> locals(d);
  for (std::size_t j = 0; j < d; ++j) {
    reader.expect("subdomain");
    if (reader.count() != j) {
      throw ParseError("line " + std::to_string(reader.line()) + ": subdomains out of order",
                       reader.line());
    }
    const std::size_t m = reader.count();
    locals[j].node_indices.resize(m);
    locals[j].coeffs.resize(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
      locals[j].node_indices[k] = reader.count();
      locals[j].coeffs[static_cast<Eigen::Index>(k)] = reader.number();
    }
  }
  try {
    return PUModel::from_parts(kernel, radius, policy, std::move(nodes), std::move(values),
                               std::move(centers), std::move(locals));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("inconsistent model file: ") + e.what(), reader.line());
  } catch (const OutOfDomain& e) {
    throw ParseError(std::string("inconsistent model file: ") + e.what(), reader.line());
  }
}

void write_model_file(const std::string& path, const PUModel& model) {
  std::ofstream out = open_out(path);
  write_model(out, model);
  finish(out, path);
}

PUModel read_model_file(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_model(in);
}

}  // namespace pucell
