#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pucell/errors.hpp"
#include "pucell/kernels.hpp"
#include "pucell/pu_model.hpp"

namespace pucell::cli {

enum class Command { Gen, Fit, Eval, Accuracy, Sweep, Timing };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  Command command = Command::Accuracy;
  std::size_t n = 4225;
  std::size_t d = 1024;
  std::size_t side = 33;
  KernelSpec kernel = KernelSpec::wendland(1.0);
  std::optional<std::string> nodes;
  std::optional<std::string> centers;
  std::optional<std::string> model;
  std::optional<std::string> out;
  UncoveredPolicy policy = UncoveredPolicy::NearestLocal;
  unsigned repeats = 3;
  bool parallel = false;
  bool franke = false;
  double sweep_min = 0.1;
  double sweep_max = 2.0;
  std::size_t sweep_count = 20;
};

/// Parses arguments (without the program name). Throws UsageError naming the
/// offending flag; a request for help throws HelpRequested carrying the text.
RunConfig parse_args(const std::vector<std::string>& args);

class HelpRequested : public std::exception {
 public:
  explicit HelpRequested(std::string text) : text_(std::move(text)) {}
  const char* what() const noexcept override { return text_.c_str(); }

 private:
  std::string text_;
};

/// Executes a parsed configuration. Library errors propagate.
int run(const RunConfig& config, std::ostream& out);

/// parse_args + run with exit-code mapping: 0 success, 2 usage, 3 data or
/// I/O error, 4 numerical failure.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pucell::cli
