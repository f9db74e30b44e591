#include "pucell/kernels.hpp"

#include <cmath>

#include "pucell/errors.hpp"

namespace pucell {

void validate(const KernelSpec& spec) {
  if (!(std::isfinite(spec.shape) && spec.shape > 0.0)) {
    throw InvalidArgument("kernel shape parameter must be positive, got " +
                          std::to_string(spec.shape));
  }
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian:
      return "gaussian";
    case KernelFamily::WendlandC2:
      return "wendland";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "wendland") return KernelFamily::WendlandC2;
  throw InvalidArgument("unknown kernel family '" + name + "'");
}

double kernel_value(const KernelSpec& spec, double r) {
  validate(spec);
  if (!(r >= 0.0)) {
    throw InvalidArgument("kernel radius must be nonnegative");
  }
  return kernel_value_unchecked(spec, r);
}

Eigen::MatrixXd kernel_matrix(std::span<const Point2> points, const KernelSpec& spec) {
  validate(spec);
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double r = distance(points[i], points[j]);
      if (r == 0.0) {
        throw DuplicatePoints("points " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide; interpolation matrix would be singular");
      }
      const double v = kernel_value_unchecked(spec, r);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

}  // namespace pucell
