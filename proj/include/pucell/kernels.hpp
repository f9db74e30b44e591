#pragma once

#include <cmath>
#include <span>
#include <string>

#include <Eigen/Core>

#include "pucell/point.hpp"

namespace pucell {

enum class KernelFamily { Gaussian, WendlandC2 };

/// Radial kernel plus its shape parameter.
///
/// For the Gaussian, `shape` holds alpha squared: phi(r) = exp(-shape * r^2).
/// For Wendland C2, `shape` is c: phi(r) = (1 - c r)_+^4 (4 c r + 1).
struct KernelSpec {
  KernelFamily family = KernelFamily::WendlandC2;
  double shape = 1.0;

  static KernelSpec gaussian(double alpha_squared) {
    return {KernelFamily::Gaussian, alpha_squared};
  }
  static KernelSpec wendland(double c) { return {KernelFamily::WendlandC2, c}; }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

// Throws InvalidArgument unless shape is finite and positive.
void validate(const KernelSpec& spec);

std::string to_string(KernelFamily family);
// Accepts "gaussian" or "wendland"; throws InvalidArgument otherwise.
KernelFamily parse_kernel_family(const std::string& name);

/// phi(r). Wendland returns exactly zero for r >= 1/c. Negative or NaN r
/// throws InvalidArgument.
double kernel_value(const KernelSpec& spec, double r);

// Unchecked variant used in hot loops; r must already be nonnegative.
inline double kernel_value_unchecked(const KernelSpec& spec, double r) {
  if (spec.family == KernelFamily::Gaussian) {
    return std::exp(-spec.shape * r * r);
  }
  const double t = spec.shape * r;
  // c * r can round just below 1 when r == 1/c; the support edge is closed.
  if (t >= 1.0 || r >= 1.0 / spec.shape) return 0.0;
  const double u = 1.0 - t;
  const double u2 = u * u;
  return u2 * u2 * (4.0 * t + 1.0);
}

/// Dense interpolation matrix a_ij = phi(|x_i - x_j|). Throws DuplicatePoints
/// when two points coincide.
Eigen::MatrixXd kernel_matrix(std::span<const Point2> points, const KernelSpec& spec);

}  // namespace pucell
