#pragma once

#include <functional>
#include <optional>
#include <string>

#include "igahd/types.hpp"

namespace igahd {

/// Coefficients of f(x) = 1/2 <Ax, x> - <b, x>.
struct QuadraticForm {
  Matrix a;
  Vector b;
};

/// A smooth convex objective with an L-Lipschitz gradient.
///
/// `min_value` and `minimizer` are filled when known in closed form or from a
/// reference solve; diagnostics that need them throw when they are absent.
struct Problem {
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz = 0.0;
  std::optional<double> min_value;
  std::optional<Vector> minimizer;
  std::optional<QuadraticForm> quadratic;
  /// Closed-form f(x) - f*, when available. Avoids the cancellation in
  /// value(x) - min_value once the gap drops below rounding of f*.
  std::function<double(const Vector&)> excess;
  std::string name;

  /// f(x) - f*; throws std::logic_error when f* is unknown.
  double gap(const Vector& x) const;
};

/// Builds f(x) = 1/2 <Ax, x> - <b, x> for symmetric positive semidefinite A.
/// L is the largest eigenvalue; the minimizer is filled when A is definite.
Problem make_quadratic(const Matrix& a, const Vector& b);

/// Condition number lambda_max / lambda_min of a symmetric matrix.
double condition_number(const Matrix& symmetric);

}  // namespace igahd
