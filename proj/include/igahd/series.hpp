#pragma once

#include <cstddef>
#include <span>

namespace igahd {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x. Needs two distinct x values.
/// r2 is 1 for constant y.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Sign changes in `values`, skipping samples with |v| < floor.
std::size_t zero_crossings(std::span<const double> values, double floor = 1e-14);

}  // namespace igahd
