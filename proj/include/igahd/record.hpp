#pragma once

#include <cstdint>
#include <string>

namespace igahd {

/// One row of a trajectory file. Row k describes the iterate x_k and the step
/// taken from it (y_k, batch sizes, noise of step k); on the last row the step
/// columns are NaN.
struct TrajectoryRecord {
  std::int64_t k = 0;
  double objective_gap = 0.0;
  double grad_norm_x = 0.0;
  double grad_norm_y = 0.0;
  /// k * ||x_k - x_{k-1}||
  double velocity = 0.0;
  double step_size = 0.0;
  std::int64_t batch_x = 0;
  std::int64_t batch_xm = 0;
  std::int64_t batch_y = 0;
  double lyapunov = 0.0;
  double sigma_x = 0.0;
  double sigma_xm = 0.0;
  double sigma_y = 0.0;
  std::string status = "ok";

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

}  // namespace igahd
