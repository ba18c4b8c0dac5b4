#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "igahd/oracle.hpp"
#include "igahd/problem.hpp"
#include "igahd/random.hpp"
#include "igahd/schedule.hpp"
#include "igahd/types.hpp"

namespace igahd {

/// One independent stream per gradient channel, so algorithms that skip a
/// channel still see the same draws on the others (paired comparisons).
struct RngStreams {
  Rng x;
  Rng xm;
  Rng y;

  static RngStreams from_seed(std::uint64_t seed);
  friend bool operator==(const RngStreams&, const RngStreams&) = default;
};

struct OptimizerState {
  std::int64_t k = 1;
  Vector x_curr;
  Vector x_prev;
  /// grad f(x_{k-1}) + M^x_{k-1}, reused by the deterministic algorithm.
  Vector prev_perturbed_grad;
  /// M^x_{k-1}, kept for diagnostics.
  Vector prev_error_x;
  RngStreams rng;
};

/// x_1 = x_0 = x0 at k = 1.
OptimizerState initial_state(const Vector& x0, std::uint64_t seed = 0);

/// Deterministic gradient perturbations M^x_k and M^y_k. Unset members mean
/// "no error".
struct ErrorInjector {
  std::function<Vector(std::int64_t, const Vector&)> x_error;
  std::function<Vector(std::int64_t, const Vector&)> y_error;
};

/// ||M^x_k|| = ||M^y_k|| = scale * k^-exponent along a fixed unit direction.
ErrorInjector power_law_errors(const Vector& direction, double scale, double exponent);

/// Everything a step computed, for diagnostics and Lyapunov checks.
struct StepReport {
  std::int64_t k = 0;
  double alpha_k = 0.0;
  double step = 0.0;       // s_k
  double step_prev = 0.0;  // s_{k-1}
  double beta = 0.0;       // beta_k
  double beta_prev = 0.0;  // beta_{k-1}
  /// Coefficient of the gradient at x_k in y_k (beta_k sqrt(s_k)).
  double lead_coef = 0.0;
  /// Coefficient of (1 - 1/k) * grad_xm in y_k.
  double lag_coef = 0.0;
  Vector y;
  Vector grad_x;   // perturbed or sampled gradient at x_k
  Vector grad_xm;  // at x_{k-1}
  Vector grad_y;   // at y_k
  Vector error_x;  // M^x_k
  Vector error_xm; // M^x_{k-1} (deterministic) or M^{x-}_k (stochastic)
  Vector error_y;  // M^y_k
  Vector true_grad_x;
  Vector true_grad_y;
  std::int64_t batch_x = 0;
  std::int64_t batch_xm = 0;
  std::int64_t batch_y = 0;

  bool has_errors() const { return error_y.size() > 0; }
};

/// One iteration of the inexact algorithm:
///   y_k = x_k + alpha_k (x_k - x_{k-1}) - beta_k sqrt(s_k) (grad f(x_k) + M^x_k)
///         + beta_{k-1} sqrt(s_{k-1}) (1 - 1/k) (grad f(x_{k-1}) + M^x_{k-1})
///   x_{k+1} = y_k - s_k (grad f(y_k) + M^y_k)
StepReport igahd_step(OptimizerState& state, const Problem& problem,
                      const ScheduleSet& schedule, const ErrorInjector& injector = {});

/// One iteration of the minibatch algorithm. G^x_k is sampled at x_k and
/// G^{x-}_k at x_{k-1}, both fresh each iteration; the lagged term uses
/// beta_k sqrt(s_{k-1}). With `diagnostics`, the true gradients and the noise
/// realisations are stored in the report.
StepReport sigahd_step(OptimizerState& state, const StochasticOracle& oracle,
                       const ScheduleSet& schedule, bool diagnostics = true);

/// Same updates with beta_k forced to 0 (Nesterov / FISTA).
StepReport fista_step(OptimizerState& state, const Problem& problem,
                      const ScheduleSet& schedule, const ErrorInjector& injector = {});
StepReport fista_step(OptimizerState& state, const StochasticOracle& oracle,
                      const ScheduleSet& schedule, bool diagnostics = true);

/// Heavy ball with constant friction, explicit Euler of x'' + a x' + grad f = 0
/// at time step sqrt(step):
///   x_{k+1} = x_k + (1 - a sqrt(step)) (x_k - x_{k-1}) - step * G_k.
/// Requires a > 0 and a sqrt(step) < 1.
StepReport hbf_step(OptimizerState& state, const Problem& problem, double damping,
                    double step, const ErrorInjector& injector = {});
StepReport hbf_step(OptimizerState& state, const StochasticOracle& oracle,
                    std::int64_t batch, double damping, double step,
                    bool diagnostics = true);

using Stepper = std::function<StepReport(OptimizerState&)>;

Stepper make_igahd_stepper(Problem problem, ScheduleSet schedule, ErrorInjector injector = {});
Stepper make_fista_stepper(Problem problem, ScheduleSet schedule, ErrorInjector injector = {});
Stepper make_sigahd_stepper(std::shared_ptr<const StochasticOracle> oracle,
                            ScheduleSet schedule, bool diagnostics = true);
Stepper make_sfista_stepper(std::shared_ptr<const StochasticOracle> oracle,
                            ScheduleSet schedule, bool diagnostics = true);
/// Step sizes come from `schedule.step(k)` and the batch from `schedule.batch_y(k)`.
Stepper make_hbf_stepper(Problem problem, ScheduleSet schedule, double damping,
                         ErrorInjector injector = {});
Stepper make_shbf_stepper(std::shared_ptr<const StochasticOracle> oracle,
                          ScheduleSet schedule, double damping, bool diagnostics = true);

enum class RunStatus { kCompleted, kDiverged, kInterrupted };

struct Trajectory {
  /// x_1, x_2, ..., one entry per completed iterate.
  std::vector<Vector> iterates;
  RunStatus status = RunStatus::kCompleted;
  /// Iteration whose step produced a non-finite value (0 if none).
  std::int64_t diverged_at = 0;
  std::string message;
};

/// Called after every successful step with the states before and after it.
using Recorder = std::function<void(const OptimizerState& before,
                                    const OptimizerState& after,
                                    const StepReport& report)>;

struct RunOptions {
  std::uint64_t seed = 0;
  bool keep_iterates = true;
  const std::atomic<bool>* stop = nullptr;
};

/// Iterates `stepper` max_iter times from x_1 = x_0 = x0. Stops early, with a
/// valid partial trajectory, on a non-finite iterate or when `stop` is set.
/// Throws std::logic_error if the step size ever increases.
Trajectory run(const Stepper& stepper, const Vector& x0, std::int64_t max_iter,
               const Recorder& recorder = {}, const RunOptions& options = {});

}  // namespace igahd
