#include "igahd/optim.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace igahd {

RngStreams RngStreams::from_seed(std::uint64_t seed) {
  return {Rng(derive_seed(seed, 10)), Rng(derive_seed(seed, 11)),
          Rng(derive_seed(seed, 12))};
}

OptimizerState initial_state(const Vector& x0, std::uint64_t seed) {
  OptimizerState s;
  s.k = 1;
  s.x_curr = x0;
  s.x_prev = x0;
  s.prev_perturbed_grad = Vector::Zero(x0.size());
  s.prev_error_x = Vector::Zero(x0.size());
  s.rng = RngStreams::from_seed(seed);
  return s;
}

ErrorInjector power_law_errors(const Vector& direction, double scale, double exponent) {
  const double n = direction.norm();
  if (!(n > 0.0)) throw std::invalid_argument("error direction must be nonzero");
  const Vector unit = direction / n;
  auto fn = [unit, scale, exponent](std::int64_t k, const Vector&) -> Vector {
    return (scale * std::pow(static_cast<double>(k), -exponent)) * unit;
  };
  return {fn, fn};
}

namespace {

// Shared by every inertial stepper so that equal inputs give bit-equal y_k.
Vector inertial_point(const OptimizerState& s, double alpha_k, double lead,
                      const Vector& gx, double lag, const Vector& gxm) {
  const double lag_factor = lag * (static_cast<double>(s.k - 1) / static_cast<double>(s.k));
  return s.x_curr + alpha_k * (s.x_curr - s.x_prev) - lead * gx + lag_factor * gxm;
}

StepReport deterministic_step(OptimizerState& state, const Problem& problem,
                              const ScheduleSet& schedule,
                              const ErrorInjector& injector, bool hessian_damping) {
  const std::int64_t k = state.k;
  StepReport r;
  r.k = k;
  r.alpha_k = schedule.alpha_k(k);
  r.step = schedule.step(k);
  r.step_prev = schedule.step(k - 1);
  r.beta = hessian_damping ? schedule.beta(k) : 0.0;
  r.beta_prev = hessian_damping ? schedule.beta(k - 1) : 0.0;
  r.lead_coef = r.beta * std::sqrt(r.step);
  r.lag_coef = r.beta_prev * std::sqrt(r.step_prev);

  r.true_grad_x = problem.gradient(state.x_curr);
  r.grad_x = r.true_grad_x;
  if (injector.x_error) {
    r.error_x = injector.x_error(k, state.x_curr);
    r.grad_x += r.error_x;
  } else {
    r.error_x = Vector::Zero(state.x_curr.size());
  }
  r.grad_xm = state.prev_perturbed_grad;
  r.error_xm = state.prev_error_x;
  r.y = inertial_point(state, r.alpha_k, r.lead_coef, r.grad_x, r.lag_coef, r.grad_xm);

  r.true_grad_y = problem.gradient(r.y);
  r.grad_y = r.true_grad_y;
  if (injector.y_error) {
    r.error_y = injector.y_error(k, r.y);
    r.grad_y += r.error_y;
  } else {
    r.error_y = Vector::Zero(r.y.size());
  }
  Vector next = r.y - r.step * r.grad_y;

  state.prev_perturbed_grad = r.grad_x;
  state.prev_error_x = r.error_x;
  state.x_prev = std::move(state.x_curr);
  state.x_curr = std::move(next);
  ++state.k;
  return r;
}

StepReport stochastic_step(OptimizerState& state, const StochasticOracle& oracle,
                           const ScheduleSet& schedule, bool diagnostics,
                           bool hessian_damping) {
  const std::int64_t k = state.k;
  const auto n = state.x_curr.size();
  StepReport r;
  r.k = k;
  r.alpha_k = schedule.alpha_k(k);
  r.step = schedule.step(k);
  r.step_prev = schedule.step(k - 1);
  r.beta = hessian_damping ? schedule.beta(k) : 0.0;
  r.beta_prev = hessian_damping ? schedule.beta(k - 1) : 0.0;
  r.lead_coef = r.beta * std::sqrt(r.step);
  r.lag_coef = r.beta * std::sqrt(r.step_prev);

  r.grad_x = Vector::Zero(n);
  r.grad_xm = Vector::Zero(n);
  if (hessian_damping) {
    r.batch_x = schedule.batch_x(k);
    r.grad_x = minibatch_gradient(oracle, state.x_curr, r.batch_x, state.rng.x);
    if (k > 1) {
      r.batch_xm = schedule.batch_xm(k);
      r.grad_xm = minibatch_gradient(oracle, state.x_prev, r.batch_xm, state.rng.xm);
    }
  }
  r.y = inertial_point(state, r.alpha_k, r.lead_coef, r.grad_x, r.lag_coef, r.grad_xm);
  r.batch_y = schedule.batch_y(k);
  r.grad_y = minibatch_gradient(oracle, r.y, r.batch_y, state.rng.y);
  Vector next = r.y - r.step * r.grad_y;

  if (diagnostics) {
    r.true_grad_x = oracle.full_gradient(state.x_curr);
    r.true_grad_y = oracle.full_gradient(r.y);
    r.error_x = r.batch_x > 0 ? Vector(r.grad_x - r.true_grad_x) : Vector::Zero(n);
    r.error_xm = r.batch_xm > 0
                     ? Vector(r.grad_xm - oracle.full_gradient(state.x_prev))
                     : Vector::Zero(n);
    r.error_y = r.grad_y - r.true_grad_y;
  }

  state.x_prev = std::move(state.x_curr);
  state.x_curr = std::move(next);
  ++state.k;
  return r;
}

void check_heavy_ball(double damping, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("heavy ball: step must be positive");
  const double friction = damping * std::sqrt(step);
  if (!(damping > 0.0) || !(friction < 1.0)) {
    std::ostringstream msg;
    msg << "heavy ball: momentum coefficient 1 - damping*sqrt(step) = " << 1.0 - friction
        << " is outside [0, 1)";
    throw std::invalid_argument(msg.str());
  }
}

StepReport heavy_ball_update(OptimizerState& state, StepReport r, double damping) {
  const double momentum = 1.0 - damping * std::sqrt(r.step);
  r.alpha_k = momentum;
  r.y = state.x_curr;
  Vector next = state.x_curr + momentum * (state.x_curr - state.x_prev) - r.step * r.grad_y;
  state.x_prev = std::move(state.x_curr);
  state.x_curr = std::move(next);
  ++state.k;
  return r;
}

}  // namespace

StepReport igahd_step(OptimizerState& state, const Problem& problem,
                      const ScheduleSet& schedule, const ErrorInjector& injector) {
  return deterministic_step(state, problem, schedule, injector, true);
}

StepReport sigahd_step(OptimizerState& state, const StochasticOracle& oracle,
                       const ScheduleSet& schedule, bool diagnostics) {
  return stochastic_step(state, oracle, schedule, diagnostics, true);
}

StepReport fista_step(OptimizerState& state, const Problem& problem,
                      const ScheduleSet& schedule, const ErrorInjector& injector) {
  return deterministic_step(state, problem, schedule, injector, false);
}

StepReport fista_step(OptimizerState& state, const StochasticOracle& oracle,
                      const ScheduleSet& schedule, bool diagnostics) {
  return stochastic_step(state, oracle, schedule, diagnostics, false);
}

StepReport hbf_step(OptimizerState& state, const Problem& problem, double damping,
                    double step, const ErrorInjector& injector) {
  check_heavy_ball(damping, step);
  StepReport r;
  r.k = state.k;
  r.step = step;
  r.step_prev = step;
  r.true_grad_y = problem.gradient(state.x_curr);
  r.grad_y = r.true_grad_y;
  if (injector.y_error) {
    r.error_y = injector.y_error(state.k, state.x_curr);
    r.grad_y += r.error_y;
  } else {
    r.error_y = Vector::Zero(state.x_curr.size());
  }
  r.true_grad_x = r.true_grad_y;
  r.grad_x = r.grad_y;
  r.error_x = Vector::Zero(state.x_curr.size());
  r.error_xm = r.error_x;
  return heavy_ball_update(state, std::move(r), damping);
}

StepReport hbf_step(OptimizerState& state, const StochasticOracle& oracle,
                    std::int64_t batch, double damping, double step, bool diagnostics) {
  check_heavy_ball(damping, step);
  StepReport r;
  r.k = state.k;
  r.step = step;
  r.step_prev = step;
  r.batch_y = batch;
  r.grad_y = minibatch_gradient(oracle, state.x_curr, batch, state.rng.y);
  r.grad_x = r.grad_y;
  if (diagnostics) {
    r.true_grad_y = oracle.full_gradient(state.x_curr);
    r.true_grad_x = r.true_grad_y;
    r.error_y = r.grad_y - r.true_grad_y;
    r.error_x = Vector::Zero(state.x_curr.size());
    r.error_xm = r.error_x;
  }
  return heavy_ball_update(state, std::move(r), damping);
}

Stepper make_igahd_stepper(Problem problem, ScheduleSet schedule, ErrorInjector injector) {
  schedule.check_step_bound(problem.lipschitz);
  return [p = std::move(problem), sc = std::move(schedule),
          inj = std::move(injector)](OptimizerState& s) { return igahd_step(s, p, sc, inj); };
}

Stepper make_fista_stepper(Problem problem, ScheduleSet schedule, ErrorInjector injector) {
  schedule.check_step_bound(problem.lipschitz);
  return [p = std::move(problem), sc = std::move(schedule),
          inj = std::move(injector)](OptimizerState& s) { return fista_step(s, p, sc, inj); };
}

Stepper make_sigahd_stepper(std::shared_ptr<const StochasticOracle> oracle,
                            ScheduleSet schedule, bool diagnostics) {
  return [o = std::move(oracle), sc = std::move(schedule), diagnostics](OptimizerState& s) {
    return sigahd_step(s, *o, sc, diagnostics);
  };
}

Stepper make_sfista_stepper(std::shared_ptr<const StochasticOracle> oracle,
                            ScheduleSet schedule, bool diagnostics) {
  return [o = std::move(oracle), sc = std::move(schedule), diagnostics](OptimizerState& s) {
    return fista_step(s, *o, sc, diagnostics);
  };
}

Stepper make_hbf_stepper(Problem problem, ScheduleSet schedule, double damping,
                         ErrorInjector injector) {
  schedule.check_step_bound(problem.lipschitz);
  check_heavy_ball(damping, schedule.step(1));
  return [p = std::move(problem), sc = std::move(schedule), damping,
          inj = std::move(injector)](OptimizerState& s) {
    return hbf_step(s, p, damping, sc.step(s.k), inj);
  };
}

Stepper make_shbf_stepper(std::shared_ptr<const StochasticOracle> oracle,
                          ScheduleSet schedule, double damping, bool diagnostics) {
  check_heavy_ball(damping, schedule.step(1));
  return [o = std::move(oracle), sc = std::move(schedule), damping,
          diagnostics](OptimizerState& s) {
    return hbf_step(s, *o, sc.batch_y(s.k), damping, sc.step(s.k), diagnostics);
  };
}

Trajectory run(const Stepper& stepper, const Vector& x0, std::int64_t max_iter,
               const Recorder& recorder, const RunOptions& options) {
  if (max_iter < 1) throw std::invalid_argument("run: max_iter must be >= 1");
  Trajectory traj;
  if (options.keep_iterates) {
    traj.iterates.reserve(static_cast<std::size_t>(max_iter) + 1);
    traj.iterates.push_back(x0);
  }
  OptimizerState state = initial_state(x0, options.seed);
  double last_step = 0.0;
  for (std::int64_t it = 0; it < max_iter; ++it) {
    if (options.stop && options.stop->load(std::memory_order_relaxed)) {
      traj.status = RunStatus::kInterrupted;
      traj.message = "interrupted at k = " + std::to_string(state.k);
      return traj;
    }
    OptimizerState before = state;
    StepReport report = stepper(state);
    if (it > 0 && report.step > last_step) {
      std::ostringstream msg;
      msg << "step rule increased at k = " << report.k << " (" << last_step << " -> "
          << report.step << ")";
      throw std::logic_error(msg.str());
    }
    last_step = report.step;
    // An overflowed gradient poisons every later step even while x stays finite.
    if (!state.x_curr.allFinite() || !report.y.allFinite() || !report.grad_y.allFinite()) {
      traj.status = RunStatus::kDiverged;
      traj.diverged_at = report.k;
      traj.message = "non-finite iterate or gradient at k = " + std::to_string(report.k);
      return traj;
    }
    if (recorder) recorder(before, state, report);
    if (options.keep_iterates) traj.iterates.push_back(state.x_curr);
  }
  return traj;
}

}  // namespace igahd
