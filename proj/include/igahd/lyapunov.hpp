#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "igahd/optim.hpp"
#include "igahd/problem.hpp"
#include "igahd/record.hpp"
#include "igahd/schedule.hpp"

namespace igahd {

/// Energy quantities at iterate index k.
///
///   v_k   = (x_{k-1} - x*) + t_k (x_k - x_{k-1} + beta_{k-1} sqrt(s_{k-1}) grad f(x_{k-1}))
///   Ê_k   = s_k t_k^2 (f(x_k) - f*) + 1/2 ||v_k||^2
///   V_k   = s_k t_k^2 (f(x_k) - f*) + 1/2 dist(z_k, S)^2,  z_k = v_k + x*
///
/// `m` is the perturbation term M_{k-1} of the step that produced x_k:
///   M_j = beta_j sqrt(s_j) t_{j+1} M^x_j - beta_{j-1} sqrt(s_{j-1}) t_j M^x_{j-1}
///         + s_j t_{j+1} M^y_j.
struct EnergySnapshot {
  std::int64_t k = 0;
  double value_gap = 0.0;
  double e_hat = 0.0;
  Vector v;
  double v_norm = 0.0;
  Vector m;
  double v_stoch = 0.0;
};

/// Snapshot from raw iterates x_k, x_{k-1}, the coefficient beta_{k-1} sqrt(s_{k-1})
/// and grad f(x_{k-1}); `m` is left at zero.
EnergySnapshot snapshot_from_iterates(std::int64_t k, const Vector& x_k, const Vector& x_km1,
                                     double lead_coef, const Vector& grad_km1,
                                     const ScheduleSet& schedule, const Problem& problem,
                                     const Vector& x_star);

/// Snapshot of the starting state (k = 1, t_1 = 0, v_1 = x_0 - x*).
EnergySnapshot initial_snapshot(const OptimizerState& state, const ScheduleSet& schedule,
                                const Problem& problem, const Vector& x_star);

/// Snapshot of `after` (index after.k) from the step that led to it.
/// Throws std::logic_error when the problem has no known f*.
EnergySnapshot energy_snapshot(const OptimizerState& before, const OptimizerState& after,
                               const StepReport& report, const ScheduleSet& schedule,
                               const Problem& problem, const Vector& x_star);

struct CheckResult {
  std::int64_t k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
  /// eps_k = 0 (no Hessian damping): the bound divides by eps_k, so it is not evaluated.
  bool skipped = false;
};

/// Per-step descent inequality with eps_k = beta_k (2 sqrt(s_k) - beta_k):
///   Ê_{k+1} - Ê_k + <v_{k+1}, M_k>
///     <= s_k (t_{k+1}^2 - t_{k+1} - t_k^2)(f(x_k) - f*)
///        - eps_k/4 s_k t_{k+1}^2 ||grad f(y_k)||^2 + s_k^2/2 t_{k+1}^2 ||M^y_k||^2
///        + beta_k^2 s_k t_{k+1}^2 (2 s_k/eps_k + 1) ||M^x_k||^2
///        + beta_{k-1}^2 s_{k-1} t_k^2 (2 s_k/eps_k + 1) ||M^x_{k-1}||^2
/// satisfied iff lhs <= rhs + 1e-9 (1 + |rhs|).
CheckResult check_lemma1(const EnergySnapshot& prev, const EnergySnapshot& next,
                         const StepReport& report, const ScheduleSet& schedule);

struct PartialSums {
  std::vector<double> sums;
  /// Increment over the last decade k in (K/10, K] divided by the total.
  double tail_ratio = 0.0;
};

/// Running sums of `terms`, where terms[i] belongs to index ks[i] (increasing).
PartialSums partial_sums(std::span<const std::int64_t> ks, std::span<const double> terms);

enum class SummableSeries { kGradYSq, kGradXSq, kValueGap, kVelocitySq };

/// Partial sums of s_k k^2 ||grad f(y_k)||^2, k^2 ||grad f(x_k)||^2,
/// s_k k (f(x_k) - f*) or k ||x_k - x_{k-1}||^2 over consecutive records.
/// Rows with non-finite entries are skipped; gaps in k are rejected.
PartialSums summability_monitor(std::span<const TrajectoryRecord> records,
                                SummableSeries which);

struct NoiseStats {
  std::vector<std::int64_t> k;
  std::vector<double> sigma_x_sq;
  std::vector<double> sigma_xm_sq;
  std::vector<double> sigma_y_sq;
  /// e_k = 4 beta_k^2 s_k sigma_x^2 + beta_{k-1}^2 s_{k-1} sigma_x-^2 + 4 s_k^2 sigma_y^2
  std::vector<double> e_k;
};

/// Squared noise realisations per step (unbiased single-draw proxies of the
/// conditional variances), optionally smoothed by a trailing window.
/// Throws std::invalid_argument when a report carries no noise channel.
NoiseStats noise_stats(std::span<const StepReport> reports, std::size_t window = 1);

}  // namespace igahd
