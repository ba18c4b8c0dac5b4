#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "igahd/problem.hpp"
#include "igahd/schedule.hpp"
#include "igahd/types.hpp"

namespace igahd {

enum class Regime { kUnderdamped, kCritical, kOverdamped };

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view text);

/// One eigen-direction of x'' + (alpha/t + beta lambda) x' + lambda (b + gamma/t) x = 0.
struct ModeParams {
  double lambda = 1.0;
  double alpha = 3.0;
  double beta = 0.0;
  double b = 1.0;
  double gamma = 0.0;

  /// Throws std::invalid_argument unless lambda > 0, beta >= 0, b > 0, gamma >= 0.
  void validate() const;

  /// beta^2 lambda^2 - 4 b lambda
  double xi_sq() const;
  /// Critical when |xi_sq| <= 1e-12 * max(beta^2 lambda^2, 4 b lambda).
  Regime regime() const;
  /// lambda (gamma - alpha beta / 2) / xi; empty unless overdamped (xi real, nonzero).
  std::optional<double> kappa() const;
  /// zeta^2 = 4 lambda (gamma - alpha beta / 2); negative means zeta is imaginary.
  double zeta_sq() const;
};

/// |x(t)| ~ t^-power * exp(-decay_rate * t + sqrt_rate * sqrt(t)) for large t.
struct Envelope {
  Regime regime = Regime::kUnderdamped;
  double decay_rate = 0.0;
  double power = 0.0;
  /// Exponent of the slowest exponential, (beta lambda - xi) / 2, when overdamped;
  /// equal to decay_rate otherwise.
  double leading_rate = 0.0;
  /// Critical case with gamma < alpha beta / 2: the Bessel argument is imaginary.
  bool imaginary_zeta = false;
  /// |zeta| when imaginary_zeta (the modified Bessel factor grows like
  /// exp(|zeta| sqrt(t))), zero otherwise.
  double sqrt_rate = 0.0;

  /// t^power * exp(decay_rate * t - sqrt_rate * sqrt(t)): multiplying |x(t)| by
  /// this should give a bounded quantity.
  double normalizer(double t) const;
};

Envelope envelope(const ModeParams& params);

struct Mode {
  std::size_t index = 0;  // position in the ascending eigenvalue order
  double lambda = 0.0;
  Vector vector;
};

struct ModeDecomposition {
  /// Modes with lambda > 1e-12 * lambda_max, ascending.
  std::vector<Mode> modes;
  /// The excluded kernel directions.
  std::vector<Mode> zero_modes;
};

/// Eigen-decomposition of a symmetric positive semidefinite matrix.
/// Throws std::invalid_argument on asymmetry or a clearly negative eigenvalue.
ModeDecomposition mode_decompose(const Matrix& a);

struct ModeTrajectory {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> v;
};

/// Classical RK4 from (x0, v0) at t0, sampled at t0 + i dt up to t_end.
/// Requires t0 > 0, 0 < dt <= min(0.01, 0.1 / sqrt(lambda b)) and t_end >= t0.
ModeTrajectory integrate_mode(const ModeParams& params, double x0, double v0, double t0,
                              double t_end, double dt);

/// Largest dt accepted by integrate_mode.
double max_mode_dt(const ModeParams& params);

/// Decay rate r from log(|x(t)| t^power) ~ c - r t, fitted on the local maxima
/// of |x| (all samples when there are fewer than three maxima). Samples below
/// `floor` and the first `burn_in` fraction of the series are ignored.
/// Returns NaN when fewer than two usable points remain.
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& x,
                      double power, double burn_in = 0.1, double floor = 1e-280);

struct ModeComparison {
  std::size_t index = 0;
  double lambda = 0.0;
  ModeParams params;
  Envelope envelope;
  /// Envelope decay rate of the matched ODE.
  double predicted_rate = 0.0;
  /// Decay rate with beta_k alone, ignoring the scheme's implicit damping.
  double nominal_rate = 0.0;
  double discrete_fitted_rate = 0.0;
  double ode_fitted_rate = 0.0;
  std::size_t discrete_crossings = 0;
  std::size_t ode_crossings = 0;
  /// Projection of x_k - x* on the mode, k = 1..max_iter+1.
  std::vector<double> discrete;
  /// ODE solution sampled at t_k = k sqrt(s).
  std::vector<double> ode;
};

struct ModeReport {
  double step = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  std::vector<ModeComparison> modes;
};

/// Runs exact-gradient I-IGAHD (or FISTA when `hessian_damping` is false) from
/// x0 with a constant step, projects x_k - x* on every mode and integrates the
/// matching ODE (b = 1, gamma = 0, t_k = k sqrt(s), v0 = 0). The inertial
/// gradient step itself contributes sqrt(s) of Hessian damping, so the ODE uses
/// beta = beta_k + sqrt(s) unless `ode_beta` overrides it.
/// Throws std::invalid_argument for non-quadratic problems or varying steps.
ModeReport discrete_vs_mode(const Problem& problem, const ScheduleSet& schedule,
                            std::int64_t max_iter, const Vector& x0,
                            bool hessian_damping = true,
                            std::optional<double> ode_beta = std::nullopt);

/// CSV with columns mode, lambda, regime, predicted_rate, fitted_rate,
/// discrete_fitted_rate, zero_crossings, discrete_zero_crossings
/// (fitted_rate / zero_crossings refer to the ODE solution).
void write_mode_csv(std::ostream& out, const ModeReport& report);

struct ModeCsvRow {
  std::size_t mode = 0;
  double lambda = 0.0;
  Regime regime = Regime::kUnderdamped;
  double predicted_rate = 0.0;
  double fitted_rate = 0.0;
  double discrete_fitted_rate = 0.0;
  std::size_t zero_crossings = 0;
  std::size_t discrete_zero_crossings = 0;

  friend bool operator==(const ModeCsvRow&, const ModeCsvRow&) = default;
};

std::vector<ModeCsvRow> mode_csv_rows(const ModeReport& report);
std::vector<ModeCsvRow> read_mode_csv(std::istream& in);

}  // namespace igahd
