#include "igahd/modes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "igahd/optim.hpp"
#include "igahd/series.hpp"

namespace igahd {

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kUnderdamped: return "underdamped";
    case Regime::kCritical: return "critical";
    case Regime::kOverdamped: return "overdamped";
  }
  return "unknown";
}

Regime parse_regime(std::string_view text) {
  if (text == "underdamped") return Regime::kUnderdamped;
  if (text == "critical") return Regime::kCritical;
  if (text == "overdamped") return Regime::kOverdamped;
  throw std::invalid_argument("unknown regime '" + std::string(text) + "'");
}

void ModeParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("mode: lambda must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("mode: beta must be nonnegative");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("mode: b must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("mode: gamma must be nonnegative");
  if (!std::isfinite(alpha)) throw std::invalid_argument("mode: alpha must be finite");
}

double ModeParams::xi_sq() const { return beta * beta * lambda * lambda - 4.0 * b * lambda; }

Regime ModeParams::regime() const {
  const double damping = beta * beta * lambda * lambda;
  const double spring = 4.0 * b * lambda;
  const double diff = damping - spring;
  if (std::abs(diff) <= 1e-12 * std::max(damping, spring)) return Regime::kCritical;
  return diff > 0.0 ? Regime::kOverdamped : Regime::kUnderdamped;
}

std::optional<double> ModeParams::kappa() const {
  if (regime() != Regime::kOverdamped) return std::nullopt;
  return lambda * (gamma - alpha * beta / 2.0) / std::sqrt(xi_sq());
}

double ModeParams::zeta_sq() const { return 4.0 * lambda * (gamma - alpha * beta / 2.0); }

double Envelope::normalizer(double t) const {
  return std::pow(t, power) * std::exp(decay_rate * t - sqrt_rate * std::sqrt(t));
}

Envelope envelope(const ModeParams& params) {
  params.validate();
  Envelope env;
  env.regime = params.regime();
  const double bl = params.beta * params.lambda;
  switch (env.regime) {
    case Regime::kUnderdamped:
      env.decay_rate = bl / 2.0;
      env.power = params.alpha / 2.0;
      env.leading_rate = env.decay_rate;
      break;
    case Regime::kCritical:
      env.decay_rate = bl / 2.0;
      env.power = (2.0 * params.alpha - 1.0) / 4.0;
      env.leading_rate = env.decay_rate;
      env.imaginary_zeta = params.zeta_sq() < 0.0;
      if (env.imaginary_zeta) env.sqrt_rate = std::sqrt(-params.zeta_sq());
      break;
    case Regime::kOverdamped:
      // beta > 0 is implied: beta = 0 gives xi^2 = -4 b lambda < 0.
      env.decay_rate = 2.0 * params.b / params.beta;
      env.power = params.alpha / 2.0 - std::abs(*params.kappa());
      env.leading_rate = (bl - std::sqrt(params.xi_sq())) / 2.0;
      break;
  }
  return env;
}

ModeDecomposition mode_decompose(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument("mode_decompose: matrix must be square and nonempty");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("mode_decompose: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.transpose()));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("mode_decompose: eigen-decomposition failed");
  const Vector& evals = solver.eigenvalues();  // ascending
  const double lmax = std::max(std::abs(evals.minCoeff()), std::abs(evals.maxCoeff()));
  const double tol = 1e-12 * lmax;
  ModeDecomposition out;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    Mode m{static_cast<std::size_t>(i), evals(i), solver.eigenvectors().col(i)};
    if (std::abs(evals(i)) <= tol) {
      m.lambda = 0.0;
      out.zero_modes.push_back(std::move(m));
    } else if (evals(i) < 0.0) {
      throw std::invalid_argument("mode_decompose: matrix has a negative eigenvalue");
    } else {
      out.modes.push_back(std::move(m));
    }
  }
  return out;
}

double max_mode_dt(const ModeParams& params) {
  return std::min(0.01, 0.1 / std::sqrt(params.lambda * params.b));
}

ModeTrajectory integrate_mode(const ModeParams& params, double x0, double v0, double t0,
                              double t_end, double dt) {
  params.validate();
  if (!(t0 > 0.0)) throw std::invalid_argument("integrate_mode: t0 must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_mode: dt must be positive");
  if (dt > max_mode_dt(params) * (1.0 + 1e-12))
    throw std::invalid_argument("integrate_mode: dt exceeds min(0.01, 0.1/sqrt(lambda b))");
  if (!(t_end >= t0)) throw std::invalid_argument("integrate_mode: t_end must be >= t0");

  const double lam = params.lambda;
  const auto accel = [&](double t, double x, double v) {
    return -(params.alpha / t + params.beta * lam) * v - lam * (params.b + params.gamma / t) * x;
  };
  const auto steps = static_cast<std::size_t>(std::floor((t_end - t0) / dt + 1e-9));
  ModeTrajectory traj;
  traj.t.reserve(steps + 1);
  traj.x.reserve(steps + 1);
  traj.v.reserve(steps + 1);
  double x = x0, v = v0;
  traj.t.push_back(t0);
  traj.x.push_back(x);
  traj.v.push_back(v);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    const double h = dt, hh = 0.5 * dt;
    const double k1x = v, k1v = accel(t, x, v);
    const double k2x = v + hh * k1v, k2v = accel(t + hh, x + hh * k1x, v + hh * k1v);
    const double k3x = v + hh * k2v, k3v = accel(t + hh, x + hh * k2x, v + hh * k2v);
    const double k4x = v + h * k3v, k4v = accel(t + h, x + h * k3x, v + h * k3v);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    traj.t.push_back(t0 + static_cast<double>(i + 1) * dt);
    traj.x.push_back(x);
    traj.v.push_back(v);
  }
  return traj;
}

double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& x,
                      double power, double burn_in, double floor) {
  if (t.size() != x.size()) throw std::invalid_argument("fit_decay_rate: size mismatch");
  const std::size_t n = t.size();
  const auto start = static_cast<std::size_t>(std::ceil(burn_in * static_cast<double>(n)));
  std::vector<std::size_t> idx;
  for (std::size_t i = std::max<std::size_t>(start, 1); i + 1 < n; ++i) {
    const double a = std::abs(x[i]);
    if (a >= floor && a >= std::abs(x[i - 1]) && a > std::abs(x[i + 1])) idx.push_back(i);
  }
  if (idx.size() < 3) {
    idx.clear();
    for (std::size_t i = start; i < n; ++i)
      if (std::abs(x[i]) >= floor) idx.push_back(i);
  }
  if (idx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> tt, ly;
  for (std::size_t i : idx) {
    tt.push_back(t[i]);
    ly.push_back(std::log(std::abs(x[i])) + power * std::log(t[i]));
  }
  if (tt.front() == tt.back()) return std::numeric_limits<double>::quiet_NaN();
  return -linear_fit(tt, ly).slope;
}

ModeReport discrete_vs_mode(const Problem& problem, const ScheduleSet& schedule,
                            std::int64_t max_iter, const Vector& x0, bool hessian_damping,
                            std::optional<double> ode_beta) {
  if (!problem.quadratic || !problem.minimizer)
    throw std::invalid_argument("discrete_vs_mode: requires a quadratic problem with a minimizer");
  if (max_iter < 1) throw std::invalid_argument("discrete_vs_mode: max_iter must be >= 1");
  if (x0.size() != problem.dim) throw std::invalid_argument("discrete_vs_mode: x0 dimension");
  const double s = schedule.step(1);
  if (schedule.step(max_iter) != s)
    throw std::invalid_argument("discrete_vs_mode: requires a constant step size");

  ModeReport report;
  report.step = s;
  report.beta = hessian_damping ? schedule.beta(1) : 0.0;
  report.alpha = schedule.alpha();

  const Stepper stepper = hessian_damping ? make_igahd_stepper(problem, schedule)
                                          : make_fista_stepper(problem, schedule);
  const Trajectory traj = run(stepper, x0, max_iter);
  const Vector& x_star = *problem.minimizer;
  const ModeDecomposition dec = mode_decompose(problem.quadratic->a);
  const double root_s = std::sqrt(s);

  for (const Mode& mode : dec.modes) {
    ModeComparison cmp;
    cmp.index = mode.index;
    cmp.lambda = mode.lambda;
    cmp.params = ModeParams{mode.lambda, schedule.alpha(),
                            ode_beta.value_or(report.beta + root_s), 1.0, 0.0};
    cmp.envelope = envelope(cmp.params);
    cmp.predicted_rate = cmp.envelope.decay_rate;
    cmp.nominal_rate =
        envelope(ModeParams{mode.lambda, schedule.alpha(), report.beta, 1.0, 0.0}).decay_rate;

    std::vector<double> tk;
    tk.reserve(traj.iterates.size());
    for (std::size_t j = 0; j < traj.iterates.size(); ++j) {
      cmp.discrete.push_back(mode.vector.dot(traj.iterates[j] - x_star));
      tk.push_back(static_cast<double>(j + 1) * root_s);
    }

    // Integrate on a grid that lands exactly on every t_k.
    const auto sub = static_cast<std::int64_t>(std::ceil(root_s / max_mode_dt(cmp.params)));
    const double dt = root_s / static_cast<double>(sub);
    const ModeTrajectory ode =
        integrate_mode(cmp.params, cmp.discrete.front(), 0.0, root_s, tk.back(), dt);
    for (std::size_t j = 0; j < tk.size(); ++j) {
      const std::size_t at = std::min(j * static_cast<std::size_t>(sub), ode.x.size() - 1);
      cmp.ode.push_back(ode.x[at]);
    }
    cmp.discrete_crossings = zero_crossings(cmp.discrete);
    cmp.ode_crossings = zero_crossings(cmp.ode);
    cmp.discrete_fitted_rate = fit_decay_rate(tk, cmp.discrete, cmp.envelope.power);
    cmp.ode_fitted_rate = fit_decay_rate(tk, cmp.ode, cmp.envelope.power);
    report.modes.push_back(std::move(cmp));
  }
  return report;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& field) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size())
    throw std::invalid_argument("mode csv: bad number '" + field + "'");
  return v;
}

std::size_t parse_count(const std::string& field) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(field, &used);
  if (used != field.size()) throw std::invalid_argument("mode csv: bad count '" + field + "'");
  return static_cast<std::size_t>(v);
}

constexpr const char* kModeHeader =
    "mode,lambda,regime,predicted_rate,fitted_rate,discrete_fitted_rate,zero_crossings,"
    "discrete_zero_crossings";

}  // namespace

std::vector<ModeCsvRow> mode_csv_rows(const ModeReport& report) {
  std::vector<ModeCsvRow> rows;
  for (const ModeComparison& m : report.modes) {
    rows.push_back({m.index, m.lambda, m.envelope.regime, m.predicted_rate, m.ode_fitted_rate,
                    m.discrete_fitted_rate, m.ode_crossings, m.discrete_crossings});
  }
  return rows;
}

void write_mode_csv(std::ostream& out, const ModeReport& report) {
  out << kModeHeader << '\n';
  for (const ModeCsvRow& r : mode_csv_rows(report)) {
    out << r.mode << ',' << format_double(r.lambda) << ',' << to_string(r.regime) << ','
        << format_double(r.predicted_rate) << ',' << format_double(r.fitted_rate) << ','
        << format_double(r.discrete_fitted_rate) << ',' << r.zero_crossings << ','
        << r.discrete_zero_crossings << '\n';
  }
}

std::vector<ModeCsvRow> read_mode_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kModeHeader)
    throw std::invalid_argument("mode csv: missing or unexpected header");
  std::vector<ModeCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw std::invalid_argument("mode csv: expected 8 fields: " + line);
    rows.push_back({parse_count(f[0]), parse_double(f[1]), parse_regime(f[2]),
                    parse_double(f[3]), parse_double(f[4]), parse_double(f[5]),
                    parse_count(f[6]), parse_count(f[7])});
  }
  return rows;
}

}  // namespace igahd
