#include "igahd/lyapunov.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace igahd {

EnergySnapshot snapshot_from_iterates(std::int64_t k, const Vector& x_k, const Vector& x_km1,
                                     double lead_coef, const Vector& grad_km1,
                                     const ScheduleSet& schedule, const Problem& problem,
                                     const Vector& x_star) {
  EnergySnapshot snap;
  snap.k = k;
  snap.value_gap = problem.gap(x_k);
  const double tk = schedule.t(k);
  const double weight = schedule.step(k) * tk * tk * snap.value_gap;
  const Vector z = x_km1 + tk * (x_k - x_km1 + lead_coef * grad_km1);
  snap.v = z - x_star;
  snap.v_norm = snap.v.norm();
  snap.e_hat = weight + 0.5 * snap.v.squaredNorm();
  // The minimizer is unique for every problem that carries one, so
  // dist(z_k, S) = ||z_k - x*||.
  snap.v_stoch = weight + 0.5 * (z - x_star).squaredNorm();
  snap.m = Vector::Zero(x_k.size());
  return snap;
}

EnergySnapshot initial_snapshot(const OptimizerState& state, const ScheduleSet& schedule,
                                const Problem& problem, const Vector& x_star) {
  EnergySnapshot snap = snapshot_from_iterates(state.k, state.x_curr, state.x_prev, 0.0,
                                      Vector::Zero(state.x_curr.size()), schedule,
                                      problem, x_star);
  snap.m = Vector::Zero(state.x_curr.size());
  return snap;
}

EnergySnapshot energy_snapshot(const OptimizerState& before, const OptimizerState& after,
                               const StepReport& report, const ScheduleSet& schedule,
                               const Problem& problem, const Vector& x_star) {
  const Vector grad_prev = report.true_grad_x.size() > 0
                               ? report.true_grad_x
                               : problem.gradient(before.x_curr);
  EnergySnapshot snap = snapshot_from_iterates(after.k, after.x_curr, after.x_prev,
                                      report.lead_coef, grad_prev, schedule, problem,
                                      x_star);
  const std::int64_t k = report.k;
  const auto n = after.x_curr.size();
  if (report.has_errors()) {
    const double t_next = schedule.t(k + 1);
    const double t_k = schedule.t(k);
    const double lag = report.beta_prev * std::sqrt(report.step_prev);
    snap.m = report.lead_coef * t_next * report.error_x -
             lag * t_k * report.error_xm + report.step * t_next * report.error_y;
  } else {
    snap.m = Vector::Zero(n);
  }
  return snap;
}

CheckResult check_lemma1(const EnergySnapshot& prev, const EnergySnapshot& next,
                         const StepReport& report, const ScheduleSet& schedule) {
  CheckResult res;
  res.k = report.k;
  const std::int64_t k = report.k;
  const double s = report.step;
  const double beta = report.beta;
  const double eps = beta * (2.0 * std::sqrt(s) - beta);
  if (!(eps > 0.0)) {
    res.skipped = true;
    return res;
  }
  if (report.true_grad_y.size() == 0) {
    throw std::invalid_argument("check_lemma1: report lacks the true gradient at y_k");
  }
  const double t_next = schedule.t(k + 1);
  const double t_k = schedule.t(k);
  const double t_next2 = t_next * t_next;
  const double amplify = 2.0 * s / eps + 1.0;

  res.lhs = next.e_hat - prev.e_hat + next.v.dot(next.m);

  double rhs = s * (t_next2 - t_next - t_k * t_k) * prev.value_gap;
  rhs -= 0.25 * eps * s * t_next2 * report.true_grad_y.squaredNorm();
  if (report.has_errors()) {
    rhs += 0.5 * s * s * t_next2 * report.error_y.squaredNorm();
    rhs += beta * beta * s * t_next2 * amplify * report.error_x.squaredNorm();
    rhs += report.beta_prev * report.beta_prev * report.step_prev * t_k * t_k * amplify *
           report.error_xm.squaredNorm();
  }
  res.rhs = rhs;
  res.satisfied = res.lhs <= rhs + 1e-9 * (1.0 + std::abs(rhs));
  return res;
}

PartialSums partial_sums(std::span<const std::int64_t> ks, std::span<const double> terms) {
  if (ks.size() != terms.size()) {
    throw std::invalid_argument("partial_sums: index and term lengths differ");
  }
  PartialSums out;
  out.sums.reserve(terms.size());
  double total = 0.0;
  for (double t : terms) {
    total += t;
    out.sums.push_back(total);
  }
  if (terms.empty() || total == 0.0) return out;
  const double k_last = static_cast<double>(ks.back());
  double tail = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (static_cast<double>(ks[i]) > k_last / 10.0) tail += terms[i];
  }
  out.tail_ratio = tail / total;
  return out;
}

PartialSums summability_monitor(std::span<const TrajectoryRecord> records,
                                SummableSeries which) {
  std::vector<std::int64_t> ks;
  std::vector<double> terms;
  ks.reserve(records.size());
  terms.reserve(records.size());
  for (const auto& r : records) {
    const double k = static_cast<double>(r.k);
    double term = 0.0;
    switch (which) {
      case SummableSeries::kGradYSq:
        term = r.step_size * k * k * r.grad_norm_y * r.grad_norm_y;
        break;
      case SummableSeries::kGradXSq:
        term = k * k * r.grad_norm_x * r.grad_norm_x;
        break;
      case SummableSeries::kValueGap:
        term = r.step_size * k * r.objective_gap;
        break;
      case SummableSeries::kVelocitySq:
        term = r.velocity * r.velocity / k;
        break;
    }
    if (!std::isfinite(term)) continue;
    if (!ks.empty() && r.k != ks.back() + 1) {
      throw std::invalid_argument("summability_monitor: records are not consecutive (k = " +
                                  std::to_string(ks.back()) + " then " +
                                  std::to_string(r.k) + "); record every iteration");
    }
    ks.push_back(r.k);
    terms.push_back(term);
  }
  return partial_sums(ks, terms);
}

namespace {

std::vector<double> trailing_mean(const std::vector<double>& v, std::size_t window) {
  if (window <= 1) return v;
  std::vector<double> out(v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += v[i];
    if (i >= window) acc -= v[i - window];
    out[i] = acc / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

}  // namespace

NoiseStats noise_stats(std::span<const StepReport> reports, std::size_t window) {
  NoiseStats st;
  for (const auto& r : reports) {
    if (!r.has_errors()) {
      throw std::invalid_argument("noise_stats: step " + std::to_string(r.k) +
                                  " has no noise channel (run with diagnostics)");
    }
    st.k.push_back(r.k);
    st.sigma_x_sq.push_back(r.error_x.squaredNorm());
    st.sigma_xm_sq.push_back(r.error_xm.squaredNorm());
    st.sigma_y_sq.push_back(r.error_y.squaredNorm());
  }
  st.sigma_x_sq = trailing_mean(st.sigma_x_sq, window);
  st.sigma_xm_sq = trailing_mean(st.sigma_xm_sq, window);
  st.sigma_y_sq = trailing_mean(st.sigma_y_sq, window);
  st.e_k.reserve(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    st.e_k.push_back(4.0 * r.beta * r.beta * r.step * st.sigma_x_sq[i] +
                     r.beta_prev * r.beta_prev * r.step_prev * st.sigma_xm_sq[i] +
                     4.0 * r.step * r.step * st.sigma_y_sq[i]);
  }
  return st;
}

}  // namespace igahd
