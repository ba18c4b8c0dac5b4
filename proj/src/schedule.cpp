#include "igahd/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace igahd {

StepRule StepRule::constant(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("step size must be positive and finite");
  }
  std::ostringstream name;
  name << "constant(" << s << ")";
  return StepRule([s](std::int64_t) { return s; }, name.str());
}

StepRule StepRule::power(double s0, double exponent, double offset) {
  if (!(s0 > 0.0) || !std::isfinite(s0)) {
    throw std::invalid_argument("s0 must be positive and finite");
  }
  if (!(exponent >= 0.0)) {
    throw std::invalid_argument("step exponent must be >= 0 for a nonincreasing rule");
  }
  if (!(offset > -1.0)) {
    throw std::invalid_argument("step offset must exceed -1");
  }
  std::ostringstream name;
  name << s0 << "/(k+" << offset << ")^" << exponent;
  return StepRule(
      [s0, exponent, offset](std::int64_t k) {
        return s0 / std::pow(static_cast<double>(k) + offset, exponent);
      },
      name.str());
}

StepRule StepRule::custom(std::function<double(std::int64_t)> fn, std::string name) {
  return StepRule(std::move(fn), std::move(name));
}

BatchRule BatchRule::constant(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("batch size must be >= 1");
  return BatchRule([n](std::int64_t) { return n; });
}

BatchRule BatchRule::power(double coefficient, double exponent) {
  if (!(coefficient > 0.0) || !(exponent >= 0.0)) {
    throw std::invalid_argument("batch rule needs coefficient > 0 and exponent >= 0");
  }
  return BatchRule([coefficient, exponent](std::int64_t k) {
    const double n = std::ceil(coefficient * std::pow(static_cast<double>(k), exponent));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(n));
  });
}

BatchRule BatchRule::custom(std::function<std::int64_t(std::int64_t)> fn) {
  return BatchRule(std::move(fn));
}

std::int64_t BatchRule::operator()(std::int64_t k) const {
  const std::int64_t n = fn_(k);
  if (n < 1) {
    throw std::invalid_argument("batch rule returned " + std::to_string(n) +
                                " at k = " + std::to_string(k));
  }
  return n;
}

ScheduleSet::ScheduleSet(double alpha, double eta, StepRule step, ScheduleMode mode,
                         BatchRules batches, bool allow_eta_one)
    : alpha_(alpha), eta_(eta), step_(std::move(step)), mode_(mode),
      batches_(std::move(batches)) {
  if (!(alpha >= 3.0)) {
    throw std::invalid_argument("schedule.alpha must be >= 3, got " + std::to_string(alpha));
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("schedule.eta must lie in (0, 1], got " + std::to_string(eta));
  }
  if (mode == ScheduleMode::kStochastic && eta >= 1.0 && !allow_eta_one) {
    throw std::invalid_argument(
        "schedule.eta must be < 1 in stochastic mode (beta_k < sqrt(s_k)/2); "
        "set allow_eta_one to override");
  }
}

double ScheduleSet::alpha_k(std::int64_t k) const {
  return k <= 0 ? 0.0 : 1.0 - alpha_ / static_cast<double>(k);
}

double ScheduleSet::t(std::int64_t k) const {
  return k <= 0 ? 0.0 : static_cast<double>(k - 1) / (alpha_ - 1.0);
}

double ScheduleSet::step(std::int64_t k) const { return step_(k < 1 ? 1 : k); }

double ScheduleSet::beta(std::int64_t k) const {
  return k <= 0 ? 0.0 : eta_ * std::sqrt(step(k)) / 2.0;
}

void ScheduleSet::check_step_bound(double lipschitz) const {
  const double s1 = step(1);
  if (lipschitz > 0.0 && s1 * lipschitz > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "schedule: s_1 = " << s1 << " exceeds 1/L = " << 1.0 / lipschitz;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace igahd
