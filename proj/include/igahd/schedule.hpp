#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace igahd {

/// Step-size sequence k -> s_k, k >= 1.
class StepRule {
 public:
  static StepRule constant(double s);
  /// s_k = s0 / (k + offset)^exponent; nonincreasing by construction.
  static StepRule power(double s0, double exponent, double offset = 0.0);
  /// Arbitrary callable; monotonicity is asserted at run time by `run`.
  static StepRule custom(std::function<double(std::int64_t)> fn, std::string name = "custom");

  double operator()(std::int64_t k) const { return fn_(k); }
  const std::string& description() const { return name_; }

 private:
  StepRule(std::function<double(std::int64_t)> fn, std::string name)
      : fn_(std::move(fn)), name_(std::move(name)) {}

  std::function<double(std::int64_t)> fn_;
  std::string name_;
};

/// Minibatch-size sequence k -> N_k >= 1.
class BatchRule {
 public:
  static BatchRule constant(std::int64_t n);
  /// N_k = ceil(coefficient * k^exponent), at least 1.
  static BatchRule power(double coefficient, double exponent);
  static BatchRule custom(std::function<std::int64_t(std::int64_t)> fn);

  std::int64_t operator()(std::int64_t k) const;

 private:
  explicit BatchRule(std::function<std::int64_t(std::int64_t)> fn) : fn_(std::move(fn)) {}

  std::function<std::int64_t(std::int64_t)> fn_;
};

enum class ScheduleMode { kDeterministic, kStochastic };

struct BatchRules {
  BatchRule x = BatchRule::constant(1);
  BatchRule xm = BatchRule::constant(1);
  BatchRule y = BatchRule::constant(1);

  static BatchRules uniform(const BatchRule& rule) { return {rule, rule, rule}; }
};

/// The parameter sequences of the inertial algorithms:
///   alpha_k = 1 - alpha / k,  t_k = (k - 1) / (alpha - 1),
///   beta_k = eta * sqrt(s_k) / 2,  with alpha_0 = t_0 = beta_0 = 0.
///
/// Construction enforces alpha >= 3 and eta in (0, 1]; stochastic mode further
/// requires eta < 1 unless `allow_eta_one` is set.
class ScheduleSet {
 public:
  ScheduleSet(double alpha, double eta, StepRule step,
              ScheduleMode mode = ScheduleMode::kDeterministic,
              BatchRules batches = {}, bool allow_eta_one = false);

  double alpha() const { return alpha_; }
  double eta() const { return eta_; }
  ScheduleMode mode() const { return mode_; }

  double alpha_k(std::int64_t k) const;
  double t(std::int64_t k) const;
  /// s_k for k >= 1; s_0 is defined as s_1 (it only ever multiplies beta_0 = 0).
  double step(std::int64_t k) const;
  double beta(std::int64_t k) const;
  std::int64_t batch_x(std::int64_t k) const { return batches_.x(k); }
  std::int64_t batch_xm(std::int64_t k) const { return batches_.xm(k); }
  std::int64_t batch_y(std::int64_t k) const { return batches_.y(k); }
  const StepRule& step_rule() const { return step_; }

  /// Checks s_1 <= 1/L; throws std::invalid_argument otherwise.
  void check_step_bound(double lipschitz) const;

 private:
  double alpha_;
  double eta_;
  StepRule step_;
  ScheduleMode mode_;
  BatchRules batches_;
};

}  // namespace igahd
