#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "igahd/optim.hpp"
#include "igahd/problem.hpp"
#include "igahd/schedule.hpp"
#include "igahd/synthetic.hpp"

namespace igahd {

/// Invalid configuration; `field` is the dotted path of the offending key
/// (empty for document-level problems such as unreadable files).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ProblemKind { kQuadratic, kRegression, kClassification };
enum class Algorithm { kIgahd, kFista, kHbf, kSigahd, kSfista, kShbf };

std::string_view to_string(ProblemKind kind);
std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);
bool is_stochastic(Algorithm algorithm);

struct DatasetConfig {
  int dim = 6;
  int outputs = 1;
  // Also the size of the classification evaluation pool.
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 42;
  double noise_std = 0.0;
  std::optional<Vector> mean;
  std::optional<Matrix> covariance;
  std::optional<Matrix> weights;
};

struct ProblemConfig {
  ProblemKind kind = ProblemKind::kQuadratic;
  Matrix matrix;
  Vector vector;
  DatasetConfig dataset;
  /// Rescale one feature so the second-moment matrix has this condition number.
  std::optional<double> condition_number;
  int scaled_feature = 5;
  std::optional<SamplingMode> sampling;
};

struct ScheduleConfig {
  double alpha = 3.1;
  /// 0 turns Hessian damping off (FISTA / S-FISTA).
  double eta = 0.5;
  bool allow_eta_one = false;
  /// Absolute s0; when absent s0 = s0_scale / L.
  std::optional<double> s0;
  double s0_scale = 1.0;
  double step_exponent = 0.0;
  double step_offset = 0.0;
  double batch_coefficient = 2.0;
  double batch_exponent = 2.0;
  std::optional<std::int64_t> batch_constant;
  double hbf_damping = 0.1;
};

struct ErrorConfig {
  bool enabled = false;
  double scale = 1.0;
  double exponent = 2.5;
  std::optional<Vector> direction;
};

struct InitConfig {
  double low = -1.0;
  double high = 1.0;
  std::optional<Vector> point;
};

struct FitConfig {
  std::int64_t k_min = 100;
  std::optional<std::int64_t> k_max;
  double burn_in = 0.1;
};

struct ExperimentConfig {
  ProblemConfig problem;
  Algorithm algorithm = Algorithm::kIgahd;
  ScheduleConfig schedule;
  ErrorConfig errors;
  InitConfig init;
  std::vector<std::uint64_t> seeds{0};
  std::int64_t max_iter = 10000;
  std::int64_t record_every = 1;
  std::string output;
  FitConfig fit;
  double plateau_tail = 0.1;
  int jobs = 1;
  /// Noise columns for stochastic runs (costs exact gradients on recorded rows).
  bool diagnostics = true;
  /// compare: share sample streams across algorithms.
  bool paired = true;
  /// check-lemma: first k at which violations count.
  std::int64_t lemma_burn_in = 10;
  /// modes: overrides the matched ODE Hessian damping.
  std::optional<double> mode_beta;
};

/// Parses and validates a document. Unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Applies "a.b.c=value" overrides in order. Values are parsed as JSON when
/// possible and taken as strings otherwise. Paths must name schema keys.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

/// Reads, overrides, and parses a config file.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// Everything needed to execute a config, with all module preconditions checked.
struct PreparedExperiment {
  ExperimentConfig config;
  Problem problem;
  /// Present for stochastic algorithms.
  std::shared_ptr<const StochasticOracle> oracle;
  ScheduleSet schedule;
  ErrorInjector injector;

  /// Fresh stepper for `algorithm` (defaults to the configured one).
  Stepper stepper(std::optional<Algorithm> algorithm = std::nullopt,
                  bool diagnostics = true) const;
  /// Starting point for a seed.
  Vector initial_point(std::uint64_t seed) const;
  /// Whether `algorithm` uses beta_k > 0 under this schedule.
  bool hessian_damping(Algorithm algorithm) const;
};

/// Builds the problem, oracle and schedule. Throws ConfigError naming the
/// section whose preconditions fail.
PreparedExperiment prepare(const ExperimentConfig& config);

}  // namespace igahd
