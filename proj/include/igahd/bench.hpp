#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "igahd/config.hpp"
#include "igahd/lyapunov.hpp"
#include "igahd/record.hpp"

namespace igahd {

// ---- trajectory files -------------------------------------------------------

extern const char* const kTrajectoryHeader;

/// Floats with 17 significant digits, so reading back is bit-exact.
void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRecord> records);
std::vector<TrajectoryRecord> read_trajectory_csv(std::istream& in);

/// Numeric column by CSV name (k and batch columns are converted to double).
double field_value(const TrajectoryRecord& record, std::string_view field);
std::vector<double> field_series(std::span<const TrajectoryRecord> records,
                                 std::string_view field);

// ---- analysis ---------------------------------------------------------------

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  /// Nonpositive samples inside the window, left out of the fit.
  std::size_t zeros_excluded = 0;
};

/// Least squares of log(value) on log(k) over k in [k_lo, k_max], where
/// k_lo = k_min + burn_in (k_max - k_min). Non-finite samples are skipped.
/// Throws std::invalid_argument with fewer than 10 usable points.
RateFit fit_rate(std::span<const std::int64_t> ks, std::span<const double> values,
                 std::int64_t k_min, std::int64_t k_max, double burn_in = 0.1);
RateFit fit_rate(std::span<const TrajectoryRecord> records, std::string_view field,
                 std::int64_t k_min, std::int64_t k_max, double burn_in = 0.1);

/// Cross-seed mean of each seed's average `field` over its last tail_fraction
/// of iterations. Throws std::invalid_argument with fewer than 5 seeds.
double plateau_level(std::span<const std::vector<TrajectoryRecord>> runs,
                     std::string_view field, double tail_fraction);

/// Sign changes of a signed field series (|v| < 1e-14 ignored).
std::size_t zero_crossings(std::span<const TrajectoryRecord> records, std::string_view field);

/// Sign changes of consecutive objective_gap differences: how often the
/// objective switches between decreasing and increasing.
std::size_t gap_oscillations(std::span<const TrajectoryRecord> records);

// ---- experiments ------------------------------------------------------------

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<TrajectoryRecord> records;
};

struct RunControl {
  int jobs = 1;
  /// Run this algorithm instead of the configured one (compare).
  std::optional<Algorithm> algorithm;
  std::function<void(const std::string&)> progress;
  const std::atomic<bool>* stop = nullptr;
};

/// One seed: rows for k = 1, 1 + r, 1 + 2r, ... and the final iterate (step
/// columns NaN). A run that produced a non-finite iterate ends with an all-NaN
/// row, status "diverged", at the index of that iterate.
SeedRun run_seed(const PreparedExperiment& prep, std::uint64_t seed,
                 std::optional<Algorithm> algorithm = std::nullopt);

struct ExperimentResult {
  std::vector<SeedRun> runs;
  nlohmann::json summary;
};

/// All seeds (concurrently with jobs > 1; results do not depend on jobs).
ExperimentResult run_experiment(const PreparedExperiment& prep, const RunControl& control = {});

/// Per-seed final gaps, fitted slopes and divergence, plus cross-seed
/// aggregates. Depends only on the records, so it can be recomputed from files.
nlohmann::json summarize(const ExperimentConfig& config, std::span<const SeedRun> runs,
                         std::string_view algorithm);

std::string trajectory_file_name(std::uint64_t seed);

/// Writes one CSV per seed and summary.json under `dir` (created if needed).
/// Throws std::runtime_error naming the path on I/O failure.
void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result);

/// Reads the trajectories listed in `dir`/summary.json back.
std::vector<SeedRun> read_experiment(const std::filesystem::path& dir);

// ---- lemma checks and comparisons -------------------------------------------

struct LemmaRun {
  std::uint64_t seed = 0;
  /// Hessian damping is off, so the inequality is not evaluated.
  bool skipped = false;
  std::int64_t steps = 0;
  /// Violations at k >= burn-in, and before it.
  std::int64_t violations = 0;
  std::int64_t early_violations = 0;
  /// Smallest k where the inequality held (0 if never).
  std::int64_t first_satisfied = 0;
  /// max over k >= burn-in of lhs - rhs.
  double worst_excess = 0.0;
  std::vector<CheckResult> checks;
  RunStatus status = RunStatus::kCompleted;
};

/// Runs the configured deterministic algorithm for one seed and checks the
/// per-step descent inequality. Throws ConfigError for stochastic algorithms
/// or problems without a known minimizer.
LemmaRun check_lemma_run(const PreparedExperiment& prep, std::uint64_t seed);

void write_lemma_csv(std::ostream& out, const LemmaRun& run);

/// The configured algorithm family: {igahd, fista, hbf} or {sigahd, sfista, shbf}.
std::vector<Algorithm> comparison_algorithms(Algorithm configured);

struct ComparisonEntry {
  Algorithm algorithm = Algorithm::kIgahd;
  ExperimentResult result;
};

/// Runs every algorithm on the same problem and seeds. With config.paired the
/// algorithms consume identical sample streams per seed.
std::vector<ComparisonEntry> compare_algorithms(const PreparedExperiment& prep,
                                               const std::vector<Algorithm>& algorithms,
                                               const RunControl& control = {});

/// Side-by-side medians, slopes and oscillation counts, ranked by median final gap.
nlohmann::json comparison_summary(const std::vector<ComparisonEntry>& entries);

/// Quantile with linear interpolation over sorted values; +inf sorts last.
double quantile(std::vector<double> values, double q);

}  // namespace igahd
