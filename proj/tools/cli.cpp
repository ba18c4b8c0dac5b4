#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "igahd/bench.hpp"
#include "igahd/config.hpp"
#include "igahd/modes.hpp"

namespace igahd::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutEnv = "IGAHD_OUT_DIR";

struct Invocation {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string out;
  int jobs = 0;
  bool unpaired = false;
};

void add_common(CLI::App* sub, Invocation& inv) {
  sub->add_option("--config", inv.config, "experiment config (JSON)")->required();
  sub->add_option("--seed", inv.seed, "run this single seed instead of the configured list");
  sub->add_option("--set", inv.overrides, "override a config key, KEY=VALUE (repeatable)")
      ->take_all()
      ->allow_extra_args(false);
  sub->add_option("--out", inv.out, std::string("output directory (default: $") + kOutEnv +
                                        ", then the config's output, then ./igahd-out)");
  sub->add_option("--jobs", inv.jobs, "seeds run concurrently")->check(CLI::PositiveNumber);
}

PreparedExperiment load(const Invocation& inv) {
  std::vector<std::string> overrides = inv.overrides;
  if (inv.seed) overrides.push_back("seeds=[" + std::to_string(*inv.seed) + "]");
  if (inv.jobs > 0) overrides.push_back("jobs=" + std::to_string(inv.jobs));
  if (!fs::exists(inv.config)) throw ConfigError("", "config file not found: " + inv.config);
  return prepare(load_config(inv.config, overrides));
}

fs::path output_dir(const Invocation& inv, const ExperimentConfig& config) {
  if (!inv.out.empty()) return inv.out;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  if (!config.output.empty()) return config.output;
  return "igahd-out";
}

void progress(const std::string& line) { std::cerr << "[igahd] " << line << '\n'; }

int cmd_run(const Invocation& inv) {
  const PreparedExperiment prep = load(inv);
  const fs::path dir = output_dir(inv, prep.config);
  RunControl control;
  control.jobs = prep.config.jobs;
  control.progress = progress;
  const ExperimentResult result = run_experiment(prep, control);
  write_experiment(dir, result);
  const auto& agg = result.summary.at("aggregate");
  progress("wrote " + std::to_string(result.runs.size()) + " trajectories and summary.json to " +
           dir.string());
  if (agg.at("diverged").get<std::size_t>() == result.runs.size()) {
    progress("all seeds diverged");
    return kAllDiverged;
  }
  return kOk;
}

int cmd_check_lemma(const Invocation& inv) {
  const PreparedExperiment prep = load(inv);
  const fs::path dir = output_dir(inv, prep.config);
  std::int64_t total = 0;
  bool any_checked = false;
  for (std::uint64_t seed : prep.config.seeds) {
    const LemmaRun run = check_lemma_run(prep, seed);
    if (run.skipped) {
      progress("seed " + std::to_string(seed) + ": check skipped (beta = 0)");
      continue;
    }
    any_checked = true;
    fs::create_directories(dir);
    const fs::path path = dir / ("lemma_seed" + std::to_string(seed) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_lemma_csv(out, run);
    progress("seed " + std::to_string(seed) + ": steps = " + std::to_string(run.steps) +
             ", first satisfied k = " + std::to_string(run.first_satisfied) +
             ", violations = " + std::to_string(run.violations) + " (k >= " +
             std::to_string(prep.config.lemma_burn_in) + "), before burn-in = " +
             std::to_string(run.early_violations) +
             ", worst lhs - rhs = " + std::to_string(run.worst_excess));
    if (run.status == RunStatus::kDiverged) progress("seed " + std::to_string(seed) + ": diverged");
    total += run.violations;
  }
  if (!any_checked) return kOk;
  progress("total violations = " + std::to_string(total));
  return total == 0 ? kOk : kLemmaViolated;
}

int cmd_modes(const Invocation& inv) {
  const PreparedExperiment prep = load(inv);
  const ExperimentConfig& cfg = prep.config;
  if (cfg.problem.kind != ProblemKind::kQuadratic)
    throw ConfigError("problem.kind", "modes needs a quadratic problem");
  if (is_stochastic(cfg.algorithm) || cfg.algorithm == Algorithm::kHbf)
    throw ConfigError("algorithm", "modes runs igahd or fista");
  if (cfg.schedule.step_exponent != 0.0 || cfg.schedule.step_offset != 0.0)
    throw ConfigError("schedule.step_exponent", "modes needs a constant step size");
  const fs::path dir = output_dir(inv, cfg);
  fs::create_directories(dir);
  std::uint64_t seed = cfg.seeds.front();
  const ModeReport report =
      discrete_vs_mode(prep.problem, prep.schedule, cfg.max_iter, prep.initial_point(seed),
                       prep.hessian_damping(cfg.algorithm), cfg.mode_beta);
  const fs::path path = dir / "modes.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_mode_csv(out, report);
  for (const ModeComparison& m : report.modes) {
    progress("mode " + std::to_string(m.index) + ": lambda = " + std::to_string(m.lambda) + ", " +
             std::string(to_string(m.envelope.regime)) +
             ", predicted rate = " + std::to_string(m.predicted_rate) +
             ", zero crossings (discrete / ode) = " + std::to_string(m.discrete_crossings) + " / " +
             std::to_string(m.ode_crossings));
  }
  progress("wrote " + path.string());
  return kOk;
}

int cmd_compare(const Invocation& inv) {
  const PreparedExperiment loaded = load(inv);
  ExperimentConfig cfg = loaded.config;
  if (inv.unpaired) cfg.paired = false;
  const PreparedExperiment prep = prepare(cfg);
  const fs::path dir = output_dir(inv, cfg);
  RunControl control;
  control.jobs = cfg.jobs;
  control.progress = progress;
  const auto entries = compare_algorithms(prep, comparison_algorithms(cfg.algorithm), control);
  bool all_diverged = true;
  for (const ComparisonEntry& e : entries) {
    write_experiment(dir / std::string(to_string(e.algorithm)), e.result);
    all_diverged = all_diverged && e.result.summary.at("aggregate").at("diverged").get<std::size_t>() ==
                                       e.result.runs.size();
  }
  const nlohmann::json summary = comparison_summary(entries);
  const fs::path path = dir / "compare.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << summary.dump(2) << '\n';
  for (const auto& row : summary.at("algorithms")) progress(row.dump());
  progress("wrote " + path.string());
  return all_diverged ? kAllDiverged : kOk;
}

int cmd_validate(const Invocation& inv) {
  const PreparedExperiment prep = load(inv);
  progress("config ok: " + std::string(to_string(prep.config.problem.kind)) + ", " +
           std::string(to_string(prep.config.algorithm)) + ", " +
           std::to_string(prep.config.seeds.size()) + " seed(s), " +
           std::to_string(prep.config.max_iter) + " iterations");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Inertial gradient methods with Hessian-driven damping: experiments and checks",
               "igahd"};
  app.require_subcommand(1);
  Invocation inv;
  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment: one CSV per seed + summary.json");
  CLI::App* lemma_cmd =
      app.add_subcommand("check-lemma", "verify the per-step energy descent inequality");
  CLI::App* modes_cmd = app.add_subcommand("modes", "eigenmode analysis of a quadratic run");
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "run igahd, fista and heavy ball side by side");
  CLI::App* validate_cmd = app.add_subcommand("validate-config", "check a config without running");
  for (CLI::App* sub : {run_cmd, lemma_cmd, modes_cmd, compare_cmd, validate_cmd})
    add_common(sub, inv);
  compare_cmd->add_flag("--unpaired", inv.unpaired,
                        "draw independent samples per algorithm instead of shared streams");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cerr << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "igahd: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(inv);
    if (lemma_cmd->parsed()) return cmd_check_lemma(inv);
    if (modes_cmd->parsed()) return cmd_modes(inv);
    if (compare_cmd->parsed()) return cmd_compare(inv);
    if (validate_cmd->parsed()) return cmd_validate(inv);
  } catch (const ConfigError& e) {
    std::cerr << "igahd: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "igahd: error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace igahd::cli
