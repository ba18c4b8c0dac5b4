#include "igahd/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "igahd/lyapunov.hpp"
#include "igahd/series.hpp"

namespace igahd {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

double parse_real(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw std::invalid_argument("trajectory csv line " + std::to_string(line) + ": bad number '" +
                                s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size())
    throw std::invalid_argument("trajectory csv line " + std::to_string(line) +
                                ": bad integer '" + s + "'");
  return v;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

const char* const kTrajectoryHeader =
    "k,objective_gap,grad_norm_x,grad_norm_y,velocity,step_size,batch_x,batch_xm,batch_y,"
    "lyapunov,sigma_x,sigma_xm,sigma_y,status";

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRecord> records) {
  out << kTrajectoryHeader << '\n';
  for (const TrajectoryRecord& r : records) {
    out << r.k << ',';
    put(out, r.objective_gap);
    out << ',';
    put(out, r.grad_norm_x);
    out << ',';
    put(out, r.grad_norm_y);
    out << ',';
    put(out, r.velocity);
    out << ',';
    put(out, r.step_size);
    out << ',' << r.batch_x << ',' << r.batch_xm << ',' << r.batch_y << ',';
    put(out, r.lyapunov);
    out << ',';
    put(out, r.sigma_x);
    out << ',';
    put(out, r.sigma_xm);
    out << ',';
    put(out, r.sigma_y);
    out << ',' << r.status << '\n';
  }
}

std::vector<TrajectoryRecord> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader)
    throw std::invalid_argument("trajectory csv: missing or unexpected header");
  std::vector<TrajectoryRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 14)
      throw std::invalid_argument("trajectory csv line " + std::to_string(line_no) +
                                  ": expected 14 fields");
    TrajectoryRecord r;
    r.k = parse_int(f[0], line_no);
    r.objective_gap = parse_real(f[1], line_no);
    r.grad_norm_x = parse_real(f[2], line_no);
    r.grad_norm_y = parse_real(f[3], line_no);
    r.velocity = parse_real(f[4], line_no);
    r.step_size = parse_real(f[5], line_no);
    r.batch_x = parse_int(f[6], line_no);
    r.batch_xm = parse_int(f[7], line_no);
    r.batch_y = parse_int(f[8], line_no);
    r.lyapunov = parse_real(f[9], line_no);
    r.sigma_x = parse_real(f[10], line_no);
    r.sigma_xm = parse_real(f[11], line_no);
    r.sigma_y = parse_real(f[12], line_no);
    r.status = f[13];
    records.push_back(std::move(r));
  }
  return records;
}

double field_value(const TrajectoryRecord& r, std::string_view field) {
  if (field == "k") return static_cast<double>(r.k);
  if (field == "objective_gap") return r.objective_gap;
  if (field == "grad_norm_x") return r.grad_norm_x;
  if (field == "grad_norm_y") return r.grad_norm_y;
  if (field == "velocity") return r.velocity;
  if (field == "step_size") return r.step_size;
  if (field == "batch_x") return static_cast<double>(r.batch_x);
  if (field == "batch_xm") return static_cast<double>(r.batch_xm);
  if (field == "batch_y") return static_cast<double>(r.batch_y);
  if (field == "lyapunov") return r.lyapunov;
  if (field == "sigma_x") return r.sigma_x;
  if (field == "sigma_xm") return r.sigma_xm;
  if (field == "sigma_y") return r.sigma_y;
  throw std::invalid_argument("unknown trajectory field '" + std::string(field) + "'");
}

std::vector<double> field_series(std::span<const TrajectoryRecord> records,
                                 std::string_view field) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const TrajectoryRecord& r : records) out.push_back(field_value(r, field));
  return out;
}

RateFit fit_rate(std::span<const std::int64_t> ks, std::span<const double> values,
                 std::int64_t k_min, std::int64_t k_max, double burn_in) {
  if (ks.size() != values.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (!(k_max > k_min)) throw std::invalid_argument("fit_rate: empty k range");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw std::invalid_argument("fit_rate: burn_in in [0, 1)");
  const double k_lo = static_cast<double>(k_min) + burn_in * static_cast<double>(k_max - k_min);
  RateFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto k = static_cast<double>(ks[i]);
    if (k < k_lo || ks[i] > k_max || !std::isfinite(values[i])) continue;
    if (values[i] <= 0.0) {
      ++fit.zeros_excluded;
      continue;
    }
    lx.push_back(std::log(k));
    ly.push_back(std::log(values[i]));
  }
  fit.points = lx.size();
  if (fit.points < 10)
    throw std::invalid_argument("fit_rate: only " + std::to_string(fit.points) +
                                " usable points in the k range (need 10)");
  const LinearFit lf = linear_fit(lx, ly);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  return fit;
}

RateFit fit_rate(std::span<const TrajectoryRecord> records, std::string_view field,
                 std::int64_t k_min, std::int64_t k_max, double burn_in) {
  std::vector<std::int64_t> ks;
  ks.reserve(records.size());
  for (const TrajectoryRecord& r : records) ks.push_back(r.k);
  return fit_rate(ks, field_series(records, field), k_min, k_max, burn_in);
}

double plateau_level(std::span<const std::vector<TrajectoryRecord>> runs,
                     std::string_view field, double tail_fraction) {
  if (runs.size() < 5) throw std::invalid_argument("plateau_level: need at least 5 seeds");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument("plateau_level: tail_fraction in (0, 1]");
  double total = 0.0;
  for (const auto& recs : runs) {
    std::int64_t k_last = 0;
    for (const TrajectoryRecord& r : recs)
      if (r.status == "ok") k_last = std::max(k_last, r.k);
    const double cutoff = static_cast<double>(k_last) * (1.0 - tail_fraction);
    double sum = 0.0;
    std::size_t n = 0;
    for (const TrajectoryRecord& r : recs) {
      if (r.status != "ok" || static_cast<double>(r.k) <= cutoff) continue;
      sum += field_value(r, field);
      ++n;
    }
    total += n ? sum / static_cast<double>(n) : kNaN;
  }
  return total / static_cast<double>(runs.size());
}

std::size_t zero_crossings(std::span<const TrajectoryRecord> records, std::string_view field) {
  const std::vector<double> v = field_series(records, field);
  return zero_crossings(std::span<const double>(v));
}

std::size_t gap_oscillations(std::span<const TrajectoryRecord> records) {
  std::vector<double> diffs;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double d = records[i].objective_gap - records[i - 1].objective_gap;
    if (std::isfinite(d)) diffs.push_back(d);
  }
  return zero_crossings(std::span<const double>(diffs));
}

// ---- running -----------------------------------------------------------------

namespace {

bool uses_energy(Algorithm a) { return a != Algorithm::kHbf && a != Algorithm::kShbf; }

struct RowContext {
  const PreparedExperiment& prep;
  Algorithm algorithm;
  std::optional<Vector> x_star;
};

// Everything of row k that depends on x_k, x_{k-1} only.
TrajectoryRecord iterate_row(const RowContext& ctx, std::int64_t k, const Vector& x_k,
                             const Vector& x_km1, double lead_km1) {
  const Problem& p = ctx.prep.problem;
  TrajectoryRecord r;
  r.k = k;
  r.objective_gap = p.min_value ? p.gap(x_k) : kNaN;
  r.grad_norm_x = p.gradient(x_k).norm();
  r.velocity = static_cast<double>(k) * (x_k - x_km1).norm();
  if (ctx.x_star && uses_energy(ctx.algorithm) && p.min_value) {
    const Vector grad_km1 = lead_km1 != 0.0 ? p.gradient(x_km1) : Vector::Zero(x_k.size());
    r.lyapunov = snapshot_from_iterates(k, x_k, x_km1, lead_km1, grad_km1, ctx.prep.schedule, p,
                                        *ctx.x_star)
                     .e_hat;
  } else {
    r.lyapunov = kNaN;
  }
  return r;
}

void fill_step(const RowContext& ctx, TrajectoryRecord& r, const StepReport& report,
               bool noise_known) {
  r.grad_norm_y = ctx.prep.problem.gradient(report.y).norm();
  r.step_size = report.step;
  r.batch_x = report.batch_x;
  r.batch_xm = report.batch_xm;
  r.batch_y = report.batch_y;
  if (!noise_known) {
    r.sigma_x = r.sigma_xm = r.sigma_y = kNaN;
    return;
  }
  r.sigma_x = report.error_x.size() ? report.error_x.norm() : 0.0;
  r.sigma_xm = report.error_xm.size() ? report.error_xm.norm() : 0.0;
  r.sigma_y = report.error_y.size() ? report.error_y.norm() : 0.0;
}

void clear_step(TrajectoryRecord& r) {
  r.grad_norm_y = r.step_size = r.sigma_x = r.sigma_xm = r.sigma_y = kNaN;
  r.batch_x = r.batch_xm = r.batch_y = 0;
}

TrajectoryRecord sentinel_row(std::int64_t k, const std::string& status) {
  TrajectoryRecord r;
  r.k = k;
  r.objective_gap = r.grad_norm_x = r.velocity = r.lyapunov = kNaN;
  clear_step(r);
  r.status = status;
  return r;
}

}  // namespace

SeedRun run_seed(const PreparedExperiment& prep, std::uint64_t seed,
                 std::optional<Algorithm> algorithm) {
  const ExperimentConfig& cfg = prep.config;
  const Algorithm alg = algorithm.value_or(cfg.algorithm);
  RowContext ctx{prep, alg, prep.problem.minimizer};
  const std::int64_t every = cfg.record_every;
  const auto keep = [every](std::int64_t k) { return (k - 1) % every == 0; };

  const bool stochastic = is_stochastic(alg);
  const bool noise_known = !stochastic || cfg.diagnostics;
  const Stepper plain = prep.stepper(alg, false);
  const Stepper diag = stochastic && cfg.diagnostics ? prep.stepper(alg, true) : plain;
  // Diagnostics only add exact-gradient evaluations, never random draws, so
  // switching per step leaves the trajectory unchanged.
  const Stepper stepper = [&](OptimizerState& st) { return keep(st.k) ? diag(st) : plain(st); };

  SeedRun out;
  out.seed = seed;
  double lead_prev = 0.0;
  std::int64_t last_k = 1;
  Vector last_x, last_x_prev;
  double last_lead = 0.0;
  const Recorder recorder = [&](const OptimizerState& before, const OptimizerState& after,
                                const StepReport& report) {
    if (keep(before.k)) {
      TrajectoryRecord row = iterate_row(ctx, before.k, before.x_curr, before.x_prev, lead_prev);
      fill_step(ctx, row, report, noise_known);
      out.records.push_back(std::move(row));
    }
    lead_prev = report.lead_coef;
    last_k = after.k;
    last_x = after.x_curr;
    last_x_prev = after.x_prev;
    last_lead = report.lead_coef;
  };

  const Vector x0 = prep.initial_point(seed);
  last_x = x0;
  last_x_prev = x0;
  RunOptions options;
  options.seed = cfg.paired ? seed : derive_seed(seed, 100 + static_cast<std::uint64_t>(alg));
  options.keep_iterates = false;
  const Trajectory traj = run(stepper, x0, cfg.max_iter, recorder, options);

  TrajectoryRecord final_row = iterate_row(ctx, last_k, last_x, last_x_prev, last_k > 1 ? last_lead : 0.0);
  clear_step(final_row);
  out.records.push_back(std::move(final_row));
  if (traj.status == RunStatus::kDiverged) {
    out.records.push_back(sentinel_row(traj.diverged_at + 1, "diverged"));
  } else if (traj.status == RunStatus::kInterrupted) {
    out.records.push_back(sentinel_row(last_k + 1, "interrupted"));
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  if (lo == hi || values[lo] == values[hi]) return values[lo];
  if (std::isinf(values[hi])) return values[hi];
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

std::string run_status(const SeedRun& run) {
  return run.records.empty() ? "empty" : run.records.back().status;
}

// Last row with a finite objective gap.
const TrajectoryRecord* last_finite(const SeedRun& run) {
  for (auto it = run.records.rbegin(); it != run.records.rend(); ++it)
    if (it->status == "ok") return &*it;
  return nullptr;
}

json stats(const std::vector<double>& values) {
  json j;
  std::vector<double> finite;
  for (double v : values)
    if (std::isfinite(v)) finite.push_back(v);
  double mean = 0.0;
  for (double v : finite) mean += v;
  j["count"] = values.size();
  j["finite"] = finite.size();
  j["mean"] = finite.empty() ? json(nullptr) : json(mean / static_cast<double>(finite.size()));
  j["median"] = finite_or_null(quantile(values, 0.5));
  j["q10"] = finite_or_null(quantile(values, 0.1));
  j["q25"] = finite_or_null(quantile(values, 0.25));
  j["q75"] = finite_or_null(quantile(values, 0.75));
  j["q90"] = finite_or_null(quantile(values, 0.9));
  j["min"] = finite.empty() ? json(nullptr) : json(*std::min_element(finite.begin(), finite.end()));
  j["max"] = finite.empty() ? json(nullptr) : json(*std::max_element(finite.begin(), finite.end()));
  return j;
}

}  // namespace

json summarize(const ExperimentConfig& config, std::span<const SeedRun> runs,
               std::string_view algorithm) {
  const std::int64_t k_max = config.fit.k_max.value_or(config.max_iter);
  json summary;
  summary["algorithm"] = algorithm;
  summary["max_iter"] = config.max_iter;
  summary["record_every"] = config.record_every;
  summary["fit"] = {{"field", "objective_gap"},
                    {"k_min", config.fit.k_min},
                    {"k_max", k_max},
                    {"burn_in", config.fit.burn_in}};
  json seeds = json::array();
  std::vector<double> finals, slopes;
  std::size_t diverged = 0;
  for (const SeedRun& run : runs) {
    json s;
    s["seed"] = run.seed;
    s["file"] = trajectory_file_name(run.seed);
    const std::string status = run_status(run);
    s["status"] = status == "ok" ? "completed" : status;
    const TrajectoryRecord* last = last_finite(run);
    s["final_k"] = last ? json(last->k) : json(nullptr);
    s["initial_gap"] = run.records.empty() ? json(nullptr)
                                           : finite_or_null(run.records.front().objective_gap);
    if (status == "diverged") {
      ++diverged;
      s["diverged_at"] = run.records.back().k - 1;
      s["final_gap"] = nullptr;
      finals.push_back(kInf);
    } else {
      s["diverged_at"] = nullptr;
      const double g = last ? last->objective_gap : kNaN;
      s["final_gap"] = finite_or_null(g);
      finals.push_back(std::isfinite(g) ? g : kInf);
    }
    std::vector<TrajectoryRecord> ok;
    for (const TrajectoryRecord& r : run.records)
      if (r.status == "ok") ok.push_back(r);
    s["gap_oscillations"] = gap_oscillations(ok);
    try {
      const RateFit fit = fit_rate(ok, "objective_gap", config.fit.k_min, k_max, config.fit.burn_in);
      s["slope"] = fit.slope;
      s["intercept"] = fit.intercept;
      s["r2"] = fit.r2;
      s["fit_points"] = fit.points;
      s["zeros_excluded"] = fit.zeros_excluded;
      slopes.push_back(fit.slope);
    } catch (const std::invalid_argument& e) {
      s["slope"] = nullptr;
      s["fit_error"] = e.what();
    }
    seeds.push_back(std::move(s));
  }
  summary["seeds"] = std::move(seeds);

  json agg;
  agg["diverged"] = diverged;
  agg["final_gap"] = stats(finals);
  agg["slope"] = stats(slopes);

  // Cross-seed mean curve over the rows every seed reached.
  if (!runs.empty() && diverged == 0) {
    std::size_t rows = std::numeric_limits<std::size_t>::max();
    for (const SeedRun& run : runs) rows = std::min(rows, run.records.size());
    std::vector<std::int64_t> ks;
    std::vector<double> mean;
    for (std::size_t i = 0; i < rows; ++i) {
      const std::int64_t k = runs[0].records[i].k;
      double sum = 0.0;
      bool aligned = true;
      for (const SeedRun& run : runs) {
        aligned = aligned && run.records[i].k == k;
        sum += run.records[i].objective_gap;
      }
      if (!aligned) break;
      ks.push_back(k);
      mean.push_back(sum / static_cast<double>(runs.size()));
    }
    try {
      const RateFit fit = fit_rate(ks, mean, config.fit.k_min, k_max, config.fit.burn_in);
      agg["mean_curve"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2},
                           {"final_gap", mean.back()}};
    } catch (const std::invalid_argument& e) {
      agg["mean_curve"] = {{"slope", nullptr}, {"fit_error", e.what()}};
    }
  }
  if (runs.size() >= 5) {
    std::vector<std::vector<TrajectoryRecord>> all;
    for (const SeedRun& run : runs) all.push_back(run.records);
    agg["plateau"] = finite_or_null(plateau_level(all, "objective_gap", config.plateau_tail));
    agg["plateau_tail"] = config.plateau_tail;
  }
  summary["aggregate"] = std::move(agg);
  return summary;
}

ExperimentResult run_experiment(const PreparedExperiment& prep, const RunControl& control) {
  const ExperimentConfig& cfg = prep.config;
  const Algorithm alg = control.algorithm.value_or(cfg.algorithm);
  ExperimentResult result;
  result.runs.resize(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.seeds.size()) return;
      if (control.stop && control.stop->load()) return;
      try {
        result.runs[i] = run_seed(prep, cfg.seeds[i], alg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
      if (control.progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        control.progress(std::string(to_string(alg)) + " seed " + std::to_string(cfg.seeds[i]) +
                         ": " + run_status(result.runs[i]));
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(control.jobs, static_cast<int>(cfg.seeds.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  result.summary = summarize(cfg, result.runs, to_string(alg));
  return result;
}

std::string trajectory_file_name(std::uint64_t seed) {
  return "trajectory_seed" + std::to_string(seed) + ".csv";
}

void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const SeedRun& run : result.runs) {
    const auto path = dir / trajectory_file_name(run.seed);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_trajectory_csv(out, run.records);
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }
  const auto path = dir / "summary.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << result.summary.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

LemmaRun check_lemma_run(const PreparedExperiment& prep, std::uint64_t seed) {
  const ExperimentConfig& cfg = prep.config;
  if (is_stochastic(cfg.algorithm))
    throw ConfigError("algorithm", "check-lemma needs a deterministic algorithm (igahd or fista)");
  if (cfg.algorithm == Algorithm::kHbf)
    throw ConfigError("algorithm", "the descent inequality concerns igahd, not heavy ball");
  if (!prep.problem.minimizer || !prep.problem.min_value)
    throw ConfigError("problem", "check-lemma needs a problem with a known minimizer");
  LemmaRun out;
  out.seed = seed;
  if (!prep.hessian_damping(cfg.algorithm)) {
    out.skipped = true;
    return out;
  }
  const Vector& x_star = *prep.problem.minimizer;
  const Vector x0 = prep.initial_point(seed);
  OptimizerState init = initial_state(x0, seed);
  EnergySnapshot prev = initial_snapshot(init, prep.schedule, prep.problem, x_star);
  out.worst_excess = -kInf;
  const Recorder recorder = [&](const OptimizerState& before, const OptimizerState& after,
                                const StepReport& report) {
    EnergySnapshot next =
        energy_snapshot(before, after, report, prep.schedule, prep.problem, x_star);
    const CheckResult c = check_lemma1(prev, next, report, prep.schedule);
    ++out.steps;
    if (c.satisfied && out.first_satisfied == 0) out.first_satisfied = c.k;
    if (c.k >= cfg.lemma_burn_in) {
      if (!c.satisfied) ++out.violations;
      const double excess = c.lhs - c.rhs;
      out.worst_excess = std::max(out.worst_excess, std::isnan(excess) ? kInf : excess);
    } else if (!c.satisfied) {
      ++out.early_violations;
    }
    out.checks.push_back(c);
    prev = std::move(next);
  };
  RunOptions options;
  options.seed = seed;
  options.keep_iterates = false;
  out.status = run(prep.stepper(), x0, cfg.max_iter, recorder, options).status;
  return out;
}

void write_lemma_csv(std::ostream& out, const LemmaRun& run) {
  out << "k,lhs,rhs,satisfied\n";
  for (const CheckResult& c : run.checks) {
    out << c.k << ',';
    put(out, c.lhs);
    out << ',';
    put(out, c.rhs);
    out << ',' << (c.satisfied ? 1 : 0) << '\n';
  }
}

std::vector<Algorithm> comparison_algorithms(Algorithm configured) {
  if (is_stochastic(configured)) return {Algorithm::kSigahd, Algorithm::kSfista, Algorithm::kShbf};
  return {Algorithm::kIgahd, Algorithm::kFista, Algorithm::kHbf};
}

std::vector<ComparisonEntry> compare_algorithms(const PreparedExperiment& prep,
                                               const std::vector<Algorithm>& algorithms,
                                               const RunControl& control) {
  for (Algorithm a : algorithms) {
    if (is_stochastic(a) != is_stochastic(prep.config.algorithm))
      throw ConfigError("algorithm", "cannot mix deterministic and stochastic algorithms");
    if ((a == Algorithm::kHbf || a == Algorithm::kShbf) &&
        !(prep.config.schedule.hbf_damping * std::sqrt(prep.schedule.step(1)) < 1.0))
      throw ConfigError("schedule.hbf_damping", "heavy ball needs hbf_damping * sqrt(s0) < 1");
  }
  std::vector<ComparisonEntry> entries;
  for (Algorithm a : algorithms) {
    RunControl c = control;
    c.algorithm = a;
    entries.push_back({a, run_experiment(prep, c)});
  }
  return entries;
}

json comparison_summary(const std::vector<ComparisonEntry>& entries) {
  json rows = json::array();
  std::vector<std::pair<double, std::string>> ranking;
  for (const ComparisonEntry& e : entries) {
    const json& agg = e.result.summary.at("aggregate");
    std::vector<double> finals, osc;
    for (const json& s : e.result.summary.at("seeds")) {
      finals.push_back(s.at("final_gap").is_null() ? kInf : s.at("final_gap").get<double>());
      osc.push_back(s.at("gap_oscillations").get<double>());
    }
    const double median = quantile(finals, 0.5);
    json row;
    row["algorithm"] = to_string(e.algorithm);
    row["median_final_gap"] = finite_or_null(median);
    row["mean_slope"] = agg.at("slope").at("mean");
    row["median_slope"] = agg.at("slope").at("median");
    row["mean_curve_slope"] =
        agg.contains("mean_curve") ? agg.at("mean_curve").at("slope") : json(nullptr);
    row["median_gap_oscillations"] = quantile(osc, 0.5);
    row["diverged"] = agg.at("diverged");
    rows.push_back(std::move(row));
    ranking.emplace_back(median, std::string(to_string(e.algorithm)));
  }
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  json rank = json::array();
  for (const auto& r : ranking) rank.push_back(r.second);
  return {{"algorithms", rows}, {"ranking", rank}};
}

std::vector<SeedRun> read_experiment(const std::filesystem::path& dir) {
  const auto summary_path = dir / "summary.json";
  std::ifstream in(summary_path);
  if (!in) throw std::runtime_error("cannot read " + summary_path.string());
  const json summary = json::parse(in);
  std::vector<SeedRun> runs;
  for (const json& s : summary.at("seeds")) {
    SeedRun run;
    run.seed = s.at("seed").get<std::uint64_t>();
    const auto path = dir / s.at("file").get<std::string>();
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    run.records = read_trajectory_csv(f);
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace igahd
