#include "igahd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "igahd/dataset.hpp"
#include "igahd/oracle.hpp"
#include "igahd/random.hpp"

namespace igahd {

using nlohmann::json;

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : field + ": " + message),
      field_(std::move(field)) {}

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kQuadratic: return "quadratic";
    case ProblemKind::kRegression: return "regression";
    case ProblemKind::kClassification: return "classification";
  }
  return "unknown";
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kIgahd: return "igahd";
    case Algorithm::kFista: return "fista";
    case Algorithm::kHbf: return "hbf";
    case Algorithm::kSigahd: return "sigahd";
    case Algorithm::kSfista: return "sfista";
    case Algorithm::kShbf: return "shbf";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kIgahd, Algorithm::kFista, Algorithm::kHbf, Algorithm::kSigahd,
                      Algorithm::kSfista, Algorithm::kShbf}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

bool is_stochastic(Algorithm algorithm) {
  return algorithm == Algorithm::kSigahd || algorithm == Algorithm::kSfista ||
         algorithm == Algorithm::kShbf;
}

namespace {

// Programmatic documents carry signed integers; files parse to unsigned ones.
bool is_nonnegative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Every key the schema knows; override paths are checked against this list.
const std::set<std::string>& schema_paths() {
  static const std::set<std::string> paths = {
      "problem", "problem.kind", "problem.matrix", "problem.diagonal", "problem.vector",
      "problem.dataset", "problem.dataset.dim", "problem.dataset.outputs",
      "problem.dataset.n_samples", "problem.dataset.seed", "problem.dataset.noise_std",
      "problem.dataset.mean", "problem.dataset.covariance", "problem.dataset.weights",
      "problem.condition_number", "problem.scaled_feature", "problem.sampling",
      "algorithm",
      "schedule", "schedule.alpha", "schedule.eta", "schedule.allow_eta_one", "schedule.s0",
      "schedule.s0_scale", "schedule.step_exponent", "schedule.step_offset",
      "schedule.batch_coefficient", "schedule.batch_exponent", "schedule.batch_constant",
      "schedule.hbf_damping",
      "errors", "errors.scale", "errors.exponent", "errors.direction",
      "init", "init.low", "init.high", "init.point",
      "seeds", "seeds.first", "seeds.count",
      "max_iter", "epochs", "epoch_length", "record_every", "output",
      "fit", "fit.k_min", "fit.k_max", "fit.burn_in",
      "plateau_tail", "jobs", "diagnostics", "paired",
      "lemma", "lemma.burn_in",
      "modes", "modes.beta",
  };
  return paths;
}

// Reads members of one JSON object and rejects any it did not consume.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    used_.insert(std::string(key));
    const auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  bool has(std::string_view key) const { return obj_.contains(std::string(key)); }

  double number(std::string_view key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(field(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
    return d;
  }

  std::optional<double> optional_number(std::string_view key) {
    if (!has(key) || obj_.at(std::string(key)).is_null()) {
      find(key);
      return std::nullopt;
    }
    return number(key, 0.0);
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!is_nonnegative_integer(*v)) throw ConfigError(field(key), "expected an unsigned integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(std::string_view key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(std::string_view key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

Vector to_vector(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(field, "expected numbers");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Matrix to_matrix(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty array of rows");
  const std::size_t rows = v.size();
  if (!v[0].is_array() || v[0].empty()) throw ConfigError(field, "expected rows of numbers");
  const std::size_t cols = v[0].size();
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) throw ConfigError(field, "ragged matrix");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!v[i][j].is_number()) throw ConfigError(field, "expected numbers");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
    }
  }
  return out;
}

void parse_dataset(Section sec, DatasetConfig& ds) {
  ds.dim = static_cast<int>(sec.integer("dim", ds.dim));
  ds.outputs = static_cast<int>(sec.integer("outputs", ds.outputs));
  ds.n_samples = sec.integer("n_samples", ds.n_samples);
  ds.seed = sec.unsigned_integer("seed", ds.seed);
  ds.noise_std = sec.number("noise_std", ds.noise_std);
  if (const json* v = sec.find("mean")) ds.mean = to_vector(*v, sec.field("mean"));
  if (const json* v = sec.find("covariance"))
    ds.covariance = to_matrix(*v, sec.field("covariance"));
  if (const json* v = sec.find("weights")) ds.weights = to_matrix(*v, sec.field("weights"));
  sec.finish();
  if (ds.dim < 1) throw ConfigError(sec.field("dim"), "must be >= 1");
  if (ds.outputs < 1) throw ConfigError(sec.field("outputs"), "must be >= 1");
  if (ds.n_samples < 1) throw ConfigError(sec.field("n_samples"), "must be >= 1");
  if (ds.noise_std < 0.0) throw ConfigError(sec.field("noise_std"), "must be >= 0");
  if (ds.mean && ds.mean->size() != ds.dim)
    throw ConfigError(sec.field("mean"), "length must equal dim");
  if (ds.covariance && (ds.covariance->rows() != ds.dim || ds.covariance->cols() != ds.dim))
    throw ConfigError(sec.field("covariance"), "must be dim x dim");
  if (ds.weights && (ds.weights->rows() != ds.outputs || ds.weights->cols() != ds.dim))
    throw ConfigError(sec.field("weights"), "must be outputs x dim");
}

void parse_problem(Section sec, ProblemConfig& p) {
  const std::string kind = sec.string("kind", "quadratic");
  if (kind == "quadratic") p.kind = ProblemKind::kQuadratic;
  else if (kind == "regression") p.kind = ProblemKind::kRegression;
  else if (kind == "classification") p.kind = ProblemKind::kClassification;
  else throw ConfigError(sec.field("kind"), "expected quadratic, regression or classification");

  const json* matrix = sec.find("matrix");
  const json* diagonal = sec.find("diagonal");
  const json* vector = sec.find("vector");
  const json* dataset = sec.find("dataset");
  p.condition_number = sec.optional_number("condition_number");
  p.scaled_feature = static_cast<int>(sec.integer("scaled_feature", p.scaled_feature));
  const std::string sampling = sec.string("sampling", "");
  sec.finish();

  if (p.kind == ProblemKind::kQuadratic) {
    if (dataset || p.condition_number || !sampling.empty())
      throw ConfigError(sec.field(dataset ? "dataset" : p.condition_number ? "condition_number"
                                                                           : "sampling"),
                        "not used by quadratic problems");
    if (matrix && diagonal) throw ConfigError(sec.field("diagonal"), "give matrix or diagonal, not both");
    if (matrix) {
      p.matrix = to_matrix(*matrix, sec.field("matrix"));
    } else if (diagonal) {
      p.matrix = to_vector(*diagonal, sec.field("diagonal")).asDiagonal();
    } else {
      throw ConfigError(sec.field("matrix"), "quadratic problems need matrix or diagonal");
    }
    if (p.matrix.rows() != p.matrix.cols()) throw ConfigError(sec.field("matrix"), "must be square");
    p.vector = vector ? to_vector(*vector, sec.field("vector")) : Vector::Zero(p.matrix.rows());
    if (p.vector.size() != p.matrix.rows())
      throw ConfigError(sec.field("vector"), "length must match the matrix");
    return;
  }
  if (matrix || diagonal || vector)
    throw ConfigError(sec.field(matrix ? "matrix" : diagonal ? "diagonal" : "vector"),
                      "only used by quadratic problems");
  if (dataset) parse_dataset(Section(*dataset, sec.field("dataset")), p.dataset);
  if (p.condition_number && !(*p.condition_number >= 1.0))
    throw ConfigError(sec.field("condition_number"), "must be >= 1");
  if (p.condition_number && (p.scaled_feature < 0 || p.scaled_feature >= p.dataset.dim))
    throw ConfigError(sec.field("scaled_feature"), "must index a feature");
  if (!sampling.empty()) {
    try {
      p.sampling = parse_sampling_mode(sampling);
    } catch (const std::exception& e) {
      throw ConfigError(sec.field("sampling"), e.what());
    }
  }
}

void parse_schedule(Section sec, ScheduleConfig& s) {
  s.alpha = sec.number("alpha", s.alpha);
  s.eta = sec.number("eta", s.eta);
  s.allow_eta_one = sec.boolean("allow_eta_one", s.allow_eta_one);
  s.s0 = sec.optional_number("s0");
  s.s0_scale = sec.number("s0_scale", s.s0_scale);
  s.step_exponent = sec.number("step_exponent", s.step_exponent);
  s.step_offset = sec.number("step_offset", s.step_offset);
  s.batch_coefficient = sec.number("batch_coefficient", s.batch_coefficient);
  s.batch_exponent = sec.number("batch_exponent", s.batch_exponent);
  if (sec.has("batch_constant") && !sec.find("batch_constant")->is_null())
    s.batch_constant = sec.integer("batch_constant", 1);
  s.hbf_damping = sec.number("hbf_damping", s.hbf_damping);
  sec.finish();
  if (!(s.alpha >= 3.0)) throw ConfigError(sec.field("alpha"), "must be >= 3 (got " + std::to_string(s.alpha) + ")");
  if (!(s.eta >= 0.0 && s.eta <= 1.0)) throw ConfigError(sec.field("eta"), "must lie in [0, 1]");
  if (s.s0 && sec.has("s0_scale")) throw ConfigError(sec.field("s0_scale"), "give s0 or s0_scale, not both");
  if (s.s0 && !(*s.s0 > 0.0)) throw ConfigError(sec.field("s0"), "must be positive");
  if (!(s.s0_scale > 0.0)) throw ConfigError(sec.field("s0_scale"), "must be positive");
  if (s.step_exponent < 0.0) throw ConfigError(sec.field("step_exponent"), "must be >= 0");
  if (s.step_offset < 0.0) throw ConfigError(sec.field("step_offset"), "must be >= 0");
  if (!(s.batch_coefficient > 0.0)) throw ConfigError(sec.field("batch_coefficient"), "must be positive");
  if (s.batch_exponent < 0.0) throw ConfigError(sec.field("batch_exponent"), "must be >= 0");
  if (s.batch_constant && *s.batch_constant < 1) throw ConfigError(sec.field("batch_constant"), "must be >= 1");
  if (!(s.hbf_damping > 0.0)) throw ConfigError(sec.field("hbf_damping"), "must be positive");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Section root(doc, "");
  const json* problem = root.find("problem");
  if (!problem) throw ConfigError("problem", "missing");
  parse_problem(Section(*problem, "problem"), c.problem);

  const std::string algorithm = root.string("algorithm", "igahd");
  try {
    c.algorithm = parse_algorithm(algorithm);
  } catch (const std::exception& e) {
    throw ConfigError("algorithm", e.what());
  }

  if (const json* v = root.find("schedule")) parse_schedule(Section(*v, "schedule"), c.schedule);

  if (const json* v = root.find("errors"); v && !v->is_null()) {
    Section sec(*v, "errors");
    c.errors.enabled = true;
    c.errors.scale = sec.number("scale", c.errors.scale);
    c.errors.exponent = sec.number("exponent", c.errors.exponent);
    if (const json* d = sec.find("direction")) c.errors.direction = to_vector(*d, "errors.direction");
    sec.finish();
    if (c.errors.scale < 0.0) throw ConfigError("errors.scale", "must be >= 0");
    if (is_stochastic(c.algorithm))
      throw ConfigError("errors", "injected errors apply to deterministic algorithms only");
  }

  if (const json* v = root.find("init")) {
    Section sec(*v, "init");
    c.init.low = sec.number("low", c.init.low);
    c.init.high = sec.number("high", c.init.high);
    if (const json* p = sec.find("point")) c.init.point = to_vector(*p, "init.point");
    sec.finish();
    if (!(c.init.low < c.init.high)) throw ConfigError("init.low", "must be below init.high");
  }

  if (const json* v = root.find("seeds")) {
    c.seeds.clear();
    if (v->is_array()) {
      for (const json& s : *v) {
        if (!is_nonnegative_integer(s)) throw ConfigError("seeds", "expected unsigned integers");
        c.seeds.push_back(s.get<std::uint64_t>());
      }
    } else {
      Section sec(*v, "seeds");
      const std::uint64_t first = sec.unsigned_integer("first", 0);
      const std::uint64_t count = sec.unsigned_integer("count", 1);
      sec.finish();
      for (std::uint64_t i = 0; i < count; ++i) c.seeds.push_back(first + i);
    }
    if (c.seeds.empty()) throw ConfigError("seeds", "need at least one seed");
    std::set<std::uint64_t> unique(c.seeds.begin(), c.seeds.end());
    if (unique.size() != c.seeds.size()) throw ConfigError("seeds", "seeds must be distinct");
  }

  const std::int64_t epochs = root.integer("epochs", 200);
  const std::int64_t epoch_length = root.integer("epoch_length", 50);
  if (epochs < 1) throw ConfigError("epochs", "must be >= 1");
  if (epoch_length < 1) throw ConfigError("epoch_length", "must be >= 1");
  if (root.has("max_iter") && (root.has("epochs") || root.has("epoch_length")))
    throw ConfigError("max_iter", "give max_iter or epochs/epoch_length, not both");
  c.max_iter = root.integer("max_iter", epochs * epoch_length);
  if (c.max_iter < 1) throw ConfigError("max_iter", "must be >= 1");

  c.record_every = root.integer("record_every", c.record_every);
  if (c.record_every < 1) throw ConfigError("record_every", "must be >= 1");
  c.output = root.string("output", c.output);

  if (const json* v = root.find("fit")) {
    Section sec(*v, "fit");
    c.fit.k_min = sec.integer("k_min", c.fit.k_min);
    if (sec.has("k_max")) c.fit.k_max = sec.integer("k_max", 0);
    c.fit.burn_in = sec.number("burn_in", c.fit.burn_in);
    sec.finish();
    if (c.fit.k_min < 1) throw ConfigError("fit.k_min", "must be >= 1");
    if (c.fit.k_max && *c.fit.k_max <= c.fit.k_min) throw ConfigError("fit.k_max", "must exceed fit.k_min");
    if (!(c.fit.burn_in >= 0.0 && c.fit.burn_in < 1.0)) throw ConfigError("fit.burn_in", "must lie in [0, 1)");
  }

  c.plateau_tail = root.number("plateau_tail", c.plateau_tail);
  if (!(c.plateau_tail > 0.0 && c.plateau_tail <= 1.0)) throw ConfigError("plateau_tail", "must lie in (0, 1]");
  c.jobs = static_cast<int>(root.integer("jobs", c.jobs));
  if (c.jobs < 1) throw ConfigError("jobs", "must be >= 1");
  c.diagnostics = root.boolean("diagnostics", c.diagnostics);
  c.paired = root.boolean("paired", c.paired);

  if (const json* v = root.find("lemma")) {
    Section sec(*v, "lemma");
    c.lemma_burn_in = sec.integer("burn_in", c.lemma_burn_in);
    sec.finish();
    if (c.lemma_burn_in < 1) throw ConfigError("lemma.burn_in", "must be >= 1");
  }
  if (const json* v = root.find("modes")) {
    Section sec(*v, "modes");
    c.mode_beta = sec.optional_number("beta");
    sec.finish();
    if (c.mode_beta && *c.mode_beta < 0.0) throw ConfigError("modes.beta", "must be >= 0");
  }
  root.finish();
  return c;
}

void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("", "override '" + item + "' is not KEY=VALUE");
    const std::string path = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    if (!schema_paths().count(path)) throw ConfigError(path, "unknown key in override");
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->is_object()) throw ConfigError(path, "cannot override inside a non-object");
      if (!node->contains(parts[i]) || (*node)[parts[i]].is_null())
        (*node)[parts[i]] = json::object();
      node = &(*node)[parts[i]];
    }
    if (!node->is_object()) throw ConfigError(path, "cannot override inside a non-object");
    (*node)[parts.back()] = std::move(value);
  }
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  apply_overrides(doc, overrides);
  return parse_config(doc);
}

namespace {

SyntheticTask build_task(const ProblemConfig& p) {
  const DatasetConfig& d = p.dataset;
  GaussianDataset ds = default_dataset(d.dim, d.outputs, d.n_samples, d.seed);
  if (d.mean || d.covariance || d.weights) {
    ds = make_dataset(d.mean.value_or(ds.mean), d.covariance.value_or(ds.covariance),
                      d.weights.value_or(ds.true_weights), d.n_samples, d.seed, d.noise_std);
  }
  ds.noise_std = d.noise_std;
  if (p.condition_number) ds = condition_feature(ds, p.scaled_feature, *p.condition_number);
  if (p.kind == ProblemKind::kRegression)
    return generate_regression(ds, p.sampling.value_or(SamplingMode::kMoment));
  return generate_classification(ds, p.sampling.value_or(SamplingMode::kPool));
}

}  // namespace

PreparedExperiment prepare(const ExperimentConfig& config) {
  Problem problem;
  std::shared_ptr<const StochasticOracle> oracle;
  try {
    if (config.problem.kind == ProblemKind::kQuadratic) {
      problem = make_quadratic(config.problem.matrix, config.problem.vector);
      if (is_stochastic(config.algorithm))
        oracle = std::make_shared<ZeroVarianceOracle>(problem);
    } else {
      SyntheticTask task = build_task(config.problem);
      problem = std::move(task.problem);
      if (is_stochastic(config.algorithm)) oracle = std::move(task.oracle);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("problem", e.what());
  }
  if (config.init.point && config.init.point->size() != problem.dim)
    throw ConfigError("init.point", "length must equal the problem dimension " +
                                        std::to_string(problem.dim));
  if (config.errors.direction && config.errors.direction->size() != problem.dim)
    throw ConfigError("errors.direction", "length must equal the problem dimension");

  const ScheduleConfig& s = config.schedule;
  const double s0 = s.s0.value_or(s.s0_scale / problem.lipschitz);
  const StepRule step = s.step_exponent == 0.0 && s.step_offset == 0.0
                            ? StepRule::constant(s0)
                            : StepRule::power(s0, s.step_exponent, s.step_offset);
  const BatchRule batch = s.batch_constant ? BatchRule::constant(*s.batch_constant)
                                           : BatchRule::power(s.batch_coefficient, s.batch_exponent);
  const ScheduleMode mode =
      is_stochastic(config.algorithm) ? ScheduleMode::kStochastic : ScheduleMode::kDeterministic;
  std::optional<ScheduleSet> schedule;
  try {
    // eta = 0 means no Hessian damping; the schedule still needs a valid eta,
    // and the steppers chosen below ignore it.
    schedule.emplace(s.alpha, s.eta == 0.0 ? 0.5 : s.eta, step, mode, BatchRules::uniform(batch),
                     s.allow_eta_one);
  } catch (const std::exception& e) {
    throw ConfigError(s.eta >= 1.0 ? "schedule.eta" : "schedule", e.what());
  }
  try {
    schedule->check_step_bound(problem.lipschitz);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.s0 ? "schedule.s0" : "schedule.s0_scale", e.what());
  }
  const bool hbf = config.algorithm == Algorithm::kHbf || config.algorithm == Algorithm::kShbf;
  if (hbf && !(s.hbf_damping * std::sqrt(s0) < 1.0))
    throw ConfigError("schedule.hbf_damping", "heavy ball needs hbf_damping * sqrt(s0) < 1");
  ErrorInjector injector;
  if (config.errors.enabled) {
    const Vector dir = config.errors.direction.value_or(Vector::Ones(problem.dim));
    if (!(dir.norm() > 0.0)) throw ConfigError("errors.direction", "must be nonzero");
    injector = power_law_errors(dir, config.errors.scale, config.errors.exponent);
  }
  return PreparedExperiment{config, std::move(problem), std::move(oracle), std::move(*schedule),
                            std::move(injector)};
}

bool PreparedExperiment::hessian_damping(Algorithm algorithm) const {
  return (algorithm == Algorithm::kIgahd || algorithm == Algorithm::kSigahd) &&
         config.schedule.eta > 0.0;
}

Stepper PreparedExperiment::stepper(std::optional<Algorithm> algorithm, bool diagnostics) const {
  const Algorithm a = algorithm.value_or(config.algorithm);
  if (is_stochastic(a) && !oracle) throw std::logic_error("stochastic stepper without an oracle");
  switch (a) {
    case Algorithm::kIgahd:
      return hessian_damping(a) ? make_igahd_stepper(problem, schedule, injector)
                                : make_fista_stepper(problem, schedule, injector);
    case Algorithm::kFista:
      return make_fista_stepper(problem, schedule, injector);
    case Algorithm::kHbf:
      return make_hbf_stepper(problem, schedule, config.schedule.hbf_damping, injector);
    case Algorithm::kSigahd:
      return hessian_damping(a) ? make_sigahd_stepper(oracle, schedule, diagnostics)
                                : make_sfista_stepper(oracle, schedule, diagnostics);
    case Algorithm::kSfista:
      return make_sfista_stepper(oracle, schedule, diagnostics);
    case Algorithm::kShbf:
      return make_shbf_stepper(oracle, schedule, config.schedule.hbf_damping, diagnostics);
  }
  throw std::logic_error("unhandled algorithm");
}

Vector PreparedExperiment::initial_point(std::uint64_t seed) const {
  if (config.init.point) return *config.init.point;
  Rng rng(derive_seed(seed, 0x696e6974));  // "init"
  Vector x0(problem.dim);
  for (int i = 0; i < problem.dim; ++i)
    x0(i) = config.init.low + (config.init.high - config.init.low) * rng.uniform();
  return x0;
}

}  // namespace igahd
