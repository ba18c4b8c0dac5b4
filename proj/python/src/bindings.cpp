#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "igahd/bench.hpp"
#include "igahd/config.hpp"
#include "igahd/modes.hpp"
#include "igahd/problem.hpp"

namespace py = pybind11;
using namespace igahd;

namespace {

ExperimentConfig config_from(const std::string& text, const std::vector<std::string>& overrides) {
  nlohmann::json doc = nlohmann::json::parse(text);
  apply_overrides(doc, overrides);
  return parse_config(doc);
}

// Column-major view of one seed's records: {field: ndarray}.
py::dict records_to_columns(const std::vector<TrajectoryRecord>& records) {
  static const char* fields[] = {"k",          "objective_gap", "grad_norm_x", "grad_norm_y",
                                 "velocity",   "step_size",     "batch_x",     "batch_xm",
                                 "batch_y",    "lyapunov",      "sigma_x",     "sigma_xm",
                                 "sigma_y"};
  py::dict out;
  for (const char* f : fields) {
    const std::vector<double> col = field_series(records, f);
    out[f] = py::array_t<double>(static_cast<py::ssize_t>(col.size()), col.data());
  }
  py::list status;
  for (const auto& r : records) status.append(r.status);
  out["status"] = status;
  return out;
}

}  // namespace

PYBIND11_MODULE(_igahd, m) {
  m.doc() = "Inertial gradient methods with Hessian-driven damping";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Problem>(m, "Problem")
      .def_readonly("dim", &Problem::dim)
      .def_readonly("lipschitz", &Problem::lipschitz)
      .def_readonly("min_value", &Problem::min_value)
      .def_readonly("minimizer", &Problem::minimizer)
      .def_readonly("name", &Problem::name)
      .def("value", [](const Problem& p, const Vector& x) { return p.value(x); }, py::arg("x"))
      .def("gradient", [](const Problem& p, const Vector& x) { return p.gradient(x); },
           py::arg("x"))
      .def("gap", &Problem::gap, py::arg("x"));

  m.def("make_quadratic", &make_quadratic, py::arg("a"), py::arg("b"),
        "f(x) = 1/2 <Ax, x> - <b, x> for symmetric positive semidefinite A.");
  m.def("condition_number", &condition_number, py::arg("a"));

  m.def(
      "validate_config",
      [](const std::string& text, const std::vector<std::string>& overrides) {
        prepare(config_from(text, overrides));
      },
      py::arg("config_json"), py::arg("overrides") = std::vector<std::string>{},
      "Raises ConfigError when the configuration would be rejected by run.");

  m.def(
      "run_experiment",
      [](const std::string& text, const std::vector<std::string>& overrides, int jobs) {
        const PreparedExperiment prep = prepare(config_from(text, overrides));
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          RunControl control;
          control.jobs = jobs;
          result = run_experiment(prep, control);
        }
        py::dict runs;
        for (const SeedRun& r : result.runs) runs[py::int_(r.seed)] = records_to_columns(r.records);
        return py::make_tuple(result.summary.dump(), runs);
      },
      py::arg("config_json"), py::arg("overrides") = std::vector<std::string>{},
      py::arg("jobs") = 1);

  m.def(
      "check_lemma",
      [](const std::string& text, const std::vector<std::string>& overrides) {
        const PreparedExperiment prep = prepare(config_from(text, overrides));
        py::list out;
        for (std::uint64_t seed : prep.config.seeds) {
          const LemmaRun run = check_lemma_run(prep, seed);
          py::dict d;
          d["seed"] = run.seed;
          d["skipped"] = run.skipped;
          d["steps"] = run.steps;
          d["violations"] = run.violations;
          d["early_violations"] = run.early_violations;
          d["first_satisfied"] = run.first_satisfied;
          d["worst_excess"] = run.worst_excess;
          out.append(d);
        }
        return out;
      },
      py::arg("config_json"), py::arg("overrides") = std::vector<std::string>{});

  m.def(
      "fit_rate",
      [](const std::vector<std::int64_t>& ks, const std::vector<double>& values,
         std::int64_t k_min, std::int64_t k_max, double burn_in) {
        const RateFit f = fit_rate(ks, values, k_min, k_max, burn_in);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["r2"] = f.r2;
        d["points"] = f.points;
        d["zeros_excluded"] = f.zeros_excluded;
        return d;
      },
      py::arg("ks"), py::arg("values"), py::arg("k_min"), py::arg("k_max"),
      py::arg("burn_in") = 0.1, "Log-log least-squares slope of values against k.");

  py::class_<ModeParams>(m, "ModeParams")
      .def(py::init([](double lambda, double alpha, double beta, double b, double gamma) {
             ModeParams p{lambda, alpha, beta, b, gamma};
             p.validate();
             return p;
           }),
           py::arg("lam"), py::arg("alpha") = 3.0, py::arg("beta") = 0.0, py::arg("b") = 1.0,
           py::arg("gamma") = 0.0)
      .def_readonly("lam", &ModeParams::lambda)
      .def_readonly("alpha", &ModeParams::alpha)
      .def_readonly("beta", &ModeParams::beta)
      .def_readonly("b", &ModeParams::b)
      .def_readonly("gamma", &ModeParams::gamma)
      .def("regime", [](const ModeParams& p) { return std::string(to_string(p.regime())); });

  m.def(
      "envelope",
      [](const ModeParams& p) {
        const Envelope e = envelope(p);
        py::dict d;
        d["regime"] = std::string(to_string(e.regime));
        d["decay_rate"] = e.decay_rate;
        d["power"] = e.power;
        d["leading_rate"] = e.leading_rate;
        d["imaginary_zeta"] = e.imaginary_zeta;
        return d;
      },
      py::arg("params"));

  m.def(
      "integrate_mode",
      [](const ModeParams& p, double x0, double v0, double t0, double t_end, double dt) {
        const ModeTrajectory tr = integrate_mode(p, x0, v0, t0, t_end, dt);
        return py::make_tuple(py::array_t<double>(tr.t.size(), tr.t.data()),
                              py::array_t<double>(tr.x.size(), tr.x.data()),
                              py::array_t<double>(tr.v.size(), tr.v.data()));
      },
      py::arg("params"), py::arg("x0"), py::arg("v0"), py::arg("t0"), py::arg("t_end"),
      py::arg("dt"), "RK4 solution of one scalar mode; returns (t, x, v).");

  m.def("max_mode_dt", &max_mode_dt, py::arg("params"));

  m.def(
      "mode_report_csv",
      [](const std::string& text, const std::vector<std::string>& overrides) {
        const PreparedExperiment prep = prepare(config_from(text, overrides));
        const ExperimentConfig& cfg = prep.config;
        const ModeReport report = discrete_vs_mode(
            prep.problem, prep.schedule, cfg.max_iter, prep.initial_point(cfg.seeds.front()),
            prep.hessian_damping(cfg.algorithm), cfg.mode_beta);
        std::ostringstream out;
        write_mode_csv(out, report);
        return out.str();
      },
      py::arg("config_json"), py::arg("overrides") = std::vector<std::string>{});
}
