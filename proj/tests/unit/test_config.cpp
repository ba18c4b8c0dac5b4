#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "igahd/config.hpp"

namespace igahd {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json minimal() {
  return {{"problem", {{"kind", "quadratic"}, {"diagonal", {1.0, 10.0}}}}};
}

// Field reported by the ConfigError raised for `doc`, or "<none>".
std::string error_field(const json& doc) {
  try {
    prepare(parse_config(doc));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

TEST(Config, DefaultsForAMinimalDocument) {
  const ExperimentConfig c = parse_config(minimal());
  EXPECT_EQ(c.problem.kind, ProblemKind::kQuadratic);
  EXPECT_EQ(c.algorithm, Algorithm::kIgahd);
  EXPECT_DOUBLE_EQ(c.schedule.alpha, 3.1);
  EXPECT_EQ(c.seeds, std::vector<std::uint64_t>{0});
  EXPECT_EQ(c.record_every, 1);
  EXPECT_EQ(c.problem.matrix.rows(), 2);
  EXPECT_DOUBLE_EQ(c.problem.matrix(1, 1), 10.0);
  EXPECT_EQ(c.problem.vector.size(), 2);
}

TEST(Config, ShippedConfigsValidate) {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(IGAHD_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    EXPECT_NO_THROW(prepare(load_config(entry.path()))) << entry.path();
  }
  EXPECT_GE(seen, 4u);
}

TEST(Config, SeedForms) {
  json doc = minimal();
  doc["seeds"] = {3, 1, 4};
  EXPECT_EQ(parse_config(doc).seeds, (std::vector<std::uint64_t>{3, 1, 4}));
  doc["seeds"] = {{"first", 10}, {"count", 3}};
  EXPECT_EQ(parse_config(doc).seeds, (std::vector<std::uint64_t>{10, 11, 12}));
  doc["seeds"] = {-1};
  EXPECT_EQ(error_field(doc), "seeds");
}

TEST(Config, UnknownKeysAreRejectedWithTheirPath) {
  json doc = minimal();
  doc["colour"] = "blue";
  EXPECT_EQ(error_field(doc), "colour");
  doc = minimal();
  doc["schedule"] = {{"alpah", 3.1}};
  EXPECT_EQ(error_field(doc), "schedule.alpah");
  doc = {{"problem", {{"kind", "regression"}, {"dataset", {{"dims", 3}}}}}};
  EXPECT_EQ(error_field(doc), "problem.dataset.dims");
  doc = minimal();
  doc["problem"]["dataset"] = {{"dim", 3}};
  EXPECT_EQ(error_field(doc), "problem.dataset");
}

TEST(Config, PreconditionsNameTheirField) {
  struct Case {
    const char* path;
    json value;
    const char* field;
  };
  const std::vector<Case> cases = {
      {"/schedule/alpha", 2.9, "schedule.alpha"},
      {"/schedule/eta", 1.5, "schedule.eta"},
      {"/schedule/s0", 0.2, "schedule.s0"},  // L = 10
      {"/schedule/s0_scale", 1.01, "schedule.s0_scale"},
      {"/schedule/step_exponent", -0.5, "schedule.step_exponent"},
      {"/max_iter", 0, "max_iter"},
      {"/record_every", 0, "record_every"},
      {"/algorithm", "adam", "algorithm"},
      {"/problem/kind", "lasso", "problem.kind"},
      {"/errors", {{"scale", -1.0}}, "errors.scale"},
  };
  for (const Case& c : cases) {
    json doc = minimal();
    doc[json::json_pointer(c.path)] = c.value;
    EXPECT_EQ(error_field(doc), c.field) << c.path;
  }
}

TEST(Config, StochasticSchedules) {
  json doc = minimal();
  doc["algorithm"] = "sigahd";
  const PreparedExperiment p = prepare(parse_config(doc));
  ASSERT_NE(p.oracle, nullptr);  // exact gradients behind the stochastic interface
  doc["errors"] = {{"scale", 1.0}};
  EXPECT_EQ(error_field(doc), "errors");

  doc = {{"problem", {{"kind", "regression"}, {"dataset", {{"dim", 3}}}}}, {"algorithm", "sigahd"}};
  EXPECT_EQ(error_field(doc), "<none>");
  doc["schedule"] = {{"eta", 1.0}};
  EXPECT_EQ(error_field(doc), "schedule.eta");
  doc["schedule"]["allow_eta_one"] = true;
  EXPECT_EQ(error_field(doc), "<none>");
}

TEST(Config, QuadraticMustBeConvex) {
  json doc = minimal();
  doc["problem"]["diagonal"] = {1.0, -1.0};
  EXPECT_EQ(error_field(doc).rfind("problem", 0), 0u);
  doc = {{"problem", {{"kind", "quadratic"}, {"matrix", {{1.0, 2.0}, {0.0, 1.0}}}}}};
  EXPECT_EQ(error_field(doc).rfind("problem", 0), 0u);
}

TEST(Config, OverridesAddressSchemaKeys) {
  json doc = minimal();
  apply_overrides(doc, {"schedule.alpha=5", "algorithm=fista", "seeds=[7]", "problem.dataset.seed=3"});
  EXPECT_EQ(doc["schedule"]["alpha"], 5);
  EXPECT_EQ(doc["algorithm"], "fista");
  EXPECT_EQ(doc["seeds"], json::array({7}));
  EXPECT_EQ(doc["problem"]["dataset"]["seed"], 3);
  EXPECT_EQ(doc["problem"]["kind"], "quadratic");  // siblings untouched

  doc["problem"].erase("dataset");
  const ExperimentConfig c = parse_config(doc);
  EXPECT_DOUBLE_EQ(c.schedule.alpha, 5.0);
  EXPECT_EQ(c.algorithm, Algorithm::kFista);

  for (const std::string bad : {"schedule.alpah=5", "noequals", "=5", "colour=red"}) {
    json d = minimal();
    EXPECT_THROW(apply_overrides(d, {bad}), ConfigError) << bad;
  }
}

TEST(Config, LaterOverridesWin) {
  json doc = minimal();
  apply_overrides(doc, {"max_iter=10", "max_iter=20"});
  EXPECT_EQ(parse_config(doc).max_iter, 20);
}

class ConfigFile : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = fs::temp_directory_path() /
            (std::string("igahd_cfg_") + ::testing::UnitTest::GetInstance()->current_test_info()->name() +
             ".json");
  }
  void TearDown() override { fs::remove(path_); }
  void write(const std::string& text) { std::ofstream(path_) << text; }
  fs::path path_;
};

TEST_F(ConfigFile, SyntaxErrorsReportTheLine) {
  write("{\n  \"max_iter\": 10,\n  \"seeds\": [1,,2]\n}\n");
  try {
    load_config(path_);
    FAIL() << "expected an error";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(path_.string()), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
}

TEST_F(ConfigFile, MissingFileIsAConfigError) {
  EXPECT_THROW(load_config(path_), ConfigError);
}

TEST_F(ConfigFile, OverridesApplyBeforeValidation) {
  write(minimal().dump());
  EXPECT_THROW(load_config(path_, {"schedule.alpha=2"}), ConfigError);
  EXPECT_DOUBLE_EQ(load_config(path_, {"schedule.alpha=4"}).schedule.alpha, 4.0);
}

TEST(Config, PreparedExperimentMatchesTheConfig) {
  json doc = minimal();
  doc["problem"]["vector"] = {1.0, 1.0};
  doc["schedule"] = {{"alpha", 3.5}, {"eta", 0.5}, {"s0_scale", 0.5}};
  doc["init"] = {{"point", {2.0, -2.0}}};
  const PreparedExperiment p = prepare(parse_config(doc));
  EXPECT_DOUBLE_EQ(p.problem.lipschitz, 10.0);
  EXPECT_DOUBLE_EQ(p.schedule.step(1), 0.05);
  EXPECT_DOUBLE_EQ(p.schedule.step(1000), 0.05);
  EXPECT_DOUBLE_EQ(p.schedule.alpha_k(10), 1.0 - 3.5 / 10.0);
  EXPECT_EQ(p.initial_point(0), (Vector{{2.0, -2.0}}));
  EXPECT_TRUE(p.hessian_damping(Algorithm::kIgahd));
  EXPECT_FALSE(p.hessian_damping(Algorithm::kFista));
  EXPECT_EQ(p.oracle, nullptr);

  doc.erase("init");
  const PreparedExperiment q = prepare(parse_config(doc));
  EXPECT_EQ(q.initial_point(3), q.initial_point(3));
  EXPECT_NE(q.initial_point(3), q.initial_point(4));
  EXPECT_LE(q.initial_point(3).cwiseAbs().maxCoeff(), 1.0);
}

}  // namespace
}  // namespace igahd
