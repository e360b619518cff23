// Copyright 2026 The mnlkb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mnlkb/config.hpp"
#include "mnlkb/errors.hpp"
#include "mnlkb/io.hpp"
#include "test_util.hpp"

namespace mnlkb {
namespace {

namespace fs = std::filesystem;

constexpr const char* kValid = R"({
  "instance": {"revenues": [1.0, 0.5], "utilities": [0.4, 0.8],
               "inventories": [10, 20], "cardinality_cap": 1, "horizon": 50},
  "replications": 3,
  "seed": 9,
  "policies": ["oracle_static",
               {"policy": "ucb_knapsack", "label": "manual", "omega_mode": "manual",
                "omega": 0.2, "oracle_mode": "dp", "eps_oracle": 0.1}],
  "horizons": [50, 100],
  "diagnostics": {"coverage": true, "assortment": [2]},
  "output": {"epochs_csv": true}
})";

std::string with(const std::string& from, const std::string& to) {
  std::string s = kValid;
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

void expect_config_error(const std::string& text, const std::string& needle) {
  try {
    parse_config(text);
    FAIL() << "expected a config error mentioning " << needle;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(ParseConfigTest, ReadsEveryField) {
  const auto cfg = parse_config(kValid);
  ASSERT_TRUE(cfg.instance.has_value());
  EXPECT_EQ(cfg.instance->n_products, 2);
  EXPECT_EQ(cfg.instance->inventories, (std::vector<std::int64_t>{10, 20}));
  EXPECT_EQ(cfg.replications, 3);
  EXPECT_EQ(cfg.seed, 9u);
  ASSERT_EQ(cfg.policies.size(), 2u);
  EXPECT_EQ(cfg.policies[0].kind, PolicyKind::kOracleStatic);
  EXPECT_EQ(cfg.policies[1].label, "manual");
  EXPECT_EQ(cfg.policies[1].config.omega_mode, OmegaMode::kManual);
  EXPECT_EQ(cfg.policies[1].config.omega_manual, 0.2);
  EXPECT_EQ(cfg.policies[1].config.oracle_mode, OracleMode::kDp);
  EXPECT_EQ(cfg.policies[1].config.eps_oracle, 0.1);
  EXPECT_EQ(cfg.horizons, (std::vector<int>{50, 100}));
  EXPECT_TRUE(cfg.diagnostics.coverage);
  EXPECT_FALSE(cfg.diagnostics.unbiasedness);
  EXPECT_EQ(*cfg.diagnostics.assortment, Assortment({1}));
  EXPECT_TRUE(cfg.write_epochs);
}

TEST(ParseConfigTest, DefaultsToTheKnapsackPolicy) {
  const auto cfg = parse_config(R"({"generator": {"n_products": 3,
      "cardinality_cap": 2, "horizon": 30}})");
  ASSERT_EQ(cfg.policies.size(), 1u);
  EXPECT_EQ(cfg.policies[0].kind, PolicyKind::kUcbKnapsack);
  EXPECT_TRUE(cfg.generator.has_value());
}

TEST(ParseConfigTest, RejectsUnknownKeysEverywhere) {
  expect_config_error(with("\"seed\"", "\"sede\""), "$.sede");
  expect_config_error(with("\"horizon\": 50", "\"horizon\": 50, \"extra\": 1"),
                      "instance.extra");
  expect_config_error(with("\"label\"", "\"lable\""), "policies[1].lable");
  expect_config_error(with("\"coverage\"", "\"covrage\""), "diagnostics.covrage");
  expect_config_error(with("\"epochs_csv\"", "\"epoch_csv\""), "output.epoch_csv");
}

TEST(ParseConfigTest, RejectsBadValues) {
  expect_config_error(with("\"replications\": 3", "\"replications\": \"3\""),
                      "replications");
  expect_config_error(with("\"replications\": 3", "\"replications\": 0"),
                      "replications");
  expect_config_error(with("\"oracle_static\",", "\"greedy\","), "greedy");
  expect_config_error(with("\"omega_mode\": \"manual\",", ""), "omega");
  expect_config_error(with("\"manual\", \"omega_mode\"", "\"oracle_static\", \"omega_mode\""),
                      "duplicate");
  expect_config_error(with("\"utilities\": [0.4, 0.8]", "\"utilities\": [0.4, 1.8]"),
                      "utilities");
  expect_config_error(with("[2]", "[0]"), "1-based");
  expect_config_error("{", "malformed");
  expect_config_error(R"({"replications": 2})", "instance");
}

TEST(LoadConfigTest, MissingFileNamesThePath) {
  try {
    load_config("/nonexistent/dir/cfg.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/cfg.json"),
              std::string::npos);
  }
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("mnlkb_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TEST(WriteFileAtomicTest, ReplacesContentsWithoutLeftovers) {
  TempDir dir;
  const auto file = dir.path() / "runs.csv";
  write_file_atomic(file, "first\n");
  write_file_atomic(file, "second\n");
  EXPECT_EQ(slurp(file), "second\n");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++entries;
  EXPECT_EQ(entries, 1);
  EXPECT_THROW(write_file_atomic(dir.path() / "missing" / "x.csv", "x"),
               std::runtime_error);
}

TEST(WritersTest, RunsCsvHasTheFixedColumns) {
  ExperimentResult res;
  res.runs.push_back({0, "ucb_knapsack", 12.5, 12.0, 40, 3.25});
  EXPECT_EQ(runs_csv(res),
            "replication,policy,revenue,stop_time,regret\n"
            "0,ucb_knapsack,12.5,40,3.25\n");
}

TEST(WritersTest, DistributionCsvUsesOneBasedIds) {
  const SparseDistribution dist({{Assortment{}, 0.5}, {Assortment({0, 2}), 0.5}});
  EXPECT_EQ(distribution_csv(dist), "assortment,weight\n{},0.5\n{1 3},0.5\n");
}

TEST(WritersTest, EpochsCsvListsCounts) {
  ExperimentResult res;
  EpochRecord rec;
  rec.epoch = 2;
  rec.start = 5;
  rec.complete = true;
  rec.outcome.assortment = Assortment({0, 1});
  rec.outcome.purchase_counts = {2, 1};
  rec.outcome.length = 4;
  res.epochs.push_back({1, "p", rec});
  EXPECT_EQ(epochs_csv(res),
            "replication,policy,epoch,start,length,complete,assortment,purchases\n"
            "1,p,2,5,4,1,{1 2},{2 1}\n");
}

TEST(WritersTest, DiagnosticsJsonIsValidAndNullsNonFiniteValues) {
  ScalingResult scaling;
  scaling.policy = "ucb_knapsack";
  scaling.rows.push_back({100, 25.0, 3.0, 0.5, 22.0});
  scaling.slope = std::numeric_limits<double>::quiet_NaN();
  DiagnosticReport report;
  report.checks.push_back({"coverage", true, 1.0, 0.99, 1.0, "ok"});
  const auto doc = nlohmann::json::parse(diagnostics_json(nullptr, &report, &scaling));
  EXPECT_TRUE(doc["regret_scaling"]["slope"].is_null());
  EXPECT_EQ(doc["regret_scaling"]["rows"][0]["horizon"], 100);
  EXPECT_TRUE(doc["diagnostics"]["all_passed"].get<bool>());
  EXPECT_FALSE(doc.contains("opt"));
}

TEST(WritersTest, RegretSvgDrawsOnePolyline) {
  ScalingResult scaling;
  scaling.rows = {{100, 1, 2.0, 0, 0}, {200, 1, 3.0, 0, 0}, {400, 1, 4.5, 0, 0}};
  scaling.slope = 0.58;
  const auto svg = regret_svg(scaling);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_EQ(svg.find("<polyline", svg.find("<polyline") + 1), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(WritersTest, ScalingCsv) {
  ScalingResult scaling;
  scaling.rows = {{100, 25, 2.0, 0.1, 23}};
  EXPECT_EQ(scaling_csv(scaling),
            "horizon,opt,mean_regret,se_regret,mean_revenue\n100,25,2,0.1,23\n");
}

}  // namespace
}  // namespace mnlkb
