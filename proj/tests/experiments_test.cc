/*
 * Copyright 2026 The uqreg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "uqreg/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "uqreg/error.hpp"

namespace uqreg::exp {
namespace {

ExperimentConfig Small(data::ScenarioKind kind, int n,
                       const std::string& estimators) {
  io::Json j = {{"scenario", {{"kind", data::ScenarioKindName(kind)}, {"n", n}}},
                {"estimators", estimators},
                {"seed", 1},
                {"training", {{"epochs", 15}, {"learning_rate", 3e-3}}},
                {"model", {{"hidden_sizes", {32, 32}}}}};
  return ExperimentConfigFromJson(j);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ConfigTest, ParsesAndDefaults) {
  const ExperimentConfig c = ExperimentConfigFromJson(io::Json::object());
  ASSERT_TRUE(c.scenario.has_value());
  EXPECT_EQ(c.scenario->kind, data::ScenarioKind::kHeteroscedastic);
  ASSERT_EQ(c.estimators.size(), 5u);
  for (const auto& e : c.estimators) EXPECT_NE(e.kind, est::EstimatorKind::kKl);

  const ExperimentConfig s = Small(data::ScenarioKind::kHeteroscedastic, 100,
                                   "MCD,HTS");
  ASSERT_EQ(s.estimators.size(), 2u);
  EXPECT_EQ(s.estimators[1].kind, est::EstimatorKind::kHts);
  EXPECT_EQ(s.estimators[1].training.epochs, 15);
  EXPECT_EQ(s.estimators[1].model.hidden_sizes, (std::vector<int>{32, 32}));

  const io::Json array = {{"estimators",
                           {{{"kind", "DUP"}, {"dup_loss", "ABS"}}, "HTS"}}};
  const ExperimentConfig a = ExperimentConfigFromJson(array);
  EXPECT_EQ(a.estimators[0].Label(), "DUP[ABS]");
  EXPECT_EQ(ExperimentConfigFromJson(ToJson(a)).estimators[0].Label(),
            "DUP[ABS]");
}

TEST(ConfigTest, RejectsBadInput) {
  EXPECT_THROW(ExperimentConfigFromJson({{"colour", 1}}), ConfigError);
  EXPECT_THROW(ExperimentConfigFromJson({{"estimators", "MCD,GP"}}), ConfigError);
  EXPECT_THROW(ExperimentConfigFromJson({{"splits", {{"q", 0.9}}}}), ConfigError);
  EXPECT_THROW(ExperimentConfigFromJson({{"training", {{"epochs", "many"}}}}),
               ConfigError);
  EXPECT_THROW(ExperimentConfigFromJson({{"scenario", {{"kind", "gaussian"}}}}),
               ConfigError);
}

TEST(Median, Examples) {
  EXPECT_DOUBLE_EQ(Median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(Median({4.0, 1.0}), 2.5);
}

TEST(Comparison, IsolatesFailingRows) {
  ExperimentConfig c =
      Small(data::ScenarioKind::kHeteroscedastic, 2000, "HTS,MCD,KL");
  c.estimators[0].training.epochs = 40;
  c.estimators[1].model.dropout_rate = 0.0;
  const ComparisonResult r = RunComparison(c);
  ASSERT_EQ(r.rows.size(), 3u);
  ASSERT_TRUE(r.rows[0].ok()) << r.rows[0].error;
  ASSERT_TRUE(r.rows[0].metrics->ups.has_value());
  EXPECT_GT(*r.rows[0].metrics->ups, 0.0);
  EXPECT_FALSE(r.rows[1].ok());
  EXPECT_NE(r.rows[1].error.find("dropout"), std::string::npos);
  EXPECT_FALSE(r.rows[2].ok());
  EXPECT_EQ(r.oracle_reads_during_training, 0u);
  EXPECT_NE(r.report.table.find("failed:"), std::string::npos);
  EXPECT_EQ(r.report.json["results"].size(), 3u);
}

TEST(Comparison, ReportsAreReproducible) {
  const std::string base =
      (std::filesystem::temp_directory_path() / "uqreg_exp_repro").string();
  std::filesystem::remove_all(base);
  ExperimentConfig c = Small(data::ScenarioKind::kHeteroscedastic, 600, "HTS,DUP");
  c.output_dir = base + "/a";
  RunComparison(c).report.Write(c.output_dir);
  c.output_dir = base + "/b";
  RunComparison(c).report.Write(c.output_dir);
  for (const char* f : {"report.json", "report.txt"}) {
    const std::string a = ReadFile(base + "/a/" + f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, ReadFile(base + "/b/" + f)) << f;
  }
  EXPECT_TRUE(std::filesystem::exists(base + "/a/predictions_HTS.csv"));
  std::filesystem::remove_all(base);
}

TEST(NoisyReference, UnitRatioIsChance) {
  ExperimentConfig c = Small(data::ScenarioKind::kReferencePairs, 4000, "HTS");
  c.scenario->noise_ratio = 1.0;
  const NoisyRefResult r = RunNoisyReference(c);
  ASSERT_EQ(r.rows.size(), 1u);
  ASSERT_TRUE(r.rows[0].accuracy.has_value()) << r.rows[0].error;
  EXPECT_GE(r.rows[0].pairs, 300u);
  EXPECT_NEAR(*r.rows[0].accuracy, 0.5, 0.08);
  EXPECT_EQ(r.oracle_reads_during_training, 0u);
}

TEST(NoisyReference, RequiresPairedData) {
  const NoisyRefResult r =
      RunNoisyReference(Small(data::ScenarioKind::kHeteroscedastic, 200, "HTS"));
  for (const auto& row : r.rows) EXPECT_FALSE(row.accuracy.has_value());
}

TEST(Ood, ZeroShiftKeepsSharpness) {
  ExperimentConfig c = Small(data::ScenarioKind::kDomainShift, 2000, "HTS");
  c.scenario->shift = 0.0;
  const OodResult r = RunOodSharpness(c);
  ASSERT_EQ(r.rows.size(), 1u);
  ASSERT_TRUE(r.rows[0].ratio.has_value()) << r.rows[0].error;
  EXPECT_GE(*r.rows[0].ratio, 0.8);
  EXPECT_LE(*r.rows[0].ratio, 1.25);
}

TEST(Bench, TimesEveryRepetition) {
  ExperimentConfig c = Small(data::ScenarioKind::kHeteroscedastic, 300, "HTS");
  c.bench_repetitions = 2;
  const BenchResult r = RunBench(c);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].train_seconds.size(), 2u);
  EXPECT_EQ(r.rows[0].inference_seconds.size(), 2u);
  EXPECT_GT(r.rows[0].train_median, 0.0);
}

TEST(Ablation, RunsAllThreeLosses) {
  const ComparisonResult r =
      RunDupAblation(Small(data::ScenarioKind::kHeteroscedastic, 600, "DUP"));
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].label, "DUP[ABS]");
  EXPECT_EQ(r.rows[1].label, "DUP[SQ]");
  EXPECT_EQ(r.rows[2].label, "DUP[HTS]");
  for (const auto& row : r.rows) EXPECT_TRUE(row.ok()) << row.error;
}

TEST(Table, MarksBestAndTies) {
  metrics::MetricsReport m;
  m.pps = 0.5;
  m.ups = 0.2;
  m.nll = 1.0;
  m.ece = 0.05;
  m.sharpness = 0.3;
  m.n = 10;
  EstimatorOutcome a{"A", m, std::nullopt, 1.0, "", ErrorCode::kOk};
  EstimatorOutcome b = a;
  b.label = "B";
  b.metrics->ups = 0.1;
  b.metrics->nll = 1.00001;
  EstimatorOutcome failed{"C", std::nullopt, std::nullopt, 1.0, "boom",
                          ErrorCode::kTraining};
  const std::string t = RenderMetricsTable({a, b, failed});
  std::istringstream lines(t);
  std::string header, rule, row_a, row_b, row_c;
  std::getline(lines, header);
  std::getline(lines, rule);
  std::getline(lines, row_a);
  std::getline(lines, row_b);
  std::getline(lines, row_c);
  EXPECT_NE(header.find("Sharpness"), std::string::npos);
  EXPECT_NE(row_a.find("0.2000*"), std::string::npos);
  EXPECT_EQ(row_b.find("0.1000*"), std::string::npos);
  // Equal at printed precision: both rows are marked.
  EXPECT_NE(row_a.find("1.0000*"), std::string::npos);
  EXPECT_NE(row_b.find("1.0000*"), std::string::npos);
  EXPECT_NE(row_c.find("failed: boom"), std::string::npos);
}

}  // namespace
}  // namespace uqreg::exp
