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

// Experiment protocols: estimator comparison, noisy-reference detection,
// in-domain vs out-of-domain sharpness, runtime benchmark and the DUP loss
// ablation.
//
// Data protocol shared by all runs. The (in-domain) dataset is split into
// four disjoint parts by group key, balanced over domain tags:
//
//   q     trains every single-step estimator and DUP's quality model
//   e     trains DUP's error model; calibration set for single-step models
//   dev   calibration set (DUP; single-step models use e + dev)
//   test  evaluation
//
// Oracle fields (true_sigma, noise_tag) are only read while scoring; every
// result records the oracle reads observed during training, which must be 0.

#ifndef UQREG_EXPERIMENTS_HPP_
#define UQREG_EXPERIMENTS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uqreg/datagen.hpp"
#include "uqreg/error.hpp"
#include "uqreg/estimators.hpp"
#include "uqreg/metrics.hpp"
#include "uqreg/serialization.hpp"

namespace uqreg::exp {

struct SplitFractions {
  double q = 0.5;
  double e = 0.35;
  double dev = 0.05;
  double test = 0.10;
};

struct ExperimentConfig {
  std::optional<data::SyntheticScenario> scenario;
  std::string dataset;      // JSON-lines file, used when no scenario is set
  std::vector<est::EstimatorConfig> estimators;
  SplitFractions splits;
  std::uint64_t seed = 0;
  std::string output_dir;   // empty: no files written
  est::ModelConfig model;   // defaults for every estimator
  est::TrainingConfig training;
  int bench_repetitions = 3;
  int ece_bins = metrics::kDefaultEceBins;

  // Throws ConfigError.
  void Validate() const;
};

// Top-level keys: scenario, dataset, estimators, splits, seed, output_dir,
// model, training, bench_repetitions, ece_bins. Estimator entries are either a
// kind name or an estimator object; they inherit the top-level model and
// training settings. Without a scenario or dataset the default
// heteroscedastic scenario is used; without an estimator list, every kind
// except KL (which needs annotator scores).
ExperimentConfig ExperimentConfigFromJson(const io::Json& j);
io::Json ToJson(const ExperimentConfig& c);

// Rendered outputs shared by every experiment.
struct ExperimentReport {
  std::string experiment;
  std::string config_hash;
  io::Json json;
  std::string table;
  // (file name, contents) written next to report.json / report.txt.
  std::vector<std::pair<std::string, std::string>> extra_files;

  void Write(const std::string& dir) const;
};

struct EstimatorOutcome {
  std::string label;
  std::optional<metrics::MetricsReport> metrics;
  std::optional<PredictionSet> test_predictions;
  double calibration_scale = 1.0;
  std::string error;  // non-empty when the row failed
  ErrorCode error_code = ErrorCode::kOk;
  bool ok() const { return error.empty(); }
};

struct ComparisonResult {
  std::vector<EstimatorOutcome> rows;
  std::uint64_t oracle_reads_during_training = 0;
  ExperimentReport report;
};

struct NoisyRefRow {
  std::string label;
  std::optional<double> accuracy;  // fraction of pairs where clean < noisy
  std::size_t pairs = 0;
  std::string error;
};

struct NoisyRefResult {
  std::vector<NoisyRefRow> rows;
  std::uint64_t oracle_reads_during_training = 0;
  ExperimentReport report;
};

struct OodRow {
  std::string label;
  std::optional<double> sharpness_in;
  std::optional<double> sharpness_ood;
  std::optional<double> ratio;  // ood / in-domain
  std::string error;
};

struct OodResult {
  std::vector<OodRow> rows;
  std::uint64_t oracle_reads_during_training = 0;
  ExperimentReport report;
};

struct BenchRow {
  std::string label;
  std::vector<double> train_seconds;
  std::vector<double> inference_seconds;
  double train_median = 0.0;
  double inference_median = 0.0;
  std::string error;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  ExperimentReport report;
};

ComparisonResult RunComparison(const ExperimentConfig& config);
NoisyRefResult RunNoisyReference(const ExperimentConfig& config);
OodResult RunOodSharpness(const ExperimentConfig& config);
BenchResult RunBench(const ExperimentConfig& config);
// Trains one DUP pipeline per loss (ABS, SQ, HTS) from the first DUP entry
// in config.estimators (or defaults), ignoring other estimators.
ComparisonResult RunDupAblation(const ExperimentConfig& config);

// Aligned text table with best values marked by '*' (ties marked jointly).
std::string RenderMetricsTable(const std::vector<EstimatorOutcome>& rows);

double Median(std::vector<double> values);

}  // namespace uqreg::exp

#endif  // UQREG_EXPERIMENTS_HPP_
