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

// Datasets of scored segments, synthetic scenario generators with known noise
// structure, and the JSON-lines dataset format.
//
// Labeling function shared by every generator:
//
//   f(x) = sum_j sin(pi * x_j)   over the "content" coordinates of x
//
// Noise scale for the heteroscedastic family: sigma(x) = a + b * |x_0|.

#ifndef UQREG_DATAGEN_HPP_
#define UQREG_DATAGEN_HPP_

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uqreg/nn.hpp"

namespace uqreg::data {

struct SegmentRecord {
  std::string id;
  std::vector<double> features;
  double gold_score = 0.0;
  std::optional<std::vector<double>> annotator_scores;
  std::string domain_tag = "in";
  std::optional<std::string> noise_tag;
  // Generator-only ground truth; never part of a TrainingData view.
  std::optional<double> true_sigma;

  bool operator==(const SegmentRecord&) const = default;
};

// What a trainer or predictor may see of a dataset. Oracle fields
// (true_sigma, noise_tag) have no counterpart here.
struct TrainingData {
  std::vector<std::string> ids;
  nn::Matrix features;          // rows = records
  std::vector<double> targets;  // gold scores
  // Per-record annotator scores; empty inner vectors when absent.
  std::vector<std::vector<double>> annotator_scores;

  std::size_t size() const { return ids.size(); }
  int dim() const { return static_cast<int>(features.cols()); }
  TrainingData Rows(std::span<const std::size_t> rows) const;
};

// Immutable collection of records with constant feature dimension and unique
// ids. Reads of oracle fields are counted so experiments can prove that no
// training phase touched them.
class Dataset {
 public:
  Dataset() = default;
  // Throws InvalidInputError on inconsistent dims, duplicate ids, annotator
  // lists with fewer than 2 entries, or a gold score that is not their mean.
  explicit Dataset(std::vector<SegmentRecord> records);

  Dataset(const Dataset& other);
  Dataset& operator=(const Dataset& other);
  Dataset(Dataset&&) noexcept;
  Dataset& operator=(Dataset&&) noexcept;

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  int dim() const { return dim_; }

  const std::string& id(std::size_t i) const { return records_.at(i).id; }
  const std::vector<double>& features(std::size_t i) const {
    return records_.at(i).features;
  }
  double gold(std::size_t i) const { return records_.at(i).gold_score; }
  const std::string& domain_tag(std::size_t i) const {
    return records_.at(i).domain_tag;
  }
  bool has_annotators(std::size_t i) const {
    return records_.at(i).annotator_scores.has_value();
  }

  // Oracle accessors (audited).
  std::optional<double> true_sigma(std::size_t i) const;
  std::optional<std::string> noise_tag(std::size_t i) const;
  // Full records, oracle fields included (audited).
  const std::vector<SegmentRecord>& records() const;

  std::uint64_t oracle_reads() const { return oracle_reads_.load(); }
  void ResetAudit() const { oracle_reads_.store(0); }

  TrainingData ToTrainingData() const;
  Dataset Subset(std::span<const std::size_t> rows) const;
  static Dataset Concat(const Dataset& a, const Dataset& b);

  bool operator==(const Dataset& other) const {
    return records_ == other.records_;
  }

 private:
  std::vector<SegmentRecord> records_;
  int dim_ = 0;
  mutable std::atomic<std::uint64_t> oracle_reads_{0};
};

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

enum class ScenarioKind {
  kHeteroscedastic,
  kMultiAnnotator,
  kDomainShift,
  kReferencePairs,
};

std::string ScenarioKindName(ScenarioKind kind);
ScenarioKind ParseScenarioKind(const std::string& name);

struct SyntheticScenario {
  ScenarioKind kind = ScenarioKind::kHeteroscedastic;
  int d = 4;
  int n = 5000;
  std::uint64_t seed = 0;

  // sigma(x) = noise_a + noise_b * |x_0| (label noise, or annotator spread for
  // the multi-annotator kind).
  double noise_a = 0.1;
  double noise_b = 0.5;

  // Multi-annotator.
  int annotators = 5;
  // Non-empty: stratified annotator spread. Each record falls in a uniformly
  // chosen stratum and the last coordinate becomes a stratum flag in [-1, 1].
  std::vector<double> strata_sigma;

  // Domain shift: OOD records are in-domain draws translated by
  // shift * (random unit vector); noise shape is held fixed relative to the
  // domain.
  double shift = 2.0;
  int n_ood = 0;  // 0 -> same as n

  // Reference pairs: the last `quality_dims` coordinates form the reference
  // quality block, centred at 0 (clean) or log(noise_ratio) (noisy).
  double clean_sigma = 0.1;
  double noise_ratio = 5.0;
  int quality_dims = 1;
  double quality_jitter = 0.25;

  // Throws ConfigError when parameters are out of range.
  void Validate() const;
};

double LabelFunction(std::span<const double> content);
double NoiseScale(const SyntheticScenario& s, std::span<const double> x);

Dataset GenHeteroscedastic(const SyntheticScenario& scenario);
Dataset GenMultiAnnotator(const SyntheticScenario& scenario);
// Returns (in-domain, out-of-domain).
std::pair<Dataset, Dataset> GenDomainShift(const SyntheticScenario& scenario);
Dataset GenReferencePairs(const SyntheticScenario& scenario);
// Dispatches on scenario.kind; domain shift returns in-domain + OOD records
// concatenated (distinguished by domain_tag).
Dataset Generate(const SyntheticScenario& scenario);

// Pair key: id up to the last '/', or the whole id.
std::string GroupKey(const std::string& id);

// Partitions `dataset` into `fractions.size()` disjoint parts. Records sharing
// a GroupKey stay together; groups are balanced across domain_tag strata.
// Fractions must be non-negative and sum to 1.
std::vector<Dataset> Split(const Dataset& dataset,
                           std::span<const double> fractions,
                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// JSON lines
// ---------------------------------------------------------------------------

std::string RecordToJsonLine(const SegmentRecord& record);
// `line_number` is only used in diagnostics.
SegmentRecord RecordFromJsonLine(const std::string& line,
                                 std::size_t line_number);

void SaveDataset(const Dataset& dataset, const std::string& path);
// Throws IoError with a line-numbered message on malformed input.
Dataset LoadDataset(const std::string& path);

}  // namespace uqreg::data

#endif  // UQREG_DATAGEN_HPP_
