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

#include "uqreg/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "uqreg/error.hpp"
#include "uqreg/random.hpp"

namespace uqreg::data {
namespace {

using json = nlohmann::json;

// Streams of the scenario seed used by each generator.
enum Stream : std::uint64_t {
  kFeatureStream = 11,
  kNoiseStream = 12,
  kShiftStream = 13,
  kOodStream = 14,
};

std::string PaddedId(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%06d", prefix, i);
  return buf;
}

std::vector<double> UniformPoint(RandomEngine& rng, int d) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> x(d);
  for (double& v : x) v = unif(rng);
  return x;
}

double Mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// TrainingData / Dataset
// ---------------------------------------------------------------------------

TrainingData TrainingData::Rows(std::span<const std::size_t> rows) const {
  TrainingData out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t i = rows[k];
    out.ids.push_back(ids.at(i));
    out.features.row(static_cast<Eigen::Index>(k)) =
        features.row(static_cast<Eigen::Index>(i));
    out.targets.push_back(targets.at(i));
    out.annotator_scores.push_back(annotator_scores.at(i));
  }
  return out;
}

Dataset::Dataset(std::vector<SegmentRecord> records)
    : records_(std::move(records)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const SegmentRecord& r = records_[i];
    if (!seen.insert(r.id).second) {
      throw InvalidInputError("duplicate id '" + r.id + "'");
    }
    const int d = static_cast<int>(r.features.size());
    if (d < 1) throw InvalidInputError("record '" + r.id + "' has no features");
    if (i == 0) dim_ = d;
    if (d != dim_) {
      throw InvalidInputError("record '" + r.id + "' has " + std::to_string(d) +
                              " features, expected " + std::to_string(dim_));
    }
    for (double v : r.features) {
      if (!std::isfinite(v)) {
        throw InvalidInputError("record '" + r.id + "' has a non-finite feature");
      }
    }
    if (!std::isfinite(r.gold_score)) {
      throw InvalidInputError("record '" + r.id + "' has a non-finite score");
    }
    if (r.annotator_scores) {
      const auto& a = *r.annotator_scores;
      if (a.size() < 2) {
        throw InvalidInputError("record '" + r.id +
                                "' needs at least 2 annotator scores");
      }
      const double m = Mean(a);
      if (std::abs(m - r.gold_score) > 1e-9 * std::max(1.0, std::abs(m))) {
        throw InvalidInputError("record '" + r.id +
                                "': gold_score is not the annotator mean");
      }
    }
    if (r.true_sigma && !(*r.true_sigma >= 0.0)) {
      throw InvalidInputError("record '" + r.id + "' has negative true_sigma");
    }
  }
}

Dataset::Dataset(const Dataset& other)
    : records_(other.records_), dim_(other.dim_) {}

Dataset& Dataset::operator=(const Dataset& other) {
  records_ = other.records_;
  dim_ = other.dim_;
  oracle_reads_.store(0);
  return *this;
}

Dataset::Dataset(Dataset&& other) noexcept
    : records_(std::move(other.records_)), dim_(other.dim_) {}

Dataset& Dataset::operator=(Dataset&& other) noexcept {
  records_ = std::move(other.records_);
  dim_ = other.dim_;
  oracle_reads_.store(0);
  return *this;
}

std::optional<double> Dataset::true_sigma(std::size_t i) const {
  oracle_reads_.fetch_add(1);
  return records_.at(i).true_sigma;
}

std::optional<std::string> Dataset::noise_tag(std::size_t i) const {
  oracle_reads_.fetch_add(1);
  return records_.at(i).noise_tag;
}

const std::vector<SegmentRecord>& Dataset::records() const {
  oracle_reads_.fetch_add(1);
  return records_;
}

TrainingData Dataset::ToTrainingData() const {
  TrainingData t;
  t.features.resize(static_cast<Eigen::Index>(records_.size()), dim_);
  t.ids.reserve(records_.size());
  t.targets.reserve(records_.size());
  t.annotator_scores.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const SegmentRecord& r = records_[i];
    t.ids.push_back(r.id);
    for (int j = 0; j < dim_; ++j) {
      t.features(static_cast<Eigen::Index>(i), j) = r.features[j];
    }
    t.targets.push_back(r.gold_score);
    t.annotator_scores.push_back(r.annotator_scores.value_or(
        std::vector<double>{}));
  }
  return t;
}

Dataset Dataset::Subset(std::span<const std::size_t> rows) const {
  std::vector<SegmentRecord> out;
  out.reserve(rows.size());
  for (std::size_t i : rows) out.push_back(records_.at(i));
  return Dataset(std::move(out));
}

Dataset Dataset::Concat(const Dataset& a, const Dataset& b) {
  std::vector<SegmentRecord> out = a.records_;
  out.insert(out.end(), b.records_.begin(), b.records_.end());
  return Dataset(std::move(out));
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

std::string ScenarioKindName(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kHeteroscedastic:
      return "heteroscedastic";
    case ScenarioKind::kMultiAnnotator:
      return "multi_annotator";
    case ScenarioKind::kDomainShift:
      return "domain_shift";
    case ScenarioKind::kReferencePairs:
      return "reference_pairs";
  }
  return "?";
}

ScenarioKind ParseScenarioKind(const std::string& name) {
  if (name == "heteroscedastic") return ScenarioKind::kHeteroscedastic;
  if (name == "multi_annotator") return ScenarioKind::kMultiAnnotator;
  if (name == "domain_shift") return ScenarioKind::kDomainShift;
  if (name == "reference_pairs") return ScenarioKind::kReferencePairs;
  throw ConfigError("unknown scenario kind '" + name + "'");
}

void SyntheticScenario::Validate() const {
  if (n < 1) throw ConfigError("scenario: n must be >= 1");
  if (d < 1) throw ConfigError("scenario: d must be >= 1");
  if (noise_a < 0.0 || noise_b < 0.0 || clean_sigma < 0.0 ||
      quality_jitter < 0.0) {
    throw ConfigError("scenario: noise scales must be >= 0");
  }
  for (double s : strata_sigma) {
    if (s < 0.0) throw ConfigError("scenario: strata_sigma must be >= 0");
  }
  if (kind == ScenarioKind::kMultiAnnotator) {
    if (annotators < 2) throw ConfigError("scenario: annotators must be >= 2");
    if (!strata_sigma.empty() && d < 2) {
      throw ConfigError("scenario: stratified annotators need d >= 2");
    }
  }
  if (kind == ScenarioKind::kDomainShift) {
    if (shift < 0.0) throw ConfigError("scenario: shift must be >= 0");
    if (n_ood < 0) throw ConfigError("scenario: n_ood must be >= 0");
  }
  if (kind == ScenarioKind::kReferencePairs) {
    if (!(noise_ratio >= 1.0)) {
      throw ConfigError("scenario: noise_ratio must be >= 1");
    }
    if (quality_dims < 1 || quality_dims >= d) {
      throw ConfigError("scenario: need 1 <= quality_dims < d");
    }
  }
}

double LabelFunction(std::span<const double> content) {
  double s = 0.0;
  for (double v : content) s += std::sin(std::numbers::pi * v);
  return s;
}

double NoiseScale(const SyntheticScenario& s, std::span<const double> x) {
  return s.noise_a + s.noise_b * std::abs(x[0]);
}

Dataset GenHeteroscedastic(const SyntheticScenario& scenario) {
  scenario.Validate();
  RandomEngine feature_rng = MakeEngine(scenario.seed, kFeatureStream);
  RandomEngine noise_rng = MakeEngine(scenario.seed, kNoiseStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SegmentRecord> out;
  out.reserve(scenario.n);
  for (int i = 0; i < scenario.n; ++i) {
    SegmentRecord r;
    r.id = PaddedId("h", i);
    r.features = UniformPoint(feature_rng, scenario.d);
    const double sigma = NoiseScale(scenario, r.features);
    r.gold_score = LabelFunction(r.features) + sigma * normal(noise_rng);
    r.true_sigma = sigma;
    out.push_back(std::move(r));
  }
  return Dataset(std::move(out));
}

Dataset GenMultiAnnotator(const SyntheticScenario& scenario) {
  scenario.Validate();
  RandomEngine feature_rng = MakeEngine(scenario.seed, kFeatureStream);
  RandomEngine noise_rng = MakeEngine(scenario.seed, kNoiseStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool stratified = !scenario.strata_sigma.empty();
  const int strata = static_cast<int>(scenario.strata_sigma.size());
  std::uniform_int_distribution<int> pick(0, std::max(0, strata - 1));
  std::vector<SegmentRecord> out;
  out.reserve(scenario.n);
  for (int i = 0; i < scenario.n; ++i) {
    SegmentRecord r;
    r.id = PaddedId("m", i);
    r.features = UniformPoint(feature_rng, scenario.d);
    double sigma;
    std::span<const double> content(r.features);
    if (stratified) {
      const int s = pick(feature_rng);
      r.features.back() =
          strata == 1 ? 0.0 : -1.0 + 2.0 * s / static_cast<double>(strata - 1);
      sigma = scenario.strata_sigma[s];
      content = std::span<const double>(r.features.data(), r.features.size() - 1);
    } else {
      sigma = NoiseScale(scenario, r.features);
    }
    const double f = LabelFunction(content);
    std::vector<double> scores(scenario.annotators);
    for (double& s : scores) s = f + sigma * normal(noise_rng);
    r.gold_score = Mean(scores);
    r.annotator_scores = std::move(scores);
    r.true_sigma = sigma;
    out.push_back(std::move(r));
  }
  return Dataset(std::move(out));
}

std::pair<Dataset, Dataset> GenDomainShift(const SyntheticScenario& scenario) {
  scenario.Validate();
  Dataset in_domain = GenHeteroscedastic(scenario);

  RandomEngine dir_rng = MakeEngine(scenario.seed, kShiftStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> direction(scenario.d);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& v : direction) {
      v = normal(dir_rng);
      norm += v * v;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& v : direction) v /= norm;

  RandomEngine feature_rng = MakeEngine(scenario.seed, kOodStream);
  RandomEngine noise_rng = MakeEngine(scenario.seed, kOodStream + 100);
  const int n_ood = scenario.n_ood > 0 ? scenario.n_ood : scenario.n;
  std::vector<SegmentRecord> out;
  out.reserve(n_ood);
  for (int i = 0; i < n_ood; ++i) {
    SegmentRecord r;
    r.id = PaddedId("o", i);
    const std::vector<double> base = UniformPoint(feature_rng, scenario.d);
    const double sigma = NoiseScale(scenario, base);
    r.features = base;
    for (int j = 0; j < scenario.d; ++j) {
      r.features[j] += scenario.shift * direction[j];
    }
    r.gold_score = LabelFunction(r.features) + sigma * normal(noise_rng);
    r.true_sigma = sigma;
    r.domain_tag = "ood";
    out.push_back(std::move(r));
  }
  return {std::move(in_domain), Dataset(std::move(out))};
}

Dataset GenReferencePairs(const SyntheticScenario& scenario) {
  scenario.Validate();
  RandomEngine feature_rng = MakeEngine(scenario.seed, kFeatureStream);
  RandomEngine noise_rng = MakeEngine(scenario.seed, kNoiseStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int content_dims = scenario.d - scenario.quality_dims;
  const double noisy_center = std::log(scenario.noise_ratio);
  const double noisy_sigma = scenario.noise_ratio * scenario.clean_sigma;
  std::vector<SegmentRecord> out;
  out.reserve(2 * static_cast<std::size_t>(scenario.n));
  for (int i = 0; i < scenario.n; ++i) {
    const std::vector<double> content = UniformPoint(feature_rng, content_dims);
    const double f = LabelFunction(content);
    const std::string pair = PaddedId("p", i);
    for (int variant = 0; variant < 2; ++variant) {
      const bool noisy = variant == 1;
      SegmentRecord r;
      r.id = pair + (noisy ? "/noisy" : "/clean");
      r.features = content;
      for (int q = 0; q < scenario.quality_dims; ++q) {
        r.features.push_back((noisy ? noisy_center : 0.0) +
                             scenario.quality_jitter * normal(feature_rng));
      }
      const double sigma = noisy ? noisy_sigma : scenario.clean_sigma;
      r.gold_score = f + sigma * normal(noise_rng);
      r.true_sigma = sigma;
      r.noise_tag = noisy ? "ref_bad" : "ref_good";
      out.push_back(std::move(r));
    }
  }
  return Dataset(std::move(out));
}

Dataset Generate(const SyntheticScenario& scenario) {
  switch (scenario.kind) {
    case ScenarioKind::kHeteroscedastic:
      return GenHeteroscedastic(scenario);
    case ScenarioKind::kMultiAnnotator:
      return GenMultiAnnotator(scenario);
    case ScenarioKind::kDomainShift: {
      auto [in, ood] = GenDomainShift(scenario);
      return Dataset::Concat(in, ood);
    }
    case ScenarioKind::kReferencePairs:
      return GenReferencePairs(scenario);
  }
  throw ConfigError("unknown scenario kind");
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

std::string GroupKey(const std::string& id) {
  const auto pos = id.rfind('/');
  return pos == std::string::npos ? id : id.substr(0, pos);
}

std::vector<Dataset> Split(const Dataset& dataset,
                           std::span<const double> fractions,
                           std::uint64_t seed) {
  if (fractions.empty()) throw ConfigError("split: no fractions given");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ConfigError("split: fractions must be >= 0");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("split: fractions must sum to 1");
  }

  // Groups in first-appearance order, bucketed by the tag of their first row.
  std::map<std::string, std::vector<std::vector<std::size_t>>> strata;
  std::map<std::string, std::pair<std::string, std::size_t>> group_slot;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const std::string key = GroupKey(dataset.id(i));
    auto it = group_slot.find(key);
    if (it == group_slot.end()) {
      auto& groups = strata[dataset.domain_tag(i)];
      group_slot.emplace(key,
                         std::make_pair(dataset.domain_tag(i), groups.size()));
      groups.push_back({i});
    } else {
      strata[it->second.first][it->second.second].push_back(i);
    }
  }

  std::vector<std::vector<std::size_t>> parts(fractions.size());
  std::uint64_t stream = 0;
  for (auto& [tag, groups] : strata) {
    RandomEngine rng = MakeEngine(seed, 1000 + stream++);
    std::shuffle(groups.begin(), groups.end(), rng);
    const double count = static_cast<double>(groups.size());
    double cumulative = 0.0;
    std::size_t begin = 0;
    for (std::size_t p = 0; p < fractions.size(); ++p) {
      cumulative += fractions[p];
      const std::size_t end =
          p + 1 == fractions.size()
              ? groups.size()
              : std::min(groups.size(),
                         static_cast<std::size_t>(std::llround(cumulative * count)));
      for (std::size_t g = begin; g < end; ++g) {
        parts[p].insert(parts[p].end(), groups[g].begin(), groups[g].end());
      }
      begin = std::max(begin, end);
    }
  }

  std::vector<Dataset> out;
  out.reserve(parts.size());
  for (auto& rows : parts) {
    std::sort(rows.begin(), rows.end());
    out.push_back(dataset.Subset(rows));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON lines
// ---------------------------------------------------------------------------

std::string RecordToJsonLine(const SegmentRecord& r) {
  json j = json::object();
  j["id"] = r.id;
  j["features"] = r.features;
  j["gold_score"] = r.gold_score;
  if (r.annotator_scores) j["annotator_scores"] = *r.annotator_scores;
  j["domain_tag"] = r.domain_tag;
  if (r.noise_tag) j["noise_tag"] = *r.noise_tag;
  if (r.true_sigma) j["true_sigma"] = *r.true_sigma;
  return j.dump();
}

SegmentRecord RecordFromJsonLine(const std::string& line,
                                 std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number) + ": ";
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw IoError(where + "malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw IoError(where + "expected a JSON object");
  static const std::unordered_set<std::string> kKnown = {
      "id",         "features",  "gold_score", "annotator_scores",
      "domain_tag", "noise_tag", "true_sigma"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) throw IoError(where + "unknown field '" + key + "'");
  }
  auto require = [&](const char* key) -> const json& {
    if (!j.contains(key) || j[key].is_null()) {
      throw IoError(where + "missing field '" + key + "'");
    }
    return j[key];
  };
  auto number_array = [&](const json& v, const char* key) {
    if (!v.is_array()) throw IoError(where + "'" + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
      if (!e.is_number()) {
        throw IoError(where + "'" + key + "' must contain only numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  };

  SegmentRecord r;
  const json& id = require("id");
  if (!id.is_string()) throw IoError(where + "'id' must be a string");
  r.id = id.get<std::string>();
  r.features = number_array(require("features"), "features");
  const json& gold = require("gold_score");
  if (!gold.is_number()) throw IoError(where + "'gold_score' must be a number");
  r.gold_score = gold.get<double>();
  if (j.contains("annotator_scores") && !j["annotator_scores"].is_null()) {
    r.annotator_scores = number_array(j["annotator_scores"], "annotator_scores");
  }
  const json& tag = require("domain_tag");
  if (!tag.is_string()) throw IoError(where + "'domain_tag' must be a string");
  r.domain_tag = tag.get<std::string>();
  if (j.contains("noise_tag") && !j["noise_tag"].is_null()) {
    if (!j["noise_tag"].is_string()) {
      throw IoError(where + "'noise_tag' must be a string");
    }
    r.noise_tag = j["noise_tag"].get<std::string>();
  }
  if (j.contains("true_sigma") && !j["true_sigma"].is_null()) {
    if (!j["true_sigma"].is_number()) {
      throw IoError(where + "'true_sigma' must be a number");
    }
    r.true_sigma = j["true_sigma"].get<double>();
  }
  return r;
}

void SaveDataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& r : dataset.records()) out << RecordToJsonLine(r) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

Dataset LoadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::vector<SegmentRecord> records;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_number = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    SegmentRecord r = RecordFromJsonLine(line, line_number);
    const std::string where = path + ":" + std::to_string(line_number) + ": ";
    if (!ids.insert(r.id).second) {
      throw IoError(where + "duplicate id '" + r.id + "'");
    }
    if (dim < 0) dim = static_cast<int>(r.features.size());
    if (static_cast<int>(r.features.size()) != dim) {
      throw IoError(where + "inconsistent feature dimension " +
                    std::to_string(r.features.size()) + " (expected " +
                    std::to_string(dim) + ")");
    }
    records.push_back(std::move(r));
  }
  try {
    return Dataset(std::move(records));
  } catch (const InvalidInputError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace uqreg::data
