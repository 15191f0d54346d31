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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "uqreg/random.hpp"

namespace uqreg::exp {
namespace {

namespace fs = std::filesystem;
using io::Json;

constexpr std::uint64_t kSplitStream = 7;

// ---------------------------------------------------------------------------
// Data preparation
// ---------------------------------------------------------------------------

struct PreparedData {
  data::Dataset q;
  data::Dataset e;
  data::Dataset dev;
  data::Dataset test;
  std::optional<data::Dataset> ood;

  std::uint64_t OracleReads() const {
    std::uint64_t n = q.oracle_reads() + e.oracle_reads() +
                      dev.oracle_reads() + test.oracle_reads();
    if (ood) n += ood->oracle_reads();
    return n;
  }
};

PreparedData Prepare(const ExperimentConfig& c, bool split_out_ood) {
  data::Dataset in_domain;
  std::optional<data::Dataset> ood;
  if (c.scenario) {
    if (c.scenario->kind == data::ScenarioKind::kDomainShift) {
      auto [in, out] = data::GenDomainShift(*c.scenario);
      in_domain = std::move(in);
      if (split_out_ood) {
        ood = std::move(out);
      } else {
        in_domain = data::Dataset::Concat(in_domain, out);
      }
    } else {
      in_domain = data::Generate(*c.scenario);
    }
  } else {
    data::Dataset all = data::LoadDataset(c.dataset);
    if (split_out_ood) {
      std::vector<std::size_t> in_rows, ood_rows;
      for (std::size_t i = 0; i < all.size(); ++i) {
        (all.domain_tag(i) == "ood" ? ood_rows : in_rows).push_back(i);
      }
      if (!ood_rows.empty()) ood = all.Subset(ood_rows);
      in_domain = all.Subset(in_rows);
    } else {
      in_domain = std::move(all);
    }
  }
  const std::vector<double> fractions = {c.splits.q, c.splits.e, c.splits.dev,
                                         c.splits.test};
  auto parts = data::Split(in_domain, fractions, DeriveSeed(c.seed, kSplitStream));
  for (const auto& p : parts) {
    if (p.empty()) {
      throw ConfigError("split produced an empty partition; increase n or "
                        "adjust the split fractions");
    }
  }
  PreparedData d{std::move(parts[0]), std::move(parts[1]), std::move(parts[2]),
                 std::move(parts[3]), std::move(ood)};
  return d;
}

est::EstimatorConfig Effective(const ExperimentConfig& c,
                               const est::EstimatorConfig& e) {
  est::EstimatorConfig out = e;
  out.training.seed = DeriveSeed(c.seed, e.training.seed);
  return out;
}

est::Estimator TrainAndCalibrate(const est::EstimatorConfig& cfg,
                                 const PreparedData& d) {
  const data::TrainingData q = d.q.ToTrainingData();
  if (cfg.kind == est::EstimatorKind::kDup) {
    const data::TrainingData e = d.e.ToTrainingData();
    est::Estimator estimator = est::Estimator::Train(cfg, q, &e);
    estimator.Calibrate(d.dev.ToTrainingData(), "dev");
    return estimator;
  }
  est::Estimator estimator = est::Estimator::Train(cfg, q);
  estimator.Calibrate(data::Dataset::Concat(d.e, d.dev).ToTrainingData(),
                      "e+dev");
  return estimator;
}

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string FileSafe(const std::string& label) {
  std::string out;
  for (char ch : label) {
    out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string AlignTable(const std::vector<std::vector<std::string>>& cells) {
  // A short row (e.g. label + failure message) lets its last cell overflow
  // instead of widening the column.
  std::vector<std::size_t> widths(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i) {
      if (row.size() < widths.size() && i + 1 == row.size()) break;
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      std::string cell = cells[r][i];
      if (i + 1 < cells[r].size()) cell.resize(widths[i], ' ');
      line += (i == 0 ? "" : "  ") + cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
    }
  }
  return out;
}

ExperimentReport BaseReport(const std::string& name, const ExperimentConfig& c) {
  ExperimentReport r;
  r.experiment = name;
  // Where the files go is not part of the experiment's identity.
  Json cfg = ToJson(c);
  cfg.erase("output_dir");
  r.config_hash = io::ConfigHash(cfg);
  r.json["experiment"] = name;
  r.json["config_hash"] = r.config_hash;
  r.json["config"] = cfg;
  return r;
}

Json OutcomeJson(const EstimatorOutcome& o, const est::EstimatorConfig& cfg) {
  Json j;
  j["estimator"] = o.label;
  j["config"] = io::ToJson(cfg);
  if (o.ok()) {
    j["calibration_scale"] = o.calibration_scale;
    j["metrics"] = io::ToJson(*o.metrics);
  } else {
    j["error"] = o.error;
    j["error_code"] = static_cast<int>(o.error_code);
  }
  return j;
}

ComparisonResult CompareEstimators(const std::string& name,
                                   const ExperimentConfig& c,
                                   const std::vector<est::EstimatorConfig>& list) {
  ComparisonResult result;
  const PreparedData d = Prepare(c, /*split_out_ood=*/false);
  const data::TrainingData test = d.test.ToTrainingData();
  std::vector<est::EstimatorConfig> effective;
  for (const auto& e : list) {
    const est::EstimatorConfig cfg = Effective(c, e);
    effective.push_back(cfg);
    EstimatorOutcome o;
    o.label = cfg.Label();
    try {
      const est::Estimator estimator = TrainAndCalibrate(cfg, d);
      PredictionSet preds = estimator.Predict(test);
      o.metrics = metrics::Report(preds, c.ece_bins);
      o.test_predictions = std::move(preds);
      o.calibration_scale = estimator.calibration().scale;
    } catch (const Error& ex) {
      o.error = ex.what();
      o.error_code = ex.code();
    }
    result.rows.push_back(std::move(o));
  }
  result.oracle_reads_during_training = d.OracleReads();

  ExperimentReport& r = result.report;
  r = BaseReport(name, c);
  r.json["oracle_reads_during_training"] = result.oracle_reads_during_training;
  Json rows = Json::array();
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const EstimatorOutcome& o = result.rows[i];
    rows.push_back(OutcomeJson(o, effective[i]));
    if (o.test_predictions) {
      r.extra_files.emplace_back("predictions_" + FileSafe(o.label) + ".csv",
                                 o.test_predictions->ToCsv());
    }
  }
  r.json["results"] = rows;
  r.table = RenderMetricsTable(result.rows);
  return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void ExperimentConfig::Validate() const {
  if (!scenario && dataset.empty()) {
    throw ConfigError("experiment needs either a scenario or a dataset path");
  }
  if (scenario) scenario->Validate();
  if (estimators.empty()) throw ConfigError("experiment lists no estimators");
  for (const auto& e : estimators) e.Validate();
  const double parts[] = {splits.q, splits.e, splits.dev, splits.test};
  double total = 0.0;
  for (double p : parts) {
    if (!(p > 0.0)) throw ConfigError("split fractions must be > 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
  if (bench_repetitions < 1) {
    throw ConfigError("bench_repetitions must be >= 1");
  }
  if (ece_bins < 1) throw ConfigError("ece_bins must be >= 1");
}

ExperimentConfig ExperimentConfigFromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be an object");
  static const std::set<std::string> kKnown = {
      "scenario", "dataset",  "estimators",        "splits",  "seed",
      "output_dir", "model",  "training", "bench_repetitions", "ece_bins"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) {
      throw ConfigError("experiment: unknown field '" + key + "'");
    }
  }
  ExperimentConfig c;
  auto present = [&](const char* key) {
    return j.contains(key) && !j[key].is_null();
  };
  try {
    if (present("scenario")) c.scenario = io::ScenarioFromJson(j["scenario"]);
    if (present("dataset")) c.dataset = j["dataset"].get<std::string>();
    if (present("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (present("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (present("bench_repetitions")) {
      c.bench_repetitions = j["bench_repetitions"].get<int>();
    }
    if (present("ece_bins")) c.ece_bins = j["ece_bins"].get<int>();
    if (present("model")) c.model = io::ModelConfigFromJson(j["model"]);
    if (present("training")) {
      c.training = io::TrainingConfigFromJson(j["training"]);
    }
    if (present("splits")) {
      const Json& s = j["splits"];
      if (!s.is_object()) throw ConfigError("splits must be an object");
      for (const auto& [key, value] : s.items()) {
        if (key != "q" && key != "e" && key != "dev" && key != "test") {
          throw ConfigError("splits: unknown field '" + key + "'");
        }
      }
      c.splits.q = s.value("q", c.splits.q);
      c.splits.e = s.value("e", c.splits.e);
      c.splits.dev = s.value("dev", c.splits.dev);
      c.splits.test = s.value("test", c.splits.test);
    }
    est::EstimatorConfig base;
    base.model = c.model;
    base.training = c.training;
    if (present("estimators")) {
      const Json& list = j["estimators"];
      if (list.is_string()) {
        // Comma-separated kinds, e.g. "HTS,MCD".
        std::string all = list.get<std::string>();
        std::size_t start = 0;
        while (start <= all.size()) {
          const std::size_t comma = all.find(',', start);
          const std::string item = all.substr(
              start, comma == std::string::npos ? std::string::npos : comma - start);
          if (!item.empty()) {
            c.estimators.push_back(io::EstimatorConfigFromJson(Json(item), base));
          }
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
      } else if (list.is_array()) {
        for (const auto& e : list) {
          c.estimators.push_back(io::EstimatorConfigFromJson(e, base));
        }
      } else {
        throw ConfigError("estimators must be an array or a comma list");
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  if (!c.scenario && c.dataset.empty()) c.scenario = data::SyntheticScenario{};
  if (!j.contains("estimators")) {
    for (auto kind : {est::EstimatorKind::kMcd, est::EstimatorKind::kDe,
                      est::EstimatorKind::kHts, est::EstimatorKind::kHtsMcd,
                      est::EstimatorKind::kDup}) {
      est::EstimatorConfig e;
      e.kind = kind;
      e.model = c.model;
      e.training = c.training;
      c.estimators.push_back(e);
    }
  }
  c.Validate();
  return c;
}

Json ToJson(const ExperimentConfig& c) {
  Json j;
  j["scenario"] = c.scenario ? io::ToJson(*c.scenario) : Json(nullptr);
  j["dataset"] = c.dataset;
  Json list = Json::array();
  for (const auto& e : c.estimators) list.push_back(io::ToJson(e));
  j["estimators"] = list;
  j["splits"] = Json{{"q", c.splits.q},
                     {"e", c.splits.e},
                     {"dev", c.splits.dev},
                     {"test", c.splits.test}};
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["model"] = io::ToJson(c.model);
  j["training"] = io::ToJson(c.training);
  j["bench_repetitions"] = c.bench_repetitions;
  j["ece_bins"] = c.ece_bins;
  return j;
}

void ExperimentReport::Write(const std::string& dir) const {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
  io::WriteFile((fs::path(dir) / "report.json").string(), json.dump(2) + "\n");
  io::WriteFile((fs::path(dir) / "report.txt").string(), table);
  for (const auto& [name, contents] : extra_files) {
    io::WriteFile((fs::path(dir) / name).string(), contents);
  }
}

double Median(std::vector<double> values) {
  if (values.empty()) throw InvalidInputError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string RenderMetricsTable(const std::vector<EstimatorOutcome>& rows) {
  // Column extractors; `higher` marks PPS/UPS where larger is better.
  struct Column {
    const char* name;
    bool higher;
    std::optional<double> (*get)(const metrics::MetricsReport&);
  };
  static const Column kColumns[] = {
      {"PPS", true, [](const metrics::MetricsReport& m) { return m.pps; }},
      {"UPS", true, [](const metrics::MetricsReport& m) { return m.ups; }},
      {"NLL", false,
       [](const metrics::MetricsReport& m) { return std::optional(m.nll); }},
      {"ECE", false,
       [](const metrics::MetricsReport& m) { return std::optional(m.ece); }},
      {"Sharpness", false,
       [](const metrics::MetricsReport& m) {
         return std::optional(m.sharpness);
       }},
  };

  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Estimator", "PPS", "UPS", "NLL", "ECE", "Sharpness", "N"});
  std::vector<std::optional<double>> best(std::size(kColumns));
  for (const auto& row : rows) {
    if (!row.metrics) continue;
    for (std::size_t c = 0; c < std::size(kColumns); ++c) {
      const auto v = kColumns[c].get(*row.metrics);
      if (!v) continue;
      // Compare at printed precision so visually equal values tie.
      const double rounded = std::stod(Fixed(*v));
      if (!best[c] || (kColumns[c].higher ? rounded > *best[c]
                                          : rounded < *best[c])) {
        best[c] = rounded;
      }
    }
  }
  for (const auto& row : rows) {
    std::vector<std::string> line = {row.label};
    if (!row.metrics) {
      line.push_back("failed: " + row.error);
      cells.push_back(line);
      continue;
    }
    for (std::size_t c = 0; c < std::size(kColumns); ++c) {
      const auto v = kColumns[c].get(*row.metrics);
      if (!v) {
        line.push_back("n/a");
        continue;
      }
      std::string s = Fixed(*v);
      if (best[c] && std::stod(s) == *best[c]) s += "*";
      line.push_back(s);
    }
    line.push_back(std::to_string(row.metrics->n));
    cells.push_back(line);
  }
  return AlignTable(cells);
}

// ---------------------------------------------------------------------------
// Protocols
// ---------------------------------------------------------------------------

ComparisonResult RunComparison(const ExperimentConfig& config) {
  config.Validate();
  ComparisonResult result =
      CompareEstimators("compare", config, config.estimators);
  result.report.Write(config.output_dir);
  return result;
}

ComparisonResult RunDupAblation(const ExperimentConfig& config) {
  config.Validate();
  est::EstimatorConfig base;
  base.kind = est::EstimatorKind::kDup;
  base.model = config.model;
  base.training = config.training;
  for (const auto& e : config.estimators) {
    if (e.kind == est::EstimatorKind::kDup) {
      base = e;
      break;
    }
  }
  std::vector<est::EstimatorConfig> list;
  for (DupLoss loss : {DupLoss::kAbs, DupLoss::kSq, DupLoss::kHts}) {
    est::EstimatorConfig cfg = base;
    cfg.dup_loss = loss;
    list.push_back(cfg);
  }
  ComparisonResult result = CompareEstimators("ablate-dup", config, list);
  result.report.Write(config.output_dir);
  return result;
}

NoisyRefResult RunNoisyReference(const ExperimentConfig& config) {
  config.Validate();
  NoisyRefResult result;
  const PreparedData d = Prepare(config, /*split_out_ood=*/false);
  const data::TrainingData test = d.test.ToTrainingData();

  std::vector<est::EstimatorConfig> effective;
  std::vector<std::optional<PredictionSet>> predictions;
  for (const auto& e : config.estimators) {
    const est::EstimatorConfig cfg = Effective(config, e);
    effective.push_back(cfg);
    NoisyRefRow row;
    row.label = cfg.Label();
    try {
      predictions.push_back(TrainAndCalibrate(cfg, d).Predict(test));
    } catch (const Error& ex) {
      row.error = ex.what();
      predictions.push_back(std::nullopt);
    }
    result.rows.push_back(std::move(row));
  }
  result.oracle_reads_during_training = d.OracleReads();

  // Scoring: pair up clean/noisy variants by group key via the oracle tag.
  std::map<std::string, std::pair<long, long>> pairs;  // key -> (clean, noisy)
  for (std::size_t i = 0; i < d.test.size(); ++i) {
    const auto tag = d.test.noise_tag(i);
    if (!tag) continue;
    auto [it, inserted] =
        pairs.try_emplace(data::GroupKey(d.test.id(i)), -1L, -1L);
    if (*tag == "ref_good") it->second.first = static_cast<long>(i);
    if (*tag == "ref_bad") it->second.second = static_cast<long>(i);
  }
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    if (!predictions[k]) continue;
    const PredictionSet& p = *predictions[k];
    double correct = 0.0;
    std::size_t n = 0;
    for (const auto& [key, idx] : pairs) {
      if (idx.first < 0 || idx.second < 0) continue;
      const double clean = p[static_cast<std::size_t>(idx.first)].variance;
      const double noisy = p[static_cast<std::size_t>(idx.second)].variance;
      correct += clean < noisy ? 1.0 : (clean == noisy ? 0.5 : 0.0);
      ++n;
    }
    result.rows[k].pairs = n;
    if (n > 0) {
      result.rows[k].accuracy = correct / static_cast<double>(n);
    } else {
      result.rows[k].error = "no complete clean/noisy pairs in the test split";
    }
  }

  ExperimentReport& r = result.report;
  r = BaseReport("noisy-ref", config);
  r.json["oracle_reads_during_training"] = result.oracle_reads_during_training;
  Json rows = Json::array();
  std::vector<std::vector<std::string>> cells = {
      {"Estimator", "CleanSelected", "Pairs"}};
  std::optional<double> best;
  for (const auto& row : result.rows) {
    if (row.accuracy && (!best || *row.accuracy > *best)) best = row.accuracy;
  }
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    const NoisyRefRow& row = result.rows[k];
    Json j;
    j["estimator"] = row.label;
    j["config"] = io::ToJson(effective[k]);
    if (row.accuracy) {
      j["accuracy"] = *row.accuracy;
      j["pairs"] = row.pairs;
      std::string s = Fixed(*row.accuracy);
      if (best && *row.accuracy == *best) s += "*";
      cells.push_back({row.label, s, std::to_string(row.pairs)});
    } else {
      j["error"] = row.error;
      cells.push_back({row.label, "failed: " + row.error});
    }
    rows.push_back(j);
  }
  r.json["results"] = rows;
  r.table = AlignTable(cells);
  r.Write(config.output_dir);
  return result;
}

OodResult RunOodSharpness(const ExperimentConfig& config) {
  config.Validate();
  OodResult result;
  const PreparedData d = Prepare(config, /*split_out_ood=*/true);
  if (!d.ood || d.ood->empty()) {
    throw ConfigError("ood experiment needs out-of-domain records "
                      "(domain_shift scenario or domain_tag \"ood\")");
  }
  const data::TrainingData test = d.test.ToTrainingData();
  const data::TrainingData ood = d.ood->ToTrainingData();
  std::vector<est::EstimatorConfig> effective;
  for (const auto& e : config.estimators) {
    const est::EstimatorConfig cfg = Effective(config, e);
    effective.push_back(cfg);
    OodRow row;
    row.label = cfg.Label();
    try {
      const est::Estimator estimator = TrainAndCalibrate(cfg, d);
      row.sharpness_in = metrics::Sharpness(estimator.Predict(test));
      row.sharpness_ood = metrics::Sharpness(estimator.Predict(ood));
      row.ratio = *row.sharpness_ood / *row.sharpness_in;
    } catch (const Error& ex) {
      row.error = ex.what();
    }
    result.rows.push_back(std::move(row));
  }
  result.oracle_reads_during_training = d.OracleReads();

  ExperimentReport& r = result.report;
  r = BaseReport("ood", config);
  r.json["oracle_reads_during_training"] = result.oracle_reads_during_training;
  Json rows = Json::array();
  std::vector<std::vector<std::string>> cells = {
      {"Estimator", "Sharpness(in)", "Sharpness(ood)", "Ratio"}};
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    const OodRow& row = result.rows[k];
    Json j;
    j["estimator"] = row.label;
    j["config"] = io::ToJson(effective[k]);
    if (row.ratio) {
      j["sharpness_in"] = *row.sharpness_in;
      j["sharpness_ood"] = *row.sharpness_ood;
      j["ratio"] = *row.ratio;
      cells.push_back({row.label, Fixed(*row.sharpness_in),
                       Fixed(*row.sharpness_ood), Fixed(*row.ratio, 3)});
    } else {
      j["error"] = row.error;
      cells.push_back({row.label, "failed: " + row.error});
    }
    rows.push_back(j);
  }
  r.json["results"] = rows;
  r.table = AlignTable(cells);
  r.Write(config.output_dir);
  return result;
}

BenchResult RunBench(const ExperimentConfig& config) {
  config.Validate();
  using Clock = std::chrono::steady_clock;
  BenchResult result;
  const PreparedData d = Prepare(config, /*split_out_ood=*/false);
  const data::TrainingData q = d.q.ToTrainingData();
  const data::TrainingData e = d.e.ToTrainingData();
  const data::TrainingData test = d.test.ToTrainingData();
  std::vector<est::EstimatorConfig> effective;
  for (const auto& entry : config.estimators) {
    const est::EstimatorConfig cfg = Effective(config, entry);
    effective.push_back(cfg);
    BenchRow row;
    row.label = cfg.Label();
    try {
      for (int rep = 0; rep < config.bench_repetitions; ++rep) {
        const auto t0 = Clock::now();
        const est::Estimator estimator =
            cfg.kind == est::EstimatorKind::kDup
                ? est::Estimator::Train(cfg, q, &e)
                : est::Estimator::Train(cfg, q);
        const auto t1 = Clock::now();
        const auto preds = estimator.PredictRaw(test.features);
        const auto t2 = Clock::now();
        if (preds.size() != test.size()) {
          throw InvalidInputError("prediction count mismatch");
        }
        row.train_seconds.push_back(
            std::chrono::duration<double>(t1 - t0).count());
        row.inference_seconds.push_back(
            std::chrono::duration<double>(t2 - t1).count());
      }
      row.train_median = Median(row.train_seconds);
      row.inference_median = Median(row.inference_seconds);
    } catch (const Error& ex) {
      row.error = ex.what();
    }
    result.rows.push_back(std::move(row));
  }

  ExperimentReport& r = result.report;
  r = BaseReport("bench", config);
  Json rows = Json::array();
  std::vector<std::vector<std::string>> cells = {
      {"Estimator", "Train(s)", "Inference(s)", "Reps"}};
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    const BenchRow& row = result.rows[k];
    Json j;
    j["estimator"] = row.label;
    j["config"] = io::ToJson(effective[k]);
    if (row.error.empty()) {
      j["train_seconds"] = row.train_seconds;
      j["inference_seconds"] = row.inference_seconds;
      j["train_median"] = row.train_median;
      j["inference_median"] = row.inference_median;
      cells.push_back({row.label, Fixed(row.train_median, 4),
                       Fixed(row.inference_median, 5),
                       std::to_string(row.train_seconds.size())});
    } else {
      j["error"] = row.error;
      cells.push_back({row.label, "failed: " + row.error});
    }
    rows.push_back(j);
  }
  r.json["results"] = rows;
  r.table = AlignTable(cells);
  r.Write(config.output_dir);
  return result;
}

}  // namespace uqreg::exp
