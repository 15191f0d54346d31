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

#include "uqreg/uqreg.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqreg/calibration.hpp"
#include "uqreg/datagen.hpp"
#include "uqreg/error.hpp"
#include "uqreg/estimators.hpp"
#include "uqreg/experiments.hpp"
#include "uqreg/metrics.hpp"
#include "uqreg/serialization.hpp"

struct uq_dataset {
  uqreg::data::Dataset ds;
};

struct uq_estimator {
  uqreg::est::Estimator est;
  std::map<std::string, uqreg::calibration::CalibrationScale> tag_cal;
};

struct uq_predictions {
  uqreg::PredictionSet preds;
};

namespace {

using uqreg::io::Json;

constexpr const char* kTagCalibrationFile = "tag_calibration.json";

thread_local std::string g_last_error;

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
uq_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return UQ_OK;
  } catch (const uqreg::Error& e) {
    g_last_error = e.what();
    return static_cast<uq_status>(e.code());
  } catch (const Json::exception& e) {
    g_last_error = std::string("invalid configuration: ") + e.what();
    return UQ_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return UQ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UQ_ERR_INTERNAL;
  }
}

uq_status NullArgument(const char* name) {
  g_last_error = std::string("null argument: ") + name;
  return UQ_ERR_INVALID_INPUT;
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Json ParseConfig(const char* text, const char* what) {
  if (!text || !*text) return Json::object();
  return uqreg::io::ParseJson(text, what);
}

Json TagCalibrationJson(const uq_estimator& e) {
  Json j = Json::object();
  for (const auto& [tag, cal] : e.tag_cal) j[tag] = uqreg::io::ToJson(cal);
  return j;
}

}  // namespace

extern "C" {

const char* uq_version(void) { return "0.1.0"; }

const char* uq_last_error(void) { return g_last_error.c_str(); }

void uq_string_free(char* s) { std::free(s); }

uq_status uq_config_normalize(const char* kind, const char* config_json,
                              char** out) {
  if (!kind) return NullArgument("kind");
  if (!out) return NullArgument("out");
  return Guard([&] {
    const std::string which = kind;
    const Json j = ParseConfig(config_json, which.c_str());
    Json normalized;
    if (which == "scenario") {
      normalized = uqreg::io::ToJson(uqreg::io::ScenarioFromJson(j));
    } else if (which == "estimator") {
      const auto c = uqreg::io::EstimatorConfigFromJson(j);
      c.Validate();
      normalized = uqreg::io::ToJson(c);
    } else if (which == "experiment") {
      normalized = uqreg::exp::ToJson(uqreg::exp::ExperimentConfigFromJson(j));
    } else {
      throw uqreg::ConfigError("unknown config kind '" + which + "'");
    }
    *out = CopyString(normalized.dump(2));
  });
}

// ---- datasets -------------------------------------------------------------

uq_status uq_dataset_synthesize(const char* scenario_json, uq_dataset** out) {
  if (!out) return NullArgument("out");
  return Guard([&] {
    const auto scenario =
        uqreg::io::ScenarioFromJson(ParseConfig(scenario_json, "scenario"));
    *out = new uq_dataset{uqreg::data::Generate(scenario)};
  });
}

uq_status uq_dataset_load(const char* path, uq_dataset** out) {
  if (!path) return NullArgument("path");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = new uq_dataset{uqreg::data::LoadDataset(path)}; });
}

uq_status uq_dataset_save(const uq_dataset* ds, const char* path) {
  if (!ds) return NullArgument("ds");
  if (!path) return NullArgument("path");
  return Guard([&] { uqreg::data::SaveDataset(ds->ds, path); });
}

size_t uq_dataset_size(const uq_dataset* ds) { return ds ? ds->ds.size() : 0; }

int uq_dataset_dim(const uq_dataset* ds) { return ds ? ds->ds.dim() : 0; }

uq_status uq_dataset_split(const uq_dataset* ds, const double* fractions,
                           size_t k, uint64_t seed, uq_dataset** out_parts) {
  if (!ds) return NullArgument("ds");
  if (!fractions) return NullArgument("fractions");
  if (!out_parts) return NullArgument("out_parts");
  return Guard([&] {
    auto parts = uqreg::data::Split(
        ds->ds, std::span<const double>(fractions, k), seed);
    for (size_t i = 0; i < k; ++i) {
      out_parts[i] = new uq_dataset{std::move(parts[i])};
    }
  });
}

void uq_dataset_free(uq_dataset* ds) { delete ds; }

// ---- estimators -----------------------------------------------------------

uq_status uq_estimator_train(const char* config_json, const uq_dataset* train,
                             const uq_dataset* error_split,
                             const uq_estimator* init, uq_estimator** out) {
  if (!train) return NullArgument("train");
  if (!out) return NullArgument("out");
  return Guard([&] {
    const auto config = uqreg::io::EstimatorConfigFromJson(
        ParseConfig(config_json, "estimator"));
    config.Validate();
    const auto q = train->ds.ToTrainingData();
    std::optional<uqreg::data::TrainingData> e;
    if (error_split) e = error_split->ds.ToTrainingData();
    *out = new uq_estimator{
        uqreg::est::Estimator::Train(config, q, e ? &*e : nullptr,
                                     init ? &init->est : nullptr),
        {}};
  });
}

uq_status uq_estimator_calibrate(uq_estimator* est, const uq_dataset* dev) {
  if (!est) return NullArgument("est");
  if (!dev) return NullArgument("dev");
  return Guard([&] {
    est->est.Calibrate(dev->ds.ToTrainingData());
    est->tag_cal.clear();
  });
}

uq_status uq_estimator_calibrate_by_tag(uq_estimator* est,
                                        const uq_dataset* dev) {
  if (!est) return NullArgument("est");
  if (!dev) return NullArgument("dev");
  return Guard([&] {
    std::map<std::string, std::vector<std::size_t>> rows;
    for (std::size_t i = 0; i < dev->ds.size(); ++i) {
      rows[dev->ds.domain_tag(i)].push_back(i);
    }
    std::map<std::string, uqreg::calibration::CalibrationScale> fitted;
    for (const auto& [tag, idx] : rows) {
      const auto part = dev->ds.Subset(idx).ToTrainingData();
      fitted[tag] = uqreg::calibration::FitVarianceScale(
          est->est.PredictUncalibrated(part), "dev:" + tag);
    }
    est->est.Calibrate(dev->ds.ToTrainingData());
    est->tag_cal = std::move(fitted);
  });
}

uq_status uq_estimator_predict(const uq_estimator* est, const uq_dataset* ds,
                               int calibrated, uq_predictions** out) {
  if (!est) return NullArgument("est");
  if (!ds) return NullArgument("ds");
  if (!out) return NullArgument("out");
  return Guard([&] {
    const auto data = ds->ds.ToTrainingData();
    if (!calibrated) {
      *out = new uq_predictions{est->est.PredictUncalibrated(data)};
      return;
    }
    if (est->tag_cal.empty()) {
      *out = new uq_predictions{est->est.Predict(data)};
      return;
    }
    const auto raw = est->est.PredictUncalibrated(data);
    std::vector<uqreg::PredictedSegment> segments = raw.segments();
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto it = est->tag_cal.find(ds->ds.domain_tag(i));
      const double scale = it != est->tag_cal.end()
                               ? it->second.scale
                               : est->est.calibration().scale;
      segments[i].variance *= scale;
    }
    *out = new uq_predictions{uqreg::PredictionSet(std::move(segments))};
  });
}

uq_status uq_estimator_save(const uq_estimator* est, const char* dir) {
  if (!est) return NullArgument("est");
  if (!dir) return NullArgument("dir");
  return Guard([&] {
    est->est.Save(dir);
    const auto path = std::filesystem::path(dir) / kTagCalibrationFile;
    if (est->tag_cal.empty()) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    } else {
      uqreg::io::WriteFile(path.string(), TagCalibrationJson(*est).dump(2) + "\n");
    }
  });
}

uq_status uq_estimator_load(const char* dir, uq_estimator** out) {
  if (!dir) return NullArgument("dir");
  if (!out) return NullArgument("out");
  return Guard([&] {
    auto loaded = std::make_unique<uq_estimator>(
        uq_estimator{uqreg::est::Estimator::Load(dir), {}});
    const auto path = std::filesystem::path(dir) / kTagCalibrationFile;
    if (std::filesystem::exists(path)) {
      try {
        const Json j = uqreg::io::ParseJson(uqreg::io::ReadFile(path.string()),
                                            path.string());
        if (!j.is_object()) throw uqreg::IoError("expected an object");
        for (const auto& [tag, value] : j.items()) {
          loaded->tag_cal[tag] = uqreg::io::CalibrationScaleFromJson(value);
        }
      } catch (const uqreg::ConfigError& e) {
        throw uqreg::IoError(path.string() + ": " + e.what());
      }
    }
    *out = loaded.release();
  });
}

uq_status uq_estimator_info_json(const uq_estimator* est, char** out) {
  if (!est) return NullArgument("est");
  if (!out) return NullArgument("out");
  return Guard([&] {
    Json j;
    j["config"] = uqreg::io::ToJson(est->est.config());
    j["calibration"] = uqreg::io::ToJson(est->est.calibration());
    j["tag_calibration"] = TagCalibrationJson(*est);
    j["epoch_loss"] = est->est.log().epoch_loss;
    *out = CopyString(j.dump(2));
  });
}

void uq_estimator_free(uq_estimator* est) { delete est; }

// ---- predictions ----------------------------------------------------------

size_t uq_predictions_size(const uq_predictions* p) {
  return p ? p->preds.size() : 0;
}

uq_status uq_predictions_get(const uq_predictions* p, size_t i, double* mean,
                             double* variance, double* gold) {
  if (!p) return NullArgument("p");
  if (i >= p->preds.size()) {
    g_last_error = "prediction index out of range";
    return UQ_ERR_INVALID_INPUT;
  }
  const auto& s = p->preds[i];
  if (mean) *mean = s.mean;
  if (variance) *variance = s.variance;
  if (gold) *gold = s.gold;
  return UQ_OK;
}

uq_status uq_predictions_csv(const uq_predictions* p, char** out) {
  if (!p) return NullArgument("p");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = CopyString(p->preds.ToCsv()); });
}

uq_status uq_predictions_metrics_json(const uq_predictions* p, int ece_bins,
                                      char** out) {
  if (!p) return NullArgument("p");
  if (!out) return NullArgument("out");
  return Guard([&] {
    *out = CopyString(
        uqreg::io::ToJson(uqreg::metrics::Report(p->preds, ece_bins)).dump(2));
  });
}

uq_status uq_predictions_metrics_table(const uq_predictions* p,
                                       const char* label, int ece_bins,
                                       char** out) {
  if (!p) return NullArgument("p");
  if (!out) return NullArgument("out");
  return Guard([&] {
    uqreg::exp::EstimatorOutcome row;
    row.label = label ? label : "model";
    row.metrics = uqreg::metrics::Report(p->preds, ece_bins);
    *out = CopyString(uqreg::exp::RenderMetricsTable({row}));
  });
}

void uq_predictions_free(uq_predictions* p) { delete p; }

// ---- experiments ----------------------------------------------------------

uq_status uq_run_experiment(const char* name, const char* config_json,
                            char** report_json, char** table) {
  if (!name) return NullArgument("name");
  return Guard([&] {
    namespace ex = uqreg::exp;
    const auto config =
        ex::ExperimentConfigFromJson(ParseConfig(config_json, "experiment"));
    const std::string which = name;
    ex::ExperimentReport report;
    if (which == "compare") {
      report = ex::RunComparison(config).report;
    } else if (which == "noisy-ref") {
      report = ex::RunNoisyReference(config).report;
    } else if (which == "ood") {
      report = ex::RunOodSharpness(config).report;
    } else if (which == "bench") {
      report = ex::RunBench(config).report;
    } else if (which == "ablate-dup") {
      report = ex::RunDupAblation(config).report;
    } else {
      throw uqreg::ConfigError("unknown experiment '" + which + "'");
    }
    std::string json = report.json.dump(2);
    std::string text = report.table;
    if (report_json) *report_json = CopyString(json);
    if (table) *table = CopyString(text);
  });
}

}  // extern "C"
