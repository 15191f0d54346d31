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

// Command-line front end. Every subcommand reads an optional JSON config
// (--config) and accepts `--<field> <value>` overrides for any config field;
// nested fields use dotted paths (--training.epochs 5) or, when unambiguous,
// the bare name (--epochs 5). Bare estimator fields in an experiment config
// (--mcd_samples 20) apply to every listed estimator. Values are parsed as JSON and fall back to a
// plain string.
//
// Exit codes: 0 success, 2 config error, 3 training failure, 4 I/O error,
// 1 anything else.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uqreg/uqreg.h"

namespace {

using Json = nlohmann::json;

enum ExitCode {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitTraining = 3,
  kExitIo = 4,
};

struct Failure {
  int code;
  std::string message;
};

int ExitFor(uq_status status) {
  switch (status) {
    case UQ_OK:
      return kExitOk;
    case UQ_ERR_CONFIG:
    case UQ_ERR_INVALID_INPUT:
      return kExitConfig;
    case UQ_ERR_TRAINING:
      return kExitTraining;
    case UQ_ERR_IO:
      return kExitIo;
    default:
      return kExitOther;
  }
}

void Check(uq_status status, const std::string& what) {
  if (status != UQ_OK) {
    throw Failure{ExitFor(status), what + ": " + uq_last_error()};
  }
}

struct DatasetFree {
  void operator()(uq_dataset* d) const { uq_dataset_free(d); }
};
struct EstimatorFree {
  void operator()(uq_estimator* e) const { uq_estimator_free(e); }
};
struct PredictionsFree {
  void operator()(uq_predictions* p) const { uq_predictions_free(p); }
};
using DatasetPtr = std::unique_ptr<uq_dataset, DatasetFree>;
using EstimatorPtr = std::unique_ptr<uq_estimator, EstimatorFree>;
using PredictionsPtr = std::unique_ptr<uq_predictions, PredictionsFree>;

std::string Take(char* s) {
  std::string out = s ? s : "";
  uq_string_free(s);
  return out;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitIo, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw Failure{kExitIo, "cannot write '" + path + "'"};
  }
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Failure{kExitIo, "cannot create directory '" + dir + "'"};
}

DatasetPtr LoadData(const std::string& path) {
  uq_dataset* d = nullptr;
  Check(uq_dataset_load(path.c_str(), &d), "loading " + path);
  return DatasetPtr(d);
}

// ---------------------------------------------------------------------------
// Config files and overrides
// ---------------------------------------------------------------------------

using Overrides = std::vector<std::pair<std::string, std::string>>;

Overrides ParseOverrides(const std::vector<std::string>& extras) {
  Overrides out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) {
      throw Failure{kExitConfig, "unexpected argument '" + arg + "'"};
    }
    std::string key = arg.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0) {
      value = extras[++i];
    } else {
      value = "true";
    }
    out.emplace_back(key, value);
  }
  return out;
}

Json ParseValue(const std::string& text) {
  Json v = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  return v.is_discarded() ? Json(text) : v;
}

std::vector<std::string> SplitPath(const std::string& key) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  return parts;
}

// Maps an override key onto a path in the (fully defaulted) config.
std::vector<std::string> Resolve(const Json& normalized, const std::string& key) {
  const auto unknown = [&] {
    return Failure{kExitConfig, "unknown config field '" + key + "'"};
  };
  std::vector<std::string> path = SplitPath(key);
  if (path.empty()) throw unknown();
  if (path.size() > 1) {
    const Json* node = &normalized;
    for (const auto& part : path) {
      if (node->is_null()) break;  // optional section; validated on re-parse
      if (!node->is_object() || !node->contains(part)) throw unknown();
      node = &(*node)[part];
    }
    return path;
  }
  if (normalized.contains(key)) return path;
  std::vector<std::string> found;
  for (const auto& [section, value] : normalized.items()) {
    if (value.is_object() && value.contains(key)) found.push_back(section);
  }
  if (found.empty()) {
    // Estimator fields in an experiment apply to every listed estimator.
    const Json* list = normalized.contains("estimators")
                           ? &normalized["estimators"] : nullptr;
    if (list && list->is_array() && !list->empty() &&
        (*list)[0].is_object() && (*list)[0].contains(key)) {
      return {"estimators", "*", key};
    }
    throw unknown();
  }
  if (found.size() > 1) {
    std::string where;
    for (const auto& f : found) where += " " + f + "." + key;
    throw Failure{kExitConfig, "ambiguous field '" + key + "'; use one of:" + where};
  }
  return {found.front(), key};
}

void SetPath(Json& j, const std::vector<std::string>& path, Json value) {
  if (path.size() == 3 && path[1] == "*") {
    // Expand "HTS,MCD" / ["HTS", {...}] into one object per estimator.
    Json& list = j[path[0]];
    Json expanded = Json::array();
    if (list.is_string()) {
      std::stringstream ss(list.get<std::string>());
      for (std::string kind; std::getline(ss, kind, ',');) {
        if (!kind.empty()) expanded.push_back(Json{{"kind", kind}});
      }
    } else if (list.is_array()) {
      for (const auto& entry : list) {
        expanded.push_back(entry.is_string() ? Json{{"kind", entry}} : entry);
      }
    }
    for (auto& entry : expanded) entry[path[2]] = value;
    list = std::move(expanded);
    return;
  }
  Json* node = &j;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->is_object()) *node = Json::object();
    node = &(*node)[path[i]];
  }
  if (!node->is_object()) *node = Json::object();
  (*node)[path.back()] = std::move(value);
}

std::string Normalize(const char* kind, const Json& j) {
  char* out = nullptr;
  Check(uq_config_normalize(kind, j.dump().c_str(), &out), "config");
  return Take(out);
}

// Loads `config_path` (if any), applies overrides and returns the
// normalized document.
Json BuildConfig(const char* kind, const std::string& config_path,
                 const std::vector<std::string>& extras) {
  Json raw = Json::object();
  if (!config_path.empty()) {
    raw = Json::parse(ReadText(config_path), nullptr, false);
    if (raw.is_discarded()) {
      throw Failure{kExitConfig, config_path + ": invalid JSON"};
    }
  }
  const Overrides overrides = ParseOverrides(extras);
  if (!overrides.empty()) {
    // Resolve names against a complete document; an experiment config may
    // still lack its data source or estimator list at this point.
    Json probe = raw;
    if (std::string(kind) == "experiment" && probe.is_object()) {
      if (probe.value("scenario", Json()).is_null() &&
          probe.value("dataset", Json()).is_null()) {
        probe["scenario"] = Json::object();
      }
    }
    const Json defaults = Json::parse(Normalize(kind, probe));
    for (const auto& [key, value] : overrides) {
      SetPath(raw, Resolve(defaults, key), ParseValue(value));
    }
  }
  return Json::parse(Normalize(kind, raw));
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct Paths {
  std::string config;
  std::string data;
  std::string error_data;
  std::string dev;
  std::string init;
  std::string bundle;
  std::string out;
  std::string output_dir;
  std::string label = "model";
  int ece_bins = 100;
  bool per_tag = false;
  bool uncalibrated = false;
  bool print_json = false;
};

int RunSynth(const Paths& p, const std::vector<std::string>& extras) {
  const Json scenario = BuildConfig("scenario", p.config, extras);
  uq_dataset* raw = nullptr;
  Check(uq_dataset_synthesize(scenario.dump().c_str(), &raw), "synth");
  DatasetPtr ds(raw);
  Check(uq_dataset_save(ds.get(), p.out.c_str()), "writing " + p.out);
  std::printf("wrote %zu records (dim %d) to %s\n", uq_dataset_size(ds.get()),
              uq_dataset_dim(ds.get()), p.out.c_str());
  return kExitOk;
}

int RunTrain(const Paths& p, const std::vector<std::string>& extras) {
  const Json config = BuildConfig("estimator", p.config, extras);
  DatasetPtr train = LoadData(p.data);
  DatasetPtr error_split;
  if (config["kind"] == "DUP") {
    if (!p.error_data.empty()) {
      error_split = LoadData(p.error_data);
    } else {
      // Same proportions as the experiment protocol's q/e parts.
      const double fractions[2] = {0.5 / 0.85, 0.35 / 0.85};
      uq_dataset* parts[2] = {nullptr, nullptr};
      Check(uq_dataset_split(train.get(), fractions, 2,
                             config["training"]["seed"].get<std::uint64_t>(),
                             parts),
            "splitting training data");
      train.reset(parts[0]);
      error_split.reset(parts[1]);
      std::printf("split %s into %zu (quality) + %zu (error) records\n",
                  p.data.c_str(), uq_dataset_size(train.get()),
                  uq_dataset_size(error_split.get()));
    }
  }
  EstimatorPtr init;
  if (!p.init.empty()) {
    uq_estimator* e = nullptr;
    Check(uq_estimator_load(p.init.c_str(), &e), "loading " + p.init);
    init.reset(e);
  }
  uq_estimator* trained = nullptr;
  Check(uq_estimator_train(config.dump().c_str(), train.get(),
                           error_split.get(), init.get(), &trained),
        "training");
  EstimatorPtr est(trained);
  if (!p.dev.empty()) {
    DatasetPtr dev = LoadData(p.dev);
    Check(uq_estimator_calibrate(est.get(), dev.get()), "calibrating");
  }
  EnsureDir(p.out);
  Check(uq_estimator_save(est.get(), p.out.c_str()), "saving " + p.out);
  char* info = nullptr;
  Check(uq_estimator_info_json(est.get(), &info), "info");
  const Json j = Json::parse(Take(info));
  const auto& losses = j["epoch_loss"];
  std::printf("trained %s on %zu records, %zu epochs", config["kind"]
                  .get<std::string>().c_str(),
              uq_dataset_size(train.get()), losses.size());
  if (!losses.empty()) {
    std::printf(", final loss %.6f", losses.back().get<double>());
  }
  std::printf("\nvariance scale %.6f; saved to %s\n",
              j["calibration"]["scale"].get<double>(), p.out.c_str());
  return kExitOk;
}

int RunCalibrate(const Paths& p, const std::vector<std::string>& extras) {
  if (!extras.empty()) {
    throw Failure{kExitConfig, "unexpected argument '" + extras.front() + "'"};
  }
  uq_estimator* loaded = nullptr;
  Check(uq_estimator_load(p.bundle.c_str(), &loaded), "loading " + p.bundle);
  EstimatorPtr est(loaded);
  DatasetPtr dev = LoadData(p.data);
  Check(p.per_tag ? uq_estimator_calibrate_by_tag(est.get(), dev.get())
                  : uq_estimator_calibrate(est.get(), dev.get()),
        "calibrating");
  const std::string out = p.out.empty() ? p.bundle : p.out;
  EnsureDir(out);
  Check(uq_estimator_save(est.get(), out.c_str()), "saving " + out);
  char* info = nullptr;
  Check(uq_estimator_info_json(est.get(), &info), "info");
  const Json j = Json::parse(Take(info));
  std::printf("global variance scale %.6f\n",
              j["calibration"]["scale"].get<double>());
  for (const auto& [tag, cal] : j["tag_calibration"].items()) {
    std::printf("  %s: %.6f\n", tag.c_str(), cal["scale"].get<double>());
  }
  std::printf("saved to %s\n", out.c_str());
  return kExitOk;
}

int RunEvaluate(const Paths& p, const std::vector<std::string>& extras) {
  if (!extras.empty()) {
    throw Failure{kExitConfig, "unexpected argument '" + extras.front() + "'"};
  }
  uq_estimator* loaded = nullptr;
  Check(uq_estimator_load(p.bundle.c_str(), &loaded), "loading " + p.bundle);
  EstimatorPtr est(loaded);
  DatasetPtr data = LoadData(p.data);
  uq_predictions* raw = nullptr;
  Check(uq_estimator_predict(est.get(), data.get(), p.uncalibrated ? 0 : 1, &raw),
        "predicting");
  PredictionsPtr preds(raw);
  char* s = nullptr;
  Check(uq_predictions_metrics_json(preds.get(), p.ece_bins, &s), "metrics");
  const Json metrics = Json::parse(Take(s));
  Check(uq_predictions_metrics_table(preds.get(), p.label.c_str(), p.ece_bins, &s),
        "metrics");
  const std::string table = Take(s);
  std::fputs(table.c_str(), stdout);
  if (!p.output_dir.empty()) {
    Check(uq_estimator_info_json(est.get(), &s), "info");
    Json info = Json::parse(Take(s));
    info.erase("epoch_loss");
    Json report;
    report["experiment"] = "evaluate";
    report["bundle"] = p.bundle;
    report["data"] = p.data;
    report["calibrated"] = !p.uncalibrated;
    report["estimator"] = info;
    report["metrics"] = metrics;
    EnsureDir(p.output_dir);
    const std::filesystem::path dir(p.output_dir);
    WriteText((dir / "report.json").string(), report.dump(2) + "\n");
    WriteText((dir / "report.txt").string(), table);
    Check(uq_predictions_csv(preds.get(), &s), "csv");
    WriteText((dir / "predictions.csv").string(), Take(s));
  }
  if (p.print_json) std::printf("%s\n", metrics.dump(2).c_str());
  return kExitOk;
}

int RunExperiment(const std::string& name, const Paths& p,
                  const std::vector<std::string>& extras) {
  const Json config = BuildConfig("experiment", p.config, extras);
  char* report = nullptr;
  char* table = nullptr;
  Check(uq_run_experiment(name.c_str(), config.dump().c_str(), &report, &table),
        name);
  const std::string json = Take(report);
  std::fputs(Take(table).c_str(), stdout);
  if (p.print_json) std::printf("%s\n", json.c_str());
  const std::string dir = config.value("output_dir", "");
  if (!dir.empty()) std::printf("report written to %s\n", dir.c_str());
  // Failed rows are isolated; the run only fails when nothing succeeded.
  const Json parsed = Json::parse(json);
  for (const auto& row : parsed["results"]) {
    if (!row.contains("error")) return kExitOk;
  }
  std::fprintf(stderr, "uqreg: %s: every estimator failed\n", name.c_str());
  return kExitTraining;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty estimation for regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", uq_version());
  Paths p;

  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    return sub;
  };

  CLI::App* synth = add("synth", "Generate a synthetic scenario dataset");
  synth->add_option("--config", p.config, "Scenario JSON");
  synth->add_option("--out", p.out, "Output JSON-lines file")->required();

  CLI::App* train = add("train", "Train an estimator");
  train->add_option("--config", p.config, "Estimator JSON");
  train->add_option("--data", p.data, "Training data (JSON lines)")->required();
  train->add_option("--error-data", p.error_data,
                    "DUP: disjoint data for the error model (default: split "
                    "--data)");
  train->add_option("--dev", p.dev, "Calibrate on this data after training");
  train->add_option("--init", p.init, "Continue training from this bundle");
  train->add_option("--out", p.out, "Output bundle directory")->required();

  CLI::App* calibrate = add("calibrate", "Fit the variance scale of a bundle");
  calibrate->add_option("--bundle", p.bundle, "Estimator bundle")->required();
  calibrate->add_option("--data", p.data, "Development data")->required();
  calibrate->add_flag("--per-tag", p.per_tag, "One scale per domain tag");
  calibrate->add_option("--out", p.out, "Output bundle (default: in place)");

  CLI::App* evaluate = add("evaluate", "Score a bundle on labelled data");
  evaluate->add_option("--bundle", p.bundle, "Estimator bundle")->required();
  evaluate->add_option("--data", p.data, "Test data")->required();
  evaluate->add_option("--output_dir", p.output_dir,
                       "Write report.json, report.txt, predictions.csv");
  evaluate->add_option("--ece_bins", p.ece_bins, "ECE bins")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--label", p.label, "Row label");
  evaluate->add_flag("--uncalibrated", p.uncalibrated,
                     "Ignore the fitted variance scale");
  evaluate->add_flag("--print-json", p.print_json, "Print metrics as JSON");

  const std::vector<std::pair<const char*, const char*>> experiments = {
      {"compare", "Compare estimators on one benchmark"},
      {"noisy-ref", "Clean vs noisy reference detection"},
      {"ood", "In-domain vs out-of-domain sharpness"},
      {"bench", "Training and inference wall-clock times"},
      {"ablate-dup", "DUP error-model loss ablation"},
  };
  for (const auto& [name, help] : experiments) {
    CLI::App* sub = add(name, help);
    sub->add_option("--config", p.config, "Experiment JSON");
    sub->add_flag("--print-json", p.print_json, "Print the JSON report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::vector<std::string> extras = sub->remaining();
    const std::string name = sub->get_name();
    if (name == "synth") return RunSynth(p, extras);
    if (name == "train") return RunTrain(p, extras);
    if (name == "calibrate") return RunCalibrate(p, extras);
    if (name == "evaluate") return RunEvaluate(p, extras);
    return RunExperiment(name, p, extras);
  } catch (const Failure& f) {
    std::fprintf(stderr, "uqreg: %s\n", f.message.c_str());
    return f.code;
  } catch (const Json::exception& e) {
    std::fprintf(stderr, "uqreg: %s\n", e.what());
    return kExitConfig;
  }
}
