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

#include "uqreg/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "uqreg/error.hpp"

namespace uqreg::io {
namespace {

// Strict object reader: every key must be consumed by Get() before Finish().
class Reader {
 public:
  Reader(const Json& j, std::string context)
      : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) {
      throw ConfigError(context_ + ": expected a JSON object");
    }
  }

  template <typename T>
  void Get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return;
    try {
      out = j_[key].get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(context_ + ": field '" + key + "' has the wrong type");
    }
  }

  // Numbers only; rejects e.g. strings that nlohmann would not convert anyway
  // but also booleans, which it would.
  void GetNumber(const char* key, double& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return;
    if (!j_[key].is_number()) {
      throw ConfigError(context_ + ": field '" + key + "' must be a number");
    }
    out = j_[key].get<double>();
  }

  void GetInt(const char* key, int& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return;
    if (!j_[key].is_number_integer()) {
      throw ConfigError(context_ + ": field '" + key + "' must be an integer");
    }
    out = j_[key].get<int>();
  }

  const Json* Sub(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return nullptr;
    return &j_[key];
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) {
        throw ConfigError(context_ + ": unknown field '" + key + "'");
      }
    }
  }

 private:
  const Json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

}  // namespace

Json ToJson(const nn::MlpSpec& spec) {
  return Json{{"input_dim", spec.input_dim},
              {"hidden_sizes", spec.hidden_sizes},
              {"output_dim", spec.output_dim},
              {"dropout_rate", spec.dropout_rate},
              {"activation", nn::ActivationName(spec.activation)}};
}

nn::MlpSpec MlpSpecFromJson(const Json& j) {
  nn::MlpSpec spec;
  Reader r(j, "mlp spec");
  r.GetInt("input_dim", spec.input_dim);
  r.Get("hidden_sizes", spec.hidden_sizes);
  r.GetInt("output_dim", spec.output_dim);
  r.GetNumber("dropout_rate", spec.dropout_rate);
  std::string activation = nn::ActivationName(spec.activation);
  r.Get("activation", activation);
  spec.activation = nn::ParseActivation(activation);
  r.Finish();
  spec.Validate();
  return spec;
}

Json ToJson(const nn::Mlp& model) {
  return Json{{"format", "uqreg-mlp"},
              {"version", kCheckpointVersion},
              {"spec", ToJson(model.spec())},
              {"weights", std::vector<double>(model.weights().begin(),
                                              model.weights().end())}};
}

nn::Mlp MlpFromJson(const Json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "uqreg-mlp") {
      throw IoError("not a uqreg-mlp checkpoint");
    }
    if (j.value("version", -1) != kCheckpointVersion) {
      throw IoError("unsupported checkpoint version");
    }
    return nn::Mlp(MlpSpecFromJson(j.at("spec")),
                   j.at("weights").get<std::vector<double>>());
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed network checkpoint: ") + e.what());
  } catch (const InvalidInputError& e) {
    throw IoError(std::string("inconsistent network checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("malformed network checkpoint: ") + e.what());
  }
}

void SaveMlp(const nn::Mlp& model, const std::string& path) {
  WriteFile(path, ToJson(model).dump() + "\n");
}

nn::Mlp LoadMlp(const std::string& path) {
  return MlpFromJson(ParseJson(ReadFile(path), path));
}

Json ToJson(const est::TrainingConfig& c) {
  return Json{{"epochs", c.epochs},           {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate}, {"seed", c.seed},
              {"beta1", c.beta1},             {"beta2", c.beta2},
              {"adam_eps", c.adam_eps}};
}

est::TrainingConfig TrainingConfigFromJson(const Json& j,
                                           est::TrainingConfig c) {
  Reader r(j, "training");
  r.GetInt("epochs", c.epochs);
  r.GetInt("batch_size", c.batch_size);
  r.GetNumber("learning_rate", c.learning_rate);
  r.Get("seed", c.seed);
  r.GetNumber("beta1", c.beta1);
  r.GetNumber("beta2", c.beta2);
  r.GetNumber("adam_eps", c.adam_eps);
  r.Finish();
  return c;
}

Json ToJson(const est::ModelConfig& c) {
  return Json{{"hidden_sizes", c.hidden_sizes},
              {"dropout_rate", c.dropout_rate},
              {"activation", nn::ActivationName(c.activation)}};
}

est::ModelConfig ModelConfigFromJson(const Json& j, est::ModelConfig c) {
  Reader r(j, "model");
  r.Get("hidden_sizes", c.hidden_sizes);
  r.GetNumber("dropout_rate", c.dropout_rate);
  std::string activation = nn::ActivationName(c.activation);
  r.Get("activation", activation);
  c.activation = nn::ParseActivation(activation);
  r.Finish();
  return c;
}

Json ToJson(const est::EstimatorConfig& c) {
  return Json{{"kind", est::EstimatorKindName(c.kind)},
              {"mcd_samples", c.mcd_samples},
              {"ensemble_size", c.ensemble_size},
              {"dup_loss", DupLossName(c.dup_loss)},
              {"bottleneck_dim", c.bottleneck_dim},
              {"model", ToJson(c.model)},
              {"training", ToJson(c.training)}};
}

est::EstimatorConfig EstimatorConfigFromJson(const Json& j,
                                             est::EstimatorConfig c) {
  if (j.is_string()) {
    c.kind = est::ParseEstimatorKind(j.get<std::string>());
    return c;
  }
  Reader r(j, "estimator");
  std::string kind = est::EstimatorKindName(c.kind);
  r.Get("kind", kind);
  c.kind = est::ParseEstimatorKind(kind);
  r.GetInt("mcd_samples", c.mcd_samples);
  r.GetInt("ensemble_size", c.ensemble_size);
  std::string loss = DupLossName(c.dup_loss);
  r.Get("dup_loss", loss);
  c.dup_loss = ParseDupLoss(loss);
  r.GetInt("bottleneck_dim", c.bottleneck_dim);
  if (const Json* m = r.Sub("model")) c.model = ModelConfigFromJson(*m, c.model);
  if (const Json* t = r.Sub("training")) {
    c.training = TrainingConfigFromJson(*t, c.training);
  }
  r.Finish();
  return c;
}

Json ToJson(const calibration::CalibrationScale& c) {
  return Json{{"scale", c.scale},
              {"fitted_on", c.fitted_on},
              {"objective", c.objective}};
}

calibration::CalibrationScale CalibrationScaleFromJson(const Json& j) {
  calibration::CalibrationScale c;
  Reader r(j, "calibration");
  r.GetNumber("scale", c.scale);
  r.Get("fitted_on", c.fitted_on);
  r.Get("objective", c.objective);
  r.Finish();
  if (!(c.scale > 0.0)) throw ConfigError("calibration: scale must be > 0");
  if (c.objective != "NLL") {
    throw ConfigError("calibration: unsupported objective '" + c.objective + "'");
  }
  return c;
}

Json ToJson(const data::SyntheticScenario& s) {
  return Json{{"kind", data::ScenarioKindName(s.kind)},
              {"d", s.d},
              {"n", s.n},
              {"seed", s.seed},
              {"noise_a", s.noise_a},
              {"noise_b", s.noise_b},
              {"annotators", s.annotators},
              {"strata_sigma", s.strata_sigma},
              {"shift", s.shift},
              {"n_ood", s.n_ood},
              {"clean_sigma", s.clean_sigma},
              {"noise_ratio", s.noise_ratio},
              {"quality_dims", s.quality_dims},
              {"quality_jitter", s.quality_jitter}};
}

data::SyntheticScenario ScenarioFromJson(const Json& j,
                                         data::SyntheticScenario s) {
  Reader r(j, "scenario");
  std::string kind = data::ScenarioKindName(s.kind);
  r.Get("kind", kind);
  s.kind = data::ParseScenarioKind(kind);
  r.GetInt("d", s.d);
  r.GetInt("n", s.n);
  r.Get("seed", s.seed);
  r.GetNumber("noise_a", s.noise_a);
  r.GetNumber("noise_b", s.noise_b);
  r.GetInt("annotators", s.annotators);
  r.Get("strata_sigma", s.strata_sigma);
  r.GetNumber("shift", s.shift);
  r.GetInt("n_ood", s.n_ood);
  r.GetNumber("clean_sigma", s.clean_sigma);
  r.GetNumber("noise_ratio", s.noise_ratio);
  r.GetInt("quality_dims", s.quality_dims);
  r.GetNumber("quality_jitter", s.quality_jitter);
  r.Finish();
  s.Validate();
  return s;
}

Json ToJson(const metrics::MetricsReport& r) {
  Json j;
  j["pps"] = r.pps ? Json(*r.pps) : Json(nullptr);
  j["ups"] = r.ups ? Json(*r.ups) : Json(nullptr);
  j["nll"] = r.nll;
  j["ece"] = r.ece;
  j["sharpness"] = r.sharpness;
  j["n"] = r.n;
  return j;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw IoError("failed writing '" + path + "'");
}

Json ParseJson(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(what + ": invalid JSON (" + e.what() + ")");
  }
}

std::string ConfigHash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace uqreg::io
