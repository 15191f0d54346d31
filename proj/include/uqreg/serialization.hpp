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

// JSON forms of configurations, networks and reports. Readers are strict:
// unknown keys and wrong types raise ConfigError (IoError for checkpoints).
// Missing keys keep their defaults.

#ifndef UQREG_SERIALIZATION_HPP_
#define UQREG_SERIALIZATION_HPP_

#include <string>

#include <nlohmann/json.hpp>

#include "uqreg/calibration.hpp"
#include "uqreg/datagen.hpp"
#include "uqreg/estimators.hpp"
#include "uqreg/metrics.hpp"
#include "uqreg/nn.hpp"

namespace uqreg::io {

using Json = nlohmann::json;

inline constexpr int kCheckpointVersion = 1;

Json ToJson(const nn::MlpSpec& spec);
nn::MlpSpec MlpSpecFromJson(const Json& j);

// {"format": "uqreg-mlp", "version": 1, "spec": {...}, "weights": [...]}
Json ToJson(const nn::Mlp& model);
nn::Mlp MlpFromJson(const Json& j);
void SaveMlp(const nn::Mlp& model, const std::string& path);
nn::Mlp LoadMlp(const std::string& path);

Json ToJson(const est::TrainingConfig& c);
est::TrainingConfig TrainingConfigFromJson(const Json& j,
                                           est::TrainingConfig base = {});
Json ToJson(const est::ModelConfig& c);
est::ModelConfig ModelConfigFromJson(const Json& j, est::ModelConfig base = {});
Json ToJson(const est::EstimatorConfig& c);
est::EstimatorConfig EstimatorConfigFromJson(const Json& j,
                                             est::EstimatorConfig base = {});

Json ToJson(const calibration::CalibrationScale& c);
calibration::CalibrationScale CalibrationScaleFromJson(const Json& j);

Json ToJson(const data::SyntheticScenario& s);
data::SyntheticScenario ScenarioFromJson(const Json& j,
                                         data::SyntheticScenario base = {});

// Undefined correlations serialize as null.
Json ToJson(const metrics::MetricsReport& r);

// Whole-file helpers. Throw IoError.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);
Json ParseJson(const std::string& text, const std::string& what);

// FNV-1a over the compact dump, as 16 hex digits.
std::string ConfigHash(const Json& j);

}  // namespace uqreg::io

#endif  // UQREG_SERIALIZATION_HPP_
