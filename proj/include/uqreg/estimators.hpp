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

// Uncertainty estimators. Each one maps a feature row to a predictive
// Gaussian (mean, variance):
//
//   MCD      point model, mean/variance over M dropout passes
//   DE       ensemble of independently seeded point models
//   HTS      mean + log-variance head trained with the heteroscedastic loss
//   HTS_MCD  HTS head under MC dropout; variance = Var[means] + E[variances]
//   KL       mean + log-variance head fitted to annotator score statistics
//   DUP      point model plus a second network predicting its absolute error

#ifndef UQREG_ESTIMATORS_HPP_
#define UQREG_ESTIMATORS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqreg/calibration.hpp"
#include "uqreg/datagen.hpp"
#include "uqreg/nn.hpp"
#include "uqreg/objectives.hpp"
#include "uqreg/prediction_set.hpp"

namespace uqreg::est {

enum class EstimatorKind { kMcd, kDe, kHts, kHtsMcd, kKl, kDup };

std::string EstimatorKindName(EstimatorKind kind);
EstimatorKind ParseEstimatorKind(const std::string& name);

struct TrainingConfig {
  int epochs = 100;
  int batch_size = 32;  // <= 0 means full batch
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void Validate() const;
};

struct ModelConfig {
  std::vector<int> hidden_sizes = {64, 32};
  double dropout_rate = 0.15;
  nn::Activation activation = nn::Activation::kTanh;
};

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::kHts;
  int mcd_samples = 100;
  int ensemble_size = 5;
  DupLoss dup_loss = DupLoss::kHts;
  int bottleneck_dim = 16;
  ModelConfig model;
  TrainingConfig training;

  // Throws ConfigError.
  void Validate() const;
  // Label used in reports, e.g. "DUP[HTS]" or "MCD".
  std::string Label() const;
};

struct TrainingLog {
  std::vector<double> epoch_loss;
};

nn::MlpSpec MakeSpec(const ModelConfig& model, int input_dim, int output_dim);

// Vanilla point regressor (squared error).
nn::Mlp TrainPoint(const nn::MlpSpec& spec, const data::TrainingData& data,
                   const TrainingConfig& config, TrainingLog* log = nullptr,
                   const nn::Mlp* init = nullptr);
// Two-output head, heteroscedastic loss.
nn::Mlp TrainHts(const nn::MlpSpec& spec, const data::TrainingData& data,
                 const TrainingConfig& config, TrainingLog* log = nullptr,
                 const nn::Mlp* init = nullptr);
// Two-output head, KL loss against floored annotator statistics. Throws
// InvalidInputError when any record has fewer than two annotator scores.
nn::Mlp TrainKl(const nn::MlpSpec& spec, const data::TrainingData& data,
                const TrainingConfig& config, TrainingLog* log = nullptr,
                const nn::Mlp* init = nullptr);
// Single-output error head (raw log squared error) trained with a DUP loss.
nn::Mlp TrainErrorModel(const nn::MlpSpec& spec, const nn::Matrix& features,
                        std::span<const double> errors,
                        const TrainingConfig& config, DupLoss loss,
                        TrainingLog* log = nullptr);

// Mean and population (1/M) variance of member outputs, variance floored.
GaussianPrediction SummarizeSamples(std::span<const double> samples);

struct TotalUncertainty {
  double mean = 0.0;
  double epistemic = 0.0;  // population variance of sampled means
  double aleatoric = 0.0;  // mean of sampled variances
  double total() const { return epistemic + aleatoric; }
};

// Var[Q] + E[Sigma] over M paired samples.
TotalUncertainty CombineTotal(std::span<const double> means,
                              std::span<const double> variances);

// Deterministic two-output head (HTS, KL): clamped log-variance.
std::vector<GaussianPrediction> HeadPredict(const nn::Mlp& model,
                                            const nn::Matrix& x);
std::vector<double> PointPredict(const nn::Mlp& model, const nn::Matrix& x);

// Refuses models with dropout_rate == 0 and M < 2.
std::vector<GaussianPrediction> McDropoutPredict(const nn::Mlp& model,
                                                 const nn::Matrix& x, int m,
                                                 std::uint64_t seed);
std::vector<GaussianPrediction> EnsemblePredict(std::span<const nn::Mlp> models,
                                                const nn::Matrix& x);
std::vector<TotalUncertainty> HtsMcdPredict(const nn::Mlp& hts_model,
                                            const nn::Matrix& x, int m,
                                            std::uint64_t seed);

// Two-step error predictor. The error model sees [features, q_hat] through a
// bottleneck layer inserted after its first hidden layer.
struct DupPipeline {
  nn::Mlp quality;
  nn::Mlp error;
  int bottleneck_dim = 16;
};

nn::MlpSpec MakeErrorSpec(const ModelConfig& model, int feature_dim,
                          int bottleneck_dim);
// [x, q_hat] rows for the error model.
nn::Matrix AugmentWithQuality(const nn::Matrix& x, std::span<const double> q);

// Throws InvalidInputError when the splits share an id or either is empty.
DupPipeline DupTrain(const EstimatorConfig& config,
                     const data::TrainingData& dataset_q,
                     const data::TrainingData& dataset_e,
                     TrainingLog* log = nullptr);
// mean = M_Q(x), variance = eps_hat^2 with eps_hat = M_E(x, q_hat) > 0.
std::vector<GaussianPrediction> DupPredict(const DupPipeline& pipeline,
                                           const nn::Matrix& x);

// A trained estimator of any kind, together with its variance calibration.
// Immutable after training/calibration; Predict() is safe to call
// concurrently.
class Estimator {
 public:
  // `error_split` is required for DUP (the disjoint second dataset) and
  // ignored otherwise. `init` warm-starts single-network kinds from an
  // existing estimator of the same kind (continued training).
  static Estimator Train(const EstimatorConfig& config,
                         const data::TrainingData& train,
                         const data::TrainingData* error_split = nullptr,
                         const Estimator* init = nullptr);

  // Uncalibrated predictive Gaussians, variance floored.
  std::vector<GaussianPrediction> PredictRaw(const nn::Matrix& x) const;
  // Calibrated prediction set against the data's gold scores.
  PredictionSet Predict(const data::TrainingData& data) const;
  PredictionSet PredictUncalibrated(const data::TrainingData& data) const;

  void Calibrate(const data::TrainingData& dev, std::string fitted_on = "dev");
  const calibration::CalibrationScale& calibration() const { return cal_; }
  void set_calibration(calibration::CalibrationScale cal) {
    cal_ = std::move(cal);
  }

  const EstimatorConfig& config() const { return config_; }
  EstimatorKind kind() const { return config_.kind; }
  const std::vector<nn::Mlp>& members() const { return members_; }
  std::optional<DupPipeline> dup() const;
  const TrainingLog& log() const { return log_; }

  // Checkpoint bundle: <dir>/estimator.json plus one weight file per network.
  void Save(const std::string& dir) const;
  static Estimator Load(const std::string& dir);

 private:
  EstimatorConfig config_;
  std::vector<nn::Mlp> members_;  // DUP: {quality, error}
  calibration::CalibrationScale cal_;
  TrainingLog log_;
};

}  // namespace uqreg::est

#endif  // UQREG_ESTIMATORS_HPP_
