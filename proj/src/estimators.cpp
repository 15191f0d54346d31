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

#include "uqreg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "uqreg/error.hpp"
#include "uqreg/random.hpp"
#include "uqreg/serialization.hpp"

namespace uqreg::est {
namespace {

namespace fs = std::filesystem;
using nn::Graph;
using nn::Matrix;
using nn::Mlp;
using nn::Var;

// Stream indices under TrainingConfig::seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;
constexpr std::uint64_t kInferenceStream = 3;
constexpr std::uint64_t kMemberStream = 100;

// Builds the batch loss on the tape given the network head and the selected
// rows.
using BatchLoss =
    std::function<Var(Graph&, Var head, std::span<const std::size_t> rows)>;

Matrix ColumnOf(std::span<const double> values,
                std::span<const std::size_t> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), 1);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    m(static_cast<Eigen::Index>(k), 0) = values[rows[k]];
  }
  return m;
}

Mlp TrainLoop(const nn::MlpSpec& spec, const Matrix& features,
              const TrainingConfig& config, const BatchLoss& batch_loss,
              TrainingLog* log, const Mlp* init) {
  config.Validate();
  spec.Validate();
  if (features.rows() == 0) throw InvalidInputError("empty training set");
  if (features.cols() != spec.input_dim) {
    throw InvalidInputError("training features have " +
                            std::to_string(features.cols()) +
                            " columns, model expects " +
                            std::to_string(spec.input_dim));
  }
  Mlp model = init ? *init : Mlp::Initialize(spec, DeriveSeed(config.seed, kInitStream));
  if (init && !(init->spec() == spec)) {
    throw InvalidInputError("warm-start model has a different architecture");
  }
  const std::size_t n = static_cast<std::size_t>(features.rows());
  const std::size_t batch =
      config.batch_size <= 0 ? n
                             : std::min(n, static_cast<std::size_t>(config.batch_size));
  nn::AdamState adam(model.weights().size(), config.learning_rate,
                     config.beta1, config.beta2, config.adam_eps);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  RandomEngine shuffle_rng = MakeEngine(config.seed, kShuffleStream);
  const std::uint64_t dropout_seed = DeriveSeed(config.seed, kDropoutStream);
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(n, begin + batch);
      std::span<const std::size_t> rows(order.data() + begin, end - begin);
      Matrix x(static_cast<Eigen::Index>(rows.size()), features.cols());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        x.row(static_cast<Eigen::Index>(k)) =
            features.row(static_cast<Eigen::Index>(rows[k]));
      }
      Graph graph;
      std::vector<Var> params;
      Var head = model.Forward(graph, graph.Leaf(std::move(x)), params,
                               {true, DeriveSeed(dropout_seed, step)});
      Var loss = batch_loss(graph, head, rows);
      const double value = graph.value(loss)(0, 0);
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite training loss at epoch " +
                            std::to_string(epoch) + ", step " +
                            std::to_string(step));
      }
      graph.Backward(loss);
      const std::vector<double> grad = model.GatherGradient(graph, params);
      nn::AdamStep(adam, model.mutable_weights(), grad);
      epoch_loss += value;
      ++batches;
      ++step;
    }
    if (log) log->epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
  }
  return model;
}

void RequireTargets(const data::TrainingData& data) {
  if (data.size() == 0) throw InvalidInputError("empty training set");
  if (data.targets.size() != data.size() ||
      static_cast<std::size_t>(data.features.rows()) != data.size()) {
    throw InvalidInputError("training data is inconsistent");
  }
}

GaussianPrediction Floored(double mean, double variance) {
  return GaussianPrediction::FromVariance(mean, std::max(variance, kVarianceFloor));
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

std::string EstimatorKindName(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kMcd:
      return "MCD";
    case EstimatorKind::kDe:
      return "DE";
    case EstimatorKind::kHts:
      return "HTS";
    case EstimatorKind::kHtsMcd:
      return "HTS_MCD";
    case EstimatorKind::kKl:
      return "KL";
    case EstimatorKind::kDup:
      return "DUP";
  }
  return "?";
}

EstimatorKind ParseEstimatorKind(const std::string& name) {
  std::string upper = name;
  for (char& c : upper) c = static_cast<char>(std::toupper(c));
  if (upper == "MCD") return EstimatorKind::kMcd;
  if (upper == "DE") return EstimatorKind::kDe;
  if (upper == "HTS") return EstimatorKind::kHts;
  if (upper == "HTS_MCD" || upper == "HTS+MCD") return EstimatorKind::kHtsMcd;
  if (upper == "KL") return EstimatorKind::kKl;
  if (upper == "DUP") return EstimatorKind::kDup;
  throw ConfigError("unknown estimator kind '" + name + "'");
}

void TrainingConfig::Validate() const {
  if (epochs < 0) throw ConfigError("training: epochs must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw ConfigError("training: learning_rate must be > 0");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("training: Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("training: adam_eps must be > 0");
}

void EstimatorConfig::Validate() const {
  training.Validate();
  for (int h : model.hidden_sizes) {
    if (h < 1) throw ConfigError("model: hidden sizes must be >= 1");
  }
  if (!(model.dropout_rate >= 0.0 && model.dropout_rate < 1.0)) {
    throw ConfigError("model: dropout_rate must lie in [0, 1)");
  }
  if ((kind == EstimatorKind::kMcd || kind == EstimatorKind::kHtsMcd) &&
      mcd_samples < 2) {
    throw ConfigError("mcd_samples must be >= 2");
  }
  if (kind == EstimatorKind::kDe && ensemble_size < 2) {
    throw ConfigError("ensemble_size must be >= 2");
  }
  if (kind == EstimatorKind::kDup && bottleneck_dim < 1) {
    throw ConfigError("bottleneck_dim must be >= 1");
  }
}

std::string EstimatorConfig::Label() const {
  if (kind == EstimatorKind::kDup) return "DUP[" + DupLossName(dup_loss) + "]";
  return EstimatorKindName(kind);
}

nn::MlpSpec MakeSpec(const ModelConfig& model, int input_dim, int output_dim) {
  nn::MlpSpec spec;
  spec.input_dim = input_dim;
  spec.hidden_sizes = model.hidden_sizes;
  spec.output_dim = output_dim;
  spec.dropout_rate = model.dropout_rate;
  spec.activation = model.activation;
  spec.Validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Trainers
// ---------------------------------------------------------------------------

Mlp TrainPoint(const nn::MlpSpec& spec, const data::TrainingData& data,
               const TrainingConfig& config, TrainingLog* log,
               const Mlp* init) {
  RequireTargets(data);
  if (spec.output_dim != 1) throw InvalidInputError("point model needs 1 output");
  return TrainLoop(
      spec, data.features, config,
      [&](Graph& g, Var head, std::span<const std::size_t> rows) {
        return graph_loss::Mse(g, head, ColumnOf(data.targets, rows));
      },
      log, init);
}

Mlp TrainHts(const nn::MlpSpec& spec, const data::TrainingData& data,
             const TrainingConfig& config, TrainingLog* log, const Mlp* init) {
  RequireTargets(data);
  if (spec.output_dim != 2) throw InvalidInputError("HTS model needs 2 outputs");
  return TrainLoop(
      spec, data.features, config,
      [&](Graph& g, Var head, std::span<const std::size_t> rows) {
        return graph_loss::Hts(g, head, ColumnOf(data.targets, rows));
      },
      log, init);
}

Mlp TrainKl(const nn::MlpSpec& spec, const data::TrainingData& data,
            const TrainingConfig& config, TrainingLog* log, const Mlp* init) {
  RequireTargets(data);
  if (spec.output_dim != 2) throw InvalidInputError("KL model needs 2 outputs");
  if (data.annotator_scores.size() != data.size()) {
    throw InvalidInputError("KL training requires annotator scores");
  }
  std::vector<double> means(data.size()), variances(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& scores = data.annotator_scores[i];
    if (scores.size() < 2) {
      throw InvalidInputError("record '" + data.ids[i] + "' has " +
                              std::to_string(scores.size()) +
                              " annotator scores; KL training needs >= 2");
    }
    const AnnotatorTarget t = AnnotatorTarget::FromScores(scores).Floored();
    means[i] = t.mean;
    variances[i] = t.variance;
  }
  return TrainLoop(
      spec, data.features, config,
      [&](Graph& g, Var head, std::span<const std::size_t> rows) {
        return graph_loss::Kl(g, head, ColumnOf(means, rows),
                              ColumnOf(variances, rows));
      },
      log, init);
}

Mlp TrainErrorModel(const nn::MlpSpec& spec, const Matrix& features,
                    std::span<const double> errors,
                    const TrainingConfig& config, DupLoss loss,
                    TrainingLog* log) {
  if (spec.output_dim != 1) throw InvalidInputError("error model needs 1 output");
  if (errors.size() != static_cast<std::size_t>(features.rows())) {
    throw InvalidInputError("error targets do not match features");
  }
  for (double e : errors) {
    if (!(e >= 0.0)) throw InvalidInputError("error targets must be >= 0");
  }
  return TrainLoop(
      spec, features, config,
      [&](Graph& g, Var head, std::span<const std::size_t> rows) {
        return graph_loss::Dup(g, head, ColumnOf(errors, rows), loss);
      },
      log, nullptr);
}

// ---------------------------------------------------------------------------
// Predictors
// ---------------------------------------------------------------------------

GaussianPrediction SummarizeSamples(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw InvalidInputError("need at least 2 samples for a variance");
  }
  const double m = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= m;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  return Floored(mean, var / m);
}

TotalUncertainty CombineTotal(std::span<const double> means,
                              std::span<const double> variances) {
  if (means.size() != variances.size() || means.size() < 2) {
    throw InvalidInputError("need matching sample sets of size >= 2");
  }
  const double m = static_cast<double>(means.size());
  TotalUncertainty t;
  for (double q : means) t.mean += q;
  t.mean /= m;
  for (double q : means) t.epistemic += (q - t.mean) * (q - t.mean);
  t.epistemic /= m;
  for (double v : variances) {
    if (!(v >= 0.0)) throw InvalidInputError("sampled variance must be >= 0");
    t.aleatoric += v;
  }
  t.aleatoric /= m;
  return t;
}

std::vector<double> PointPredict(const Mlp& model, const Matrix& x) {
  const Matrix out = model.Forward(x);
  std::vector<double> q(static_cast<std::size_t>(out.rows()));
  for (Eigen::Index i = 0; i < out.rows(); ++i) q[i] = out(i, 0);
  return q;
}

std::vector<GaussianPrediction> HeadPredict(const Mlp& model, const Matrix& x) {
  if (model.spec().output_dim != 2) {
    throw InvalidInputError("head prediction needs a mean + log-variance model");
  }
  const Matrix out = model.Forward(x);
  std::vector<GaussianPrediction> preds(static_cast<std::size_t>(out.rows()));
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double log_var =
        std::clamp(out(i, 1), kLogVarianceMin, kLogVarianceMax);
    preds[i] = Floored(out(i, 0), std::exp(log_var));
  }
  return preds;
}

std::vector<GaussianPrediction> McDropoutPredict(const Mlp& model,
                                                 const Matrix& x, int m,
                                                 std::uint64_t seed) {
  if (!(model.spec().dropout_rate > 0.0)) {
    throw InvalidInputError(
        "MC dropout requires dropout_rate > 0 (variance would be exactly 0)");
  }
  if (m < 2) throw InvalidInputError("MC dropout requires M >= 2 samples");
  const std::size_t rows = static_cast<std::size_t>(x.rows());
  std::vector<std::vector<double>> samples(rows,
                                           std::vector<double>(m, 0.0));
  for (int pass = 0; pass < m; ++pass) {
    const Matrix out = model.Forward(
        x, nn::DropoutSpec{true, DeriveSeed(seed, static_cast<std::uint64_t>(pass))});
    for (std::size_t i = 0; i < rows; ++i) {
      samples[i][pass] = out(static_cast<Eigen::Index>(i), 0);
    }
  }
  std::vector<GaussianPrediction> preds;
  preds.reserve(rows);
  for (const auto& s : samples) preds.push_back(SummarizeSamples(s));
  return preds;
}

std::vector<GaussianPrediction> EnsemblePredict(std::span<const Mlp> models,
                                                const Matrix& x) {
  if (models.size() < 2) throw InvalidInputError("ensemble needs >= 2 models");
  for (const Mlp& m : models) {
    if (m.spec().input_dim != models[0].spec().input_dim) {
      throw InvalidInputError("ensemble members disagree on input dimension");
    }
  }
  const std::size_t rows = static_cast<std::size_t>(x.rows());
  std::vector<std::vector<double>> samples(rows);
  for (const Mlp& model : models) {
    const std::vector<double> q = PointPredict(model, x);
    for (std::size_t i = 0; i < rows; ++i) samples[i].push_back(q[i]);
  }
  std::vector<GaussianPrediction> preds;
  preds.reserve(rows);
  for (const auto& s : samples) preds.push_back(SummarizeSamples(s));
  return preds;
}

std::vector<TotalUncertainty> HtsMcdPredict(const Mlp& hts_model,
                                            const Matrix& x, int m,
                                            std::uint64_t seed) {
  if (hts_model.spec().output_dim != 2) {
    throw InvalidInputError("HTS+MCD needs a mean + log-variance model");
  }
  if (!(hts_model.spec().dropout_rate > 0.0)) {
    throw InvalidInputError(
        "MC dropout requires dropout_rate > 0 (variance would be exactly 0)");
  }
  if (m < 2) throw InvalidInputError("MC dropout requires M >= 2 samples");
  const std::size_t rows = static_cast<std::size_t>(x.rows());
  std::vector<std::vector<double>> means(rows, std::vector<double>(m));
  std::vector<std::vector<double>> vars(rows, std::vector<double>(m));
  for (int pass = 0; pass < m; ++pass) {
    const Matrix out = hts_model.Forward(
        x, nn::DropoutSpec{true, DeriveSeed(seed, static_cast<std::uint64_t>(pass))});
    for (std::size_t i = 0; i < rows; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      means[i][pass] = out(r, 0);
      vars[i][pass] =
          std::exp(std::clamp(out(r, 1), kLogVarianceMin, kLogVarianceMax));
    }
  }
  std::vector<TotalUncertainty> result;
  result.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    result.push_back(CombineTotal(means[i], vars[i]));
  }
  return result;
}

// ---------------------------------------------------------------------------
// DUP
// ---------------------------------------------------------------------------

nn::MlpSpec MakeErrorSpec(const ModelConfig& model, int feature_dim,
                          int bottleneck_dim) {
  ModelConfig m = model;
  if (m.hidden_sizes.empty()) {
    m.hidden_sizes = {bottleneck_dim};
  } else {
    m.hidden_sizes.insert(m.hidden_sizes.begin() + 1, bottleneck_dim);
  }
  return MakeSpec(m, feature_dim + 1, 1);
}

Matrix AugmentWithQuality(const Matrix& x, std::span<const double> q) {
  if (q.size() != static_cast<std::size_t>(x.rows())) {
    throw InvalidInputError("quality column does not match feature rows");
  }
  Matrix out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i, x.cols()) = q[i];
  return out;
}

DupPipeline DupTrain(const EstimatorConfig& config,
                     const data::TrainingData& dataset_q,
                     const data::TrainingData& dataset_e, TrainingLog* log) {
  if (dataset_q.size() == 0 || dataset_e.size() == 0) {
    throw InvalidInputError("DUP needs two non-empty datasets");
  }
  if (dataset_q.dim() != dataset_e.dim()) {
    throw InvalidInputError("DUP datasets disagree on feature dimension");
  }
  const std::unordered_set<std::string> q_ids(dataset_q.ids.begin(),
                                              dataset_q.ids.end());
  for (const auto& id : dataset_e.ids) {
    if (q_ids.count(id)) {
      throw InvalidInputError("DUP datasets overlap on id '" + id + "'");
    }
  }
  DupPipeline pipeline;
  pipeline.bottleneck_dim = config.bottleneck_dim;
  pipeline.quality = TrainPoint(MakeSpec(config.model, dataset_q.dim(), 1),
                                dataset_q, config.training, log);

  const std::vector<double> q_hat =
      PointPredict(pipeline.quality, dataset_e.features);
  std::vector<double> errors(q_hat.size());
  for (std::size_t i = 0; i < q_hat.size(); ++i) {
    errors[i] = std::abs(q_hat[i] - dataset_e.targets[i]);
  }
  TrainingConfig error_training = config.training;
  error_training.seed = DeriveSeed(config.training.seed, kMemberStream + 1);
  pipeline.error = TrainErrorModel(
      MakeErrorSpec(config.model, dataset_e.dim(), config.bottleneck_dim),
      AugmentWithQuality(dataset_e.features, q_hat), errors, error_training,
      config.dup_loss, log);
  return pipeline;
}

std::vector<GaussianPrediction> DupPredict(const DupPipeline& pipeline,
                                           const Matrix& x) {
  const std::vector<double> q_hat = PointPredict(pipeline.quality, x);
  const std::vector<double> raw =
      PointPredict(pipeline.error, AugmentWithQuality(x, q_hat));
  std::vector<GaussianPrediction> preds(q_hat.size());
  for (std::size_t i = 0; i < q_hat.size(); ++i) {
    const double eps = ErrorFromHead(raw[i]);
    preds[i] = Floored(q_hat[i], eps * eps);
  }
  return preds;
}

// ---------------------------------------------------------------------------
// Estimator
// ---------------------------------------------------------------------------

Estimator Estimator::Train(const EstimatorConfig& config,
                           const data::TrainingData& train,
                           const data::TrainingData* error_split,
                           const Estimator* init) {
  config.Validate();
  if (init && init->kind() != config.kind) {
    throw ConfigError("warm start requires an estimator of the same kind");
  }
  Estimator e;
  e.config_ = config;
  const int d = train.dim();
  const TrainingConfig& tc = config.training;
  auto warm = [&](std::size_t i) -> const Mlp* {
    return init && i < init->members_.size() ? &init->members_[i] : nullptr;
  };
  switch (config.kind) {
    case EstimatorKind::kMcd:
      if (!(config.model.dropout_rate > 0.0)) {
        throw InvalidInputError(
            "MC dropout requires dropout_rate > 0 (variance would be exactly 0)");
      }
      e.members_.push_back(
          TrainPoint(MakeSpec(config.model, d, 1), train, tc, &e.log_, warm(0)));
      break;
    case EstimatorKind::kDe:
      for (int i = 0; i < config.ensemble_size; ++i) {
        TrainingConfig member = tc;
        member.seed = DeriveSeed(tc.seed, kMemberStream + static_cast<std::uint64_t>(i));
        e.members_.push_back(TrainPoint(MakeSpec(config.model, d, 1), train,
                                        member, &e.log_, warm(i)));
      }
      break;
    case EstimatorKind::kHtsMcd:
      if (!(config.model.dropout_rate > 0.0)) {
        throw InvalidInputError(
            "MC dropout requires dropout_rate > 0 (variance would be exactly 0)");
      }
      [[fallthrough]];
    case EstimatorKind::kHts:
      e.members_.push_back(
          TrainHts(MakeSpec(config.model, d, 2), train, tc, &e.log_, warm(0)));
      break;
    case EstimatorKind::kKl:
      e.members_.push_back(
          TrainKl(MakeSpec(config.model, d, 2), train, tc, &e.log_, warm(0)));
      break;
    case EstimatorKind::kDup: {
      if (!error_split) {
        throw ConfigError("DUP needs a second, disjoint dataset for M_E");
      }
      DupPipeline p = DupTrain(config, train, *error_split, &e.log_);
      e.members_.push_back(std::move(p.quality));
      e.members_.push_back(std::move(p.error));
      break;
    }
  }
  return e;
}

std::optional<DupPipeline> Estimator::dup() const {
  if (config_.kind != EstimatorKind::kDup || members_.size() != 2) {
    return std::nullopt;
  }
  return DupPipeline{members_[0], members_[1], config_.bottleneck_dim};
}

std::vector<GaussianPrediction> Estimator::PredictRaw(const Matrix& x) const {
  const std::uint64_t seed = DeriveSeed(config_.training.seed, kInferenceStream);
  switch (config_.kind) {
    case EstimatorKind::kMcd:
      return McDropoutPredict(members_.at(0), x, config_.mcd_samples, seed);
    case EstimatorKind::kDe:
      return EnsemblePredict(members_, x);
    case EstimatorKind::kHts:
    case EstimatorKind::kKl:
      return HeadPredict(members_.at(0), x);
    case EstimatorKind::kHtsMcd: {
      const auto totals =
          HtsMcdPredict(members_.at(0), x, config_.mcd_samples, seed);
      std::vector<GaussianPrediction> preds;
      preds.reserve(totals.size());
      for (const auto& t : totals) preds.push_back(Floored(t.mean, t.total()));
      return preds;
    }
    case EstimatorKind::kDup:
      return DupPredict(*dup(), x);
  }
  throw InvalidInputError("unknown estimator kind");
}

PredictionSet Estimator::PredictUncalibrated(
    const data::TrainingData& data) const {
  const auto raw = PredictRaw(data.features);
  std::vector<PredictedSegment> segs;
  segs.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    segs.push_back({data.ids[i], raw[i].mean, raw[i].variance(),
                    data.targets[i]});
  }
  return PredictionSet(std::move(segs));
}

PredictionSet Estimator::Predict(const data::TrainingData& data) const {
  return calibration::ApplyScale(PredictUncalibrated(data), cal_);
}

void Estimator::Calibrate(const data::TrainingData& dev, std::string fitted_on) {
  cal_ = calibration::FitVarianceScale(PredictUncalibrated(dev),
                                       std::move(fitted_on));
}

void Estimator::Save(const std::string& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create checkpoint directory '" + dir + "'");
  io::Json manifest;
  manifest["format"] = "uqreg-estimator";
  manifest["version"] = io::kCheckpointVersion;
  manifest["config"] = io::ToJson(config_);
  manifest["calibration"] = io::ToJson(cal_);
  io::Json files = io::Json::array();
  for (std::size_t i = 0; i < members_.size(); ++i) {
    std::string name;
    if (config_.kind == EstimatorKind::kDup) {
      name = i == 0 ? "quality.json" : "error.json";
    } else {
      name = "member_" + std::to_string(i) + ".json";
    }
    io::SaveMlp(members_[i], (fs::path(dir) / name).string());
    files.push_back(name);
  }
  manifest["members"] = files;
  io::WriteFile((fs::path(dir) / "estimator.json").string(),
                manifest.dump(2) + "\n");
}

Estimator Estimator::Load(const std::string& dir) {
  const std::string path = (fs::path(dir) / "estimator.json").string();
  try {
    const io::Json manifest = io::ParseJson(io::ReadFile(path), path);
    if (manifest.value("format", "") != "uqreg-estimator") {
      throw IoError(path + ": not an estimator bundle");
    }
    if (manifest.value("version", -1) != io::kCheckpointVersion) {
      throw IoError(path + ": unsupported bundle version");
    }
    Estimator e;
    e.config_ = io::EstimatorConfigFromJson(manifest.at("config"));
    e.cal_ = io::CalibrationScaleFromJson(manifest.at("calibration"));
    for (const auto& name : manifest.at("members")) {
      e.members_.push_back(
          io::LoadMlp((fs::path(dir) / name.get<std::string>()).string()));
    }
    const std::size_t expected =
        e.config_.kind == EstimatorKind::kDe
            ? static_cast<std::size_t>(e.config_.ensemble_size)
            : (e.config_.kind == EstimatorKind::kDup ? 2u : 1u);
    if (e.members_.size() != expected) {
      throw IoError(path + ": wrong number of member networks");
    }
    return e;
  } catch (const io::Json::exception& ex) {
    throw IoError(path + ": malformed bundle (" + ex.what() + ")");
  } catch (const ConfigError& ex) {
    throw IoError(path + ": " + ex.what());
  }
}

}  // namespace uqreg::est
