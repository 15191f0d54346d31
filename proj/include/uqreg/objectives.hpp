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

// Training objectives. Each loss exists twice: a scalar closed form used for
// evaluation and tests, and a graph form (batch-averaged) used for training.
// Natural logarithms throughout.

#ifndef UQREG_OBJECTIVES_HPP_
#define UQREG_OBJECTIVES_HPP_

#include <string>

#include "uqreg/nn.hpp"

namespace uqreg {

// Bounds applied to every predicted log-variance (and log squared error).
inline constexpr double kLogVarianceMin = -10.0;
inline constexpr double kLogVarianceMax = 10.0;
// Floor applied to annotator variances before the KL loss.
inline constexpr double kAnnotatorVarianceFloor = 1e-4;

struct GaussianPrediction {
  double mean = 0.0;
  double log_variance = 0.0;

  double variance() const;
  double stddev() const;
  static GaussianPrediction FromVariance(double mean, double variance);
};

// Sample statistics of a record's annotator scores.
struct AnnotatorTarget {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance (k - 1 denominator)
  int count = 1;

  // Requires count >= 2 scores for a positive variance estimate; a single
  // score yields variance 0.
  static AnnotatorTarget FromScores(std::span<const double> scores);
  // Returns a copy with variance raised to at least `floor`.
  AnnotatorTarget Floored(double floor = kAnnotatorVarianceFloor) const;
};

struct ErrorTarget {
  double error = 0.0;  // |q_hat - q_star| >= 0
};

enum class DupLoss { kAbs, kSq, kHts };

std::string DupLossName(DupLoss loss);
DupLoss ParseDupLoss(const std::string& name);

double MseLoss(double prediction_mean, double target);
double HtsLoss(const GaussianPrediction& pred, double target);
// Throws InvalidInputError("degenerate annotator variance") when
// target.variance <= 0.
double KlLoss(const GaussianPrediction& pred, const AnnotatorTarget& target);
double DupAbsLoss(double pred_error, const ErrorTarget& target);
double DupSqLoss(double pred_error, const ErrorTarget& target);
// Throws InvalidInputError when pred_error <= 0.
double DupHtsLoss(double pred_error, const ErrorTarget& target);
double DupLossValue(DupLoss loss, double pred_error, const ErrorTarget& target);

// Positivity map of the error head: eps_hat = exp(raw / 2) with raw clamped.
double ErrorFromHead(double raw_log_sq_error);

namespace graph_loss {

// All graph losses return the mean over rows as a 1 x 1 node. `head` is the
// raw network output; two-output heads carry (mean, log-variance) columns and
// the log-variance is clamped inside the loss. Targets are column vectors.

nn::Var Mse(nn::Graph& g, nn::Var head, const nn::Matrix& target);
nn::Var Hts(nn::Graph& g, nn::Var head, const nn::Matrix& target);
// `target_mean`, `target_variance`: annotator statistics, variance floored.
nn::Var Kl(nn::Graph& g, nn::Var head, const nn::Matrix& target_mean,
           const nn::Matrix& target_variance);
// Single-column head holding the raw log squared error.
nn::Var Dup(nn::Graph& g, nn::Var head, const nn::Matrix& target_error,
            DupLoss loss);

}  // namespace graph_loss

}  // namespace uqreg

#endif  // UQREG_OBJECTIVES_HPP_
