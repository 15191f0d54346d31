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

#include "uqreg/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "uqreg/error.hpp"

namespace uqreg {
namespace {

void RequireFinite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvalidInputError(std::string(what) + " is not finite");
  }
}

}  // namespace

double GaussianPrediction::variance() const {
  const double v = std::exp(log_variance);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInputError("predicted variance is not positive and finite");
  }
  return v;
}

double GaussianPrediction::stddev() const { return std::sqrt(variance()); }

GaussianPrediction GaussianPrediction::FromVariance(double mean,
                                                    double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw InvalidInputError("variance must be positive and finite");
  }
  return {mean, std::log(variance)};
}

AnnotatorTarget AnnotatorTarget::FromScores(std::span<const double> scores) {
  if (scores.empty()) throw InvalidInputError("no annotator scores");
  AnnotatorTarget t;
  t.count = static_cast<int>(scores.size());
  double sum = 0.0;
  for (double s : scores) sum += s;
  t.mean = sum / t.count;
  if (t.count >= 2) {
    double ss = 0.0;
    for (double s : scores) ss += (s - t.mean) * (s - t.mean);
    t.variance = ss / (t.count - 1);
  }
  return t;
}

AnnotatorTarget AnnotatorTarget::Floored(double floor) const {
  AnnotatorTarget t = *this;
  t.variance = std::max(t.variance, floor);
  return t;
}

std::string DupLossName(DupLoss loss) {
  switch (loss) {
    case DupLoss::kAbs:
      return "ABS";
    case DupLoss::kSq:
      return "SQ";
    case DupLoss::kHts:
      return "HTS";
  }
  return "?";
}

DupLoss ParseDupLoss(const std::string& name) {
  if (name == "ABS" || name == "abs") return DupLoss::kAbs;
  if (name == "SQ" || name == "sq") return DupLoss::kSq;
  if (name == "HTS" || name == "hts") return DupLoss::kHts;
  throw ConfigError("unknown DUP loss '" + name + "' (expected ABS, SQ, HTS)");
}

double MseLoss(double prediction_mean, double target) {
  RequireFinite(prediction_mean, "prediction");
  RequireFinite(target, "target");
  const double r = target - prediction_mean;
  return r * r;
}

double HtsLoss(const GaussianPrediction& pred, double target) {
  RequireFinite(target, "target");
  const double var = pred.variance();
  const double r = target - pred.mean;
  return r * r / (2.0 * var) + 0.5 * pred.log_variance;
}

double KlLoss(const GaussianPrediction& pred, const AnnotatorTarget& target) {
  if (!(target.variance > 0.0)) {
    throw InvalidInputError(
        "degenerate annotator variance: apply the variance floor first");
  }
  const double var = pred.variance();
  const double d = target.mean - pred.mean;
  return (d * d + target.variance) / (2.0 * var) +
         0.5 * (pred.log_variance - std::log(target.variance)) - 0.5;
}

double DupAbsLoss(double pred_error, const ErrorTarget& target) {
  const double d = target.error - pred_error;
  return d * d;
}

double DupSqLoss(double pred_error, const ErrorTarget& target) {
  const double d = target.error * target.error - pred_error * pred_error;
  return d * d;
}

double DupHtsLoss(double pred_error, const ErrorTarget& target) {
  if (!(pred_error > 0.0)) {
    throw InvalidInputError("DUP HTS loss requires a positive predicted error");
  }
  const double e2 = pred_error * pred_error;
  return target.error * target.error / (2.0 * e2) + 0.5 * std::log(e2);
}

double DupLossValue(DupLoss loss, double pred_error, const ErrorTarget& t) {
  switch (loss) {
    case DupLoss::kAbs:
      return DupAbsLoss(pred_error, t);
    case DupLoss::kSq:
      return DupSqLoss(pred_error, t);
    case DupLoss::kHts:
      return DupHtsLoss(pred_error, t);
  }
  return 0.0;
}

double ErrorFromHead(double raw_log_sq_error) {
  return std::exp(
      0.5 * std::clamp(raw_log_sq_error, kLogVarianceMin, kLogVarianceMax));
}

namespace graph_loss {

using nn::Graph;
using nn::Matrix;
using nn::Var;

Var Mse(Graph& g, Var head, const Matrix& target) {
  Var mean = g.Column(head, 0);
  return g.Mean(g.Square(g.Sub(g.Leaf(target), mean)));
}

Var Hts(Graph& g, Var head, const Matrix& target) {
  Var mean = g.Column(head, 0);
  Var log_var = g.Clamp(g.Column(head, 1), kLogVarianceMin, kLogVarianceMax);
  Var sq = g.Square(g.Sub(g.Leaf(target), mean));
  // r^2 / (2 var) = 0.5 * r^2 * exp(-log_var)
  Var fit = g.Scale(g.Mul(sq, g.Exp(g.Scale(log_var, -1.0))), 0.5);
  return g.Mean(g.Add(fit, g.Scale(log_var, 0.5)));
}

Var Kl(Graph& g, Var head, const Matrix& target_mean,
       const Matrix& target_variance) {
  if ((target_variance.array() <= 0.0).any()) {
    throw InvalidInputError(
        "degenerate annotator variance: apply the variance floor first");
  }
  Var mean = g.Column(head, 0);
  Var log_var = g.Clamp(g.Column(head, 1), kLogVarianceMin, kLogVarianceMax);
  Var num = g.Add(g.Square(g.Sub(g.Leaf(target_mean), mean)),
                  g.Leaf(target_variance));
  Var fit = g.Scale(g.Mul(num, g.Exp(g.Scale(log_var, -1.0))), 0.5);
  Var log_ratio = g.Sub(log_var, g.Leaf(target_variance.array().log().matrix()));
  return g.Mean(g.AddScalar(g.Add(fit, g.Scale(log_ratio, 0.5)), -0.5));
}

Var Dup(Graph& g, Var head, const Matrix& target_error, DupLoss loss) {
  // raw = log eps_hat^2, so eps_hat = exp(raw / 2) and eps_hat^2 = exp(raw).
  Var raw = g.Clamp(g.Column(head, 0), kLogVarianceMin, kLogVarianceMax);
  Var target = g.Leaf(target_error);
  switch (loss) {
    case DupLoss::kAbs: {
      Var eps = g.Exp(g.Scale(raw, 0.5));
      return g.Mean(g.Square(g.Sub(target, eps)));
    }
    case DupLoss::kSq: {
      Var eps_sq = g.Exp(raw);
      return g.Mean(g.Square(g.Sub(g.Square(target), eps_sq)));
    }
    case DupLoss::kHts: {
      Var fit = g.Scale(g.Mul(g.Square(target), g.Exp(g.Scale(raw, -1.0))), 0.5);
      return g.Mean(g.Add(fit, g.Scale(raw, 0.5)));
    }
  }
  throw InvalidInputError("unknown DUP loss");
}

}  // namespace graph_loss
}  // namespace uqreg
