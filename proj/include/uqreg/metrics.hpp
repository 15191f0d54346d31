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

// Uncertainty indicators over a PredictionSet: predictive and uncertainty
// Pearson scores, Gaussian NLL, expected calibration error and sharpness.

#ifndef UQREG_METRICS_HPP_
#define UQREG_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqreg/prediction_set.hpp"

namespace uqreg::metrics {

inline constexpr int kDefaultEceBins = 100;

// Standard normal CDF and quantile. NormalQuantile(p) for p in (0, 1);
// p <= 0 / p >= 1 saturate at the most extreme representable probabilities,
// so the result is always finite (|z| <= ~8.3 at the upper end).
double NormalCdf(double z);
double NormalQuantile(double p);

// Throws UndefinedCorrelationError when either sequence is constant, and
// InvalidInputError on length mismatch or fewer than two points.
double Pearson(std::span<const double> a, std::span<const double> b);

double Pps(const PredictionSet& preds);
// Correlates |q* - mu| with sigma (the standard deviation).
double Ups(const PredictionSet& preds);
double Nll(const PredictionSet& preds);

// Half-width multiplier of the centered interval at confidence gamma.
double IntervalZ(double gamma);
// Empirical coverage of the centered interval mu +- z(gamma) sigma.
double Coverage(const PredictionSet& preds, double gamma);
// Coverage at gamma_b = b / bins, b = 1..bins.
std::vector<double> CoverageCurve(const PredictionSet& preds,
                                  int bins = kDefaultEceBins);
double Ece(const PredictionSet& preds, int bins = kDefaultEceBins);

double Sharpness(std::span<const double> variances);
double Sharpness(const PredictionSet& preds);

struct MetricsReport {
  std::optional<double> pps;  // absent when the correlation is undefined
  std::optional<double> ups;
  double nll = 0.0;
  double ece = 0.0;
  double sharpness = 0.0;
  std::size_t n = 0;
};

MetricsReport Report(const PredictionSet& preds, int ece_bins = kDefaultEceBins);

}  // namespace uqreg::metrics

#endif  // UQREG_METRICS_HPP_
