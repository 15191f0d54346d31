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

#ifndef UQREG_CALIBRATION_HPP_
#define UQREG_CALIBRATION_HPP_

#include <string>

#include "uqreg/prediction_set.hpp"

namespace uqreg::calibration {

// Multiplier on predicted variances, fitted by minimizing development-set NLL.
struct CalibrationScale {
  double scale = 1.0;
  std::string fitted_on;
  std::string objective = "NLL";
};

// s = mean((q* - mu)^2 / var), the NLL minimizer over var -> s * var.
// Throws InvalidInputError on an empty set or a non-positive variance, and
// when every residual is zero (no positive scale minimizes the NLL).
CalibrationScale FitVarianceScale(const PredictionSet& dev,
                                  std::string fitted_on = "dev");

PredictionSet ApplyScale(const PredictionSet& preds,
                         const CalibrationScale& cal);

// Mean squared residual: the single variance that minimizes NLL when used for
// every segment.
double OptimalFixedVariance(const PredictionSet& preds);

// Copy of `preds` with every variance replaced by `variance`.
PredictionSet WithFixedVariance(const PredictionSet& preds, double variance);

}  // namespace uqreg::calibration

#endif  // UQREG_CALIBRATION_HPP_
