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

#include "uqreg/calibration.hpp"

#include <cmath>

#include "uqreg/error.hpp"

namespace uqreg::calibration {

CalibrationScale FitVarianceScale(const PredictionSet& dev,
                                  std::string fitted_on) {
  if (dev.empty()) throw InvalidInputError("calibration: empty dev set");
  double total = 0.0;
  for (const auto& s : dev.segments()) {
    if (!(s.variance > 0.0)) {
      throw InvalidInputError("calibration: zero variance for segment '" +
                              s.id + "' (floor-clamp upstream)");
    }
    const double r = s.gold - s.mean;
    total += r * r / s.variance;
  }
  const double scale = total / static_cast<double>(dev.size());
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidInputError("calibration: degenerate dev set (all residuals 0)");
  }
  return {scale, std::move(fitted_on), "NLL"};
}

PredictionSet ApplyScale(const PredictionSet& preds,
                         const CalibrationScale& cal) {
  if (!(cal.scale > 0.0)) {
    throw InvalidInputError("calibration scale must be positive");
  }
  std::vector<PredictedSegment> out = preds.segments();
  for (auto& s : out) s.variance *= cal.scale;
  return PredictionSet(std::move(out));
}

double OptimalFixedVariance(const PredictionSet& preds) {
  if (preds.empty()) throw InvalidInputError("empty prediction set");
  double total = 0.0;
  for (const auto& s : preds.segments()) {
    const double r = s.gold - s.mean;
    total += r * r;
  }
  return total / static_cast<double>(preds.size());
}

PredictionSet WithFixedVariance(const PredictionSet& preds, double variance) {
  std::vector<PredictedSegment> out = preds.segments();
  for (auto& s : out) s.variance = variance;
  return PredictionSet(std::move(out));
}

}  // namespace uqreg::calibration
