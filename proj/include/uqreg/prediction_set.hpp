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

#ifndef UQREG_PREDICTION_SET_HPP_
#define UQREG_PREDICTION_SET_HPP_

#include <string>
#include <vector>

namespace uqreg {

// Floor applied to every estimator output variance.
inline constexpr double kVarianceFloor = 1e-8;

struct PredictedSegment {
  std::string id;
  double mean = 0.0;
  double variance = 0.0;
  double gold = 0.0;
};

// Per-segment predictive Gaussians with their gold scores. Ids are unique.
class PredictionSet {
 public:
  PredictionSet() = default;
  explicit PredictionSet(std::vector<PredictedSegment> segments);

  // Checks id uniqueness and finiteness; with `require_positive`, also that
  // every variance is > 0.
  void Validate(bool require_positive = true) const;

  const std::vector<PredictedSegment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  const PredictedSegment& operator[](std::size_t i) const {
    return segments_[i];
  }

  std::vector<double> means() const;
  std::vector<double> variances() const;
  std::vector<double> stddevs() const;
  std::vector<double> golds() const;
  std::vector<double> abs_errors() const;

  // CSV with header "id,mean,variance,gold" and full double precision.
  std::string ToCsv() const;

 private:
  std::vector<PredictedSegment> segments_;
};

}  // namespace uqreg

#endif  // UQREG_PREDICTION_SET_HPP_
