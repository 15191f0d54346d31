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

#include "uqreg/prediction_set.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "uqreg/error.hpp"

namespace uqreg {

PredictionSet::PredictionSet(std::vector<PredictedSegment> segments)
    : segments_(std::move(segments)) {
  Validate(/*require_positive=*/false);
}

void PredictionSet::Validate(bool require_positive) const {
  std::unordered_set<std::string> seen;
  for (const auto& s : segments_) {
    if (!seen.insert(s.id).second) {
      throw InvalidInputError("duplicate segment id '" + s.id + "'");
    }
    if (!std::isfinite(s.mean) || !std::isfinite(s.variance) ||
        !std::isfinite(s.gold)) {
      throw InvalidInputError("non-finite prediction for segment '" + s.id +
                              "'");
    }
    if (s.variance < 0.0 || (require_positive && s.variance <= 0.0)) {
      throw InvalidInputError("non-positive variance for segment '" + s.id +
                              "'");
    }
  }
}

std::vector<double> PredictionSet::means() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& s : segments_) out.push_back(s.mean);
  return out;
}

std::vector<double> PredictionSet::variances() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& s : segments_) out.push_back(s.variance);
  return out;
}

std::vector<double> PredictionSet::stddevs() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& s : segments_) out.push_back(std::sqrt(s.variance));
  return out;
}

std::vector<double> PredictionSet::golds() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& s : segments_) out.push_back(s.gold);
  return out;
}

std::vector<double> PredictionSet::abs_errors() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& s : segments_) out.push_back(std::abs(s.gold - s.mean));
  return out;
}

std::string PredictionSet::ToCsv() const {
  std::string out = "id,mean,variance,gold\n";
  char buf[128];
  for (const auto& s : segments_) {
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g\n", s.mean,
                  s.variance, s.gold);
    out += s.id;
    out += buf;
  }
  return out;
}

}  // namespace uqreg
