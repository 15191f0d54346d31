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
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "uqreg/error.hpp"
#include "uqreg/metrics.hpp"
#include "uqreg/random.hpp"

namespace uqreg::calibration {
namespace {

PredictionSet MakeSet(const std::vector<double>& mean,
                      const std::vector<double>& variance,
                      const std::vector<double>& gold) {
  std::vector<PredictedSegment> s;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    s.push_back({"s" + std::to_string(i), mean[i], variance[i], gold[i]});
  }
  return PredictionSet(std::move(s));
}

PredictionSet RandomSet(RandomEngine& rng, int n) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> v(0.01, 4.0);
  std::uniform_real_distribution<double> mis(0.2, 5.0);
  const double miscalibration = mis(rng);
  std::vector<double> mean(n), var(n), gold(n);
  for (int i = 0; i < n; ++i) {
    mean[i] = z(rng);
    const double true_var = v(rng);
    var[i] = true_var * miscalibration;
    gold[i] = mean[i] + std::sqrt(true_var) * z(rng);
  }
  return MakeSet(mean, var, gold);
}

TEST(FitVarianceScale, FixedPoint) {
  // Each squared residual equals its variance.
  const PredictionSet p = MakeSet({0, 1, -1}, {0.25, 4.0, 1.0}, {0.5, -1, 0});
  EXPECT_NEAR(FitVarianceScale(p).scale, 1.0, 1e-12);
  EXPECT_NEAR(FitVarianceScale(MakeSet({0, 0}, {1, 1}, {1, -1})).scale, 1.0,
              1e-12);
}

TEST(FitVarianceScale, RecordsProvenance) {
  const CalibrationScale c =
      FitVarianceScale(MakeSet({0, 0}, {1, 1}, {2, 0}), "dev-set");
  EXPECT_DOUBLE_EQ(c.scale, 2.0);
  EXPECT_EQ(c.fitted_on, "dev-set");
  EXPECT_EQ(c.objective, "NLL");
}

TEST(FitVarianceScale, RejectsDegenerateInput) {
  EXPECT_THROW(FitVarianceScale(PredictionSet()), InvalidInputError);
  EXPECT_THROW(FitVarianceScale(MakeSet({0, 0}, {1, 0}, {1, 1})),
               InvalidInputError);
  EXPECT_THROW(FitVarianceScale(MakeSet({1, 2}, {1, 1}, {1, 2})),
               InvalidInputError);
}

TEST(FitVarianceScale, BeatsRandomScales) {
  RandomEngine rng(31);
  std::uniform_real_distribution<double> log_scale(std::log(0.01),
                                                   std::log(100.0));
  for (int set = 0; set < 20; ++set) {
    const PredictionSet p = RandomSet(rng, 200);
    const CalibrationScale c = FitVarianceScale(p);
    const double best = metrics::Nll(ApplyScale(p, c));
    EXPECT_LE(best, metrics::Nll(p) + 1e-12);
    for (int k = 0; k < 100; ++k) {
      const CalibrationScale other{std::exp(log_scale(rng)), "", "NLL"};
      EXPECT_LE(best, metrics::Nll(ApplyScale(p, other)) + 1e-12);
    }
  }
}

TEST(ApplyScale, Examples) {
  const PredictionSet p = MakeSet({0.1, 0.4, -0.2}, {1, 2, 3}, {0, 1, 0});
  const PredictionSet same = ApplyScale(p, {1.0, "", "NLL"});
  EXPECT_EQ(same.variances(), p.variances());
  const PredictionSet four = ApplyScale(p, {4.0, "", "NLL"});
  EXPECT_DOUBLE_EQ(metrics::Sharpness(four), 4.0 * metrics::Sharpness(p));
  EXPECT_DOUBLE_EQ(metrics::Pps(four), metrics::Pps(p));
  EXPECT_EQ(four.means(), p.means());
}

TEST(OptimalFixedVariance, Examples) {
  EXPECT_DOUBLE_EQ(OptimalFixedVariance(MakeSet({0, 0}, {1, 1}, {1, -1})), 1.0);
  EXPECT_DOUBLE_EQ(OptimalFixedVariance(MakeSet({1, 2}, {1, 1}, {1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(OptimalFixedVariance(MakeSet({0, 0}, {1, 1}, {0, 2})), 2.0);
}

TEST(OptimalFixedVariance, ComposesWithNll) {
  const PredictionSet p = MakeSet({0, 0}, {3, 7}, {1, -1});
  const double v = OptimalFixedVariance(p);
  EXPECT_NEAR(metrics::Nll(WithFixedVariance(p, v)), 1.418939, 1e-6);
}

TEST(OptimalFixedVariance, BeatsRandomFixedVariances) {
  RandomEngine rng(12);
  std::uniform_real_distribution<double> log_var(std::log(1e-3), std::log(1e3));
  const PredictionSet p = RandomSet(rng, 500);
  const double best = metrics::Nll(WithFixedVariance(p, OptimalFixedVariance(p)));
  for (int k = 0; k < 100; ++k) {
    EXPECT_LE(best, metrics::Nll(WithFixedVariance(p, std::exp(log_var(rng)))));
  }
}

}  // namespace
}  // namespace uqreg::calibration
