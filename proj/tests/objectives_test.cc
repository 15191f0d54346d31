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

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "uqreg/error.hpp"
#include "uqreg/random.hpp"

namespace uqreg {
namespace {

using nn::Graph;
using nn::Matrix;
using nn::Var;

constexpr double kTol = 1e-9;

GaussianPrediction Pred(double mean, double variance) {
  return GaussianPrediction::FromVariance(mean, variance);
}

AnnotatorTarget Target(double mean, double variance) {
  AnnotatorTarget t;
  t.mean = mean;
  t.variance = variance;
  t.count = 5;
  return t;
}

TEST(Losses, Mse) {
  EXPECT_NEAR(MseLoss(0.5, 0.5), 0.0, kTol);
  EXPECT_NEAR(MseLoss(0.0, 1.0), 1.0, kTol);
  EXPECT_NEAR(MseLoss(2.0, -1.0), 9.0, kTol);
}

TEST(Losses, Heteroscedastic) {
  EXPECT_NEAR(HtsLoss(Pred(0.5, 1.0), 0.5), 0.0, kTol);
  EXPECT_NEAR(HtsLoss(Pred(0.0, 1.0), 1.0), 0.5, kTol);
  EXPECT_NEAR(HtsLoss(Pred(0.0, 4.0), 2.0), 0.5 + 0.5 * std::log(4.0), kTol);
  EXPECT_NEAR(HtsLoss(Pred(0.0, 4.0), 2.0), 1.193147, 1e-6);
}

TEST(Losses, KlDivergence) {
  EXPECT_NEAR(KlLoss(Pred(0.3, 0.7), Target(0.3, 0.7)), 0.0, kTol);
  EXPECT_NEAR(KlLoss(Pred(0.0, 1.0), Target(1.0, 1.0)), 0.5, kTol);
  EXPECT_NEAR(KlLoss(Pred(0.2, 2.0), Target(0.2, 1.0)),
              0.25 + 0.5 * std::log(2.0) - 0.5, kTol);
  EXPECT_NEAR(KlLoss(Pred(0.2, 2.0), Target(0.2, 1.0)), 0.096574, 1e-6);
}

TEST(Losses, KlRejectsDegenerateAnnotatorVariance) {
  try {
    KlLoss(Pred(0.0, 1.0), Target(0.0, 0.0));
    FAIL() << "expected an error";
  } catch (const InvalidInputError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate annotator variance"),
              std::string::npos);
  }
  EXPECT_GT(KlLoss(Pred(0.0, 1.0), Target(0.0, 0.0).Floored()), 0.0);
}

TEST(Losses, DupAbsolute) {
  EXPECT_NEAR(DupAbsLoss(1.0, {1.0}), 0.0, kTol);
  EXPECT_NEAR(DupAbsLoss(0.0, {2.0}), 4.0, kTol);
  EXPECT_NEAR(DupAbsLoss(0.5, {1.5}), 1.0, kTol);
}

TEST(Losses, DupSquared) {
  EXPECT_NEAR(DupSqLoss(1.0, {1.0}), 0.0, kTol);
  EXPECT_NEAR(DupSqLoss(0.0, {1.0}), 1.0, kTol);
  EXPECT_NEAR(DupSqLoss(1.0, {2.0}), 9.0, kTol);
}

TEST(Losses, DupHeteroscedastic) {
  EXPECT_NEAR(DupHtsLoss(1.0, {0.0}), 0.0, kTol);
  EXPECT_NEAR(DupHtsLoss(1.0, {1.0}), 0.5, kTol);
  EXPECT_NEAR(DupHtsLoss(2.0, {2.0}), 0.5 + 0.5 * std::log(4.0), kTol);
  // eps_hat = eps* is the stationary point.
  const double h = 1e-5;
  EXPECT_NEAR(DupHtsLoss(2.0 + h, {2.0}) - DupHtsLoss(2.0 - h, {2.0}), 0.0,
              1e-9);
  EXPECT_LT(DupHtsLoss(2.0, {2.0}), DupHtsLoss(1.8, {2.0}));
  EXPECT_LT(DupHtsLoss(2.0, {2.0}), DupHtsLoss(2.2, {2.0}));
  EXPECT_THROW(DupHtsLoss(0.0, {1.0}), InvalidInputError);
  EXPECT_THROW(DupHtsLoss(-1.0, {1.0}), InvalidInputError);
}

TEST(Losses, DupDispatchAndNames) {
  for (DupLoss loss : {DupLoss::kAbs, DupLoss::kSq, DupLoss::kHts}) {
    EXPECT_EQ(ParseDupLoss(DupLossName(loss)), loss);
  }
  EXPECT_THROW(ParseDupLoss("L1"), ConfigError);
  EXPECT_DOUBLE_EQ(DupLossValue(DupLoss::kSq, 1.0, {2.0}), 9.0);
}

TEST(Losses, KlGeneralizesHeteroscedastic) {
  RandomEngine rng(123);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> v(0.01, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const GaussianPrediction p = Pred(u(rng), v(rng));
    const AnnotatorTarget t = Target(u(rng), v(rng));
    const double lhs = KlLoss(p, t) - HtsLoss(p, t.mean);
    const double rhs = t.variance / (2.0 * p.variance()) -
                       0.5 * std::log(t.variance) - 0.5;
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(Gaussian, VarianceRoundTrip) {
  EXPECT_NEAR(Pred(1.0, 2.5).variance(), 2.5, 1e-12);
  EXPECT_NEAR(Pred(1.0, 2.5).stddev(), std::sqrt(2.5), 1e-12);
  EXPECT_THROW(Pred(0.0, 0.0), InvalidInputError);
  EXPECT_THROW(Pred(0.0, INFINITY), InvalidInputError);
}

TEST(Annotators, UnbiasedStatistics) {
  const std::vector<double> scores = {1.0, 2.0, 3.0, 6.0};
  const AnnotatorTarget t = AnnotatorTarget::FromScores(scores);
  EXPECT_DOUBLE_EQ(t.mean, 3.0);
  EXPECT_DOUBLE_EQ(t.variance, (4.0 + 1.0 + 0.0 + 9.0) / 3.0);
  EXPECT_EQ(t.count, 4);
  const std::vector<double> same = {0.25, 0.25, 0.25};
  EXPECT_EQ(AnnotatorTarget::FromScores(same).variance, 0.0);
  EXPECT_EQ(AnnotatorTarget::FromScores(same).Floored().variance,
            kAnnotatorVarianceFloor);
}

TEST(ErrorHead, PositivityMap) {
  EXPECT_DOUBLE_EQ(ErrorFromHead(0.0), 1.0);
  EXPECT_NEAR(ErrorFromHead(std::log(4.0)), 2.0, 1e-12);
  EXPECT_GT(ErrorFromHead(-1e6), 0.0);
}

// Graph losses must reproduce the row-mean of the scalar losses.
class GraphLossTest : public ::testing::Test {
 protected:
  void SetUp() override {
    RandomEngine rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::uniform_real_distribution<double> pos(0.05, 2.0);
    head_.resize(kRows, 2);
    target_.resize(kRows, 1);
    target_var_.resize(kRows, 1);
    for (int i = 0; i < kRows; ++i) {
      head_(i, 0) = u(rng);
      head_(i, 1) = u(rng);
      target_(i, 0) = u(rng);
      target_var_(i, 0) = pos(rng);
      error_(i) = pos(rng);
    }
  }

  static constexpr int kRows = 9;
  Matrix head_;
  Matrix target_;
  Matrix target_var_;
  Eigen::VectorXd error_ = Eigen::VectorXd(kRows);
};

TEST_F(GraphLossTest, MatchesScalarForms) {
  double mse = 0, hts = 0, kl = 0, abs = 0, sq = 0, dup_hts = 0;
  for (int i = 0; i < kRows; ++i) {
    const GaussianPrediction p{head_(i, 0), head_(i, 1)};
    mse += MseLoss(p.mean, target_(i, 0));
    hts += HtsLoss(p, target_(i, 0));
    kl += KlLoss(p, Target(target_(i, 0), target_var_(i, 0)));
    const double eps = ErrorFromHead(head_(i, 0));
    abs += DupAbsLoss(eps, {error_(i)});
    sq += DupSqLoss(eps, {error_(i)});
    dup_hts += DupHtsLoss(eps, {error_(i)});
  }
  const Matrix err = error_;
  Graph g;
  const Var h = g.Leaf(head_);
  EXPECT_NEAR(g.value(graph_loss::Mse(g, h, target_))(0, 0), mse / kRows, 1e-12);
  EXPECT_NEAR(g.value(graph_loss::Hts(g, h, target_))(0, 0), hts / kRows, 1e-12);
  EXPECT_NEAR(g.value(graph_loss::Kl(g, h, target_, target_var_))(0, 0),
              kl / kRows, 1e-12);
  EXPECT_NEAR(g.value(graph_loss::Dup(g, h, err, DupLoss::kAbs))(0, 0),
              abs / kRows, 1e-12);
  EXPECT_NEAR(g.value(graph_loss::Dup(g, h, err, DupLoss::kSq))(0, 0),
              sq / kRows, 1e-12);
  EXPECT_NEAR(g.value(graph_loss::Dup(g, h, err, DupLoss::kHts))(0, 0),
              dup_hts / kRows, 1e-12);
}

TEST_F(GraphLossTest, GradientsMatchFiniteDifferences) {
  const Matrix err = error_;
  const std::vector<std::function<Var(Graph&, Var)>> losses = {
      [&](Graph& g, Var h) { return graph_loss::Mse(g, h, target_); },
      [&](Graph& g, Var h) { return graph_loss::Hts(g, h, target_); },
      [&](Graph& g, Var h) { return graph_loss::Kl(g, h, target_, target_var_); },
      [&](Graph& g, Var h) { return graph_loss::Dup(g, h, err, DupLoss::kAbs); },
      [&](Graph& g, Var h) { return graph_loss::Dup(g, h, err, DupLoss::kSq); },
      [&](Graph& g, Var h) { return graph_loss::Dup(g, h, err, DupLoss::kHts); },
  };
  const double step = 1e-5;
  for (std::size_t k = 0; k < losses.size(); ++k) {
    Graph g;
    const Var h = g.Leaf(head_);
    g.Backward(losses[k](g, h));
    for (int i = 0; i < head_.size(); ++i) {
      Matrix plus = head_, minus = head_;
      plus(i) += step;
      minus(i) -= step;
      Graph gp, gm;
      const double fd = (gp.value(losses[k](gp, gp.Leaf(plus)))(0, 0) -
                         gm.value(losses[k](gm, gm.Leaf(minus)))(0, 0)) /
                        (2 * step);
      const double analytic = g.grad(h)(i);
      EXPECT_LT(std::abs(analytic - fd) /
                    std::max({std::abs(analytic), std::abs(fd), 1e-6}),
                1e-4)
          << "loss " << k << " entry " << i;
    }
  }
}

TEST_F(GraphLossTest, ClampedLogVarianceStopsGradient) {
  Matrix head = head_;
  head(0, 1) = 25.0;
  Graph g;
  const Var h = g.Leaf(head);
  g.Backward(graph_loss::Hts(g, h, target_));
  EXPECT_EQ(g.grad(h)(0, 1), 0.0);
  EXPECT_TRUE(std::isfinite(g.value(graph_loss::Hts(g, h, target_))(0, 0)));
}

TEST_F(GraphLossTest, KlRejectsZeroTargetVariance) {
  Matrix var = target_var_;
  var(3, 0) = 0.0;
  Graph g;
  EXPECT_THROW(graph_loss::Kl(g, g.Leaf(head_), target_, var),
               InvalidInputError);
}

}  // namespace
}  // namespace uqreg
