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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Multi-seed criteria use seeds 1, 2, 3 and compare medians.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uqreg/calibration.hpp"
#include "uqreg/datagen.hpp"
#include "uqreg/error.hpp"
#include "uqreg/estimators.hpp"
#include "uqreg/experiments.hpp"
#include "uqreg/metrics.hpp"
#include "uqreg/nn.hpp"
#include "uqreg/objectives.hpp"
#include "uqreg/prediction_set.hpp"
#include "uqreg/random.hpp"

namespace uqreg {
namespace {

using Clock = std::chrono::steady_clock;
using nn::Graph;
using nn::Matrix;
using nn::Var;

constexpr std::uint64_t kSeeds[] = {1, 2, 3};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Num(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string Sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

std::string Join(const std::vector<double>& v, int precision = 3) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += Num(v[i], precision);
  }
  return s + "]";
}

PredictionSet MakeSet(const std::vector<double>& mean,
                      const std::vector<double>& variance,
                      const std::vector<double>& gold) {
  std::vector<PredictedSegment> s;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    s.push_back({"s" + std::to_string(i), mean[i], variance[i], gold[i]});
  }
  return PredictionSet(std::move(s));
}

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

exp::ExperimentConfig FromJson(const io::Json& j) {
  return exp::ExperimentConfigFromJson(j);
}

// ---------------------------------------------------------------------------

Outcome ClosedFormValues() {
  const auto t0 = Clock::now();
  struct Case {
    const char* name;
    double got;
    double want;
  };
  const auto combined = est::CombineTotal(std::vector<double>{0.0, 2.0},
                                          std::vector<double>{1.0, 3.0});
  const auto zero_sigma = est::CombineTotal(std::vector<double>{0.0, 2.0},
                                            std::vector<double>{0.0, 0.0});
  const PredictionSet two = MakeSet({0, 2}, {1, 1}, {1, 1});
  const std::vector<Case> cases = {
      {"mse(0.5,0.5)", MseLoss(0.5, 0.5), 0.0},
      {"mse(0,1)", MseLoss(0.0, 1.0), 1.0},
      {"mse(2,-1)", MseLoss(2.0, -1.0), 9.0},
      {"hts zero residual", HtsLoss(Pred(0.5, 1.0), 0.5), 0.0},
      {"hts unit", HtsLoss(Pred(0.0, 1.0), 1.0), 0.5},
      {"hts var 4", HtsLoss(Pred(0.0, 4.0), 2.0), 0.5 + 0.5 * std::log(4.0)},
      {"kl identical", KlLoss(Pred(0.3, 0.7), Target(0.3, 0.7)), 0.0},
      {"kl shifted", KlLoss(Pred(0.0, 1.0), Target(1.0, 1.0)), 0.5},
      {"kl var 2", KlLoss(Pred(0.2, 2.0), Target(0.2, 1.0)),
       0.25 + 0.5 * std::log(2.0) - 0.5},
      {"dup_abs(1,1)", DupAbsLoss(1.0, {1.0}), 0.0},
      {"dup_abs(0,2)", DupAbsLoss(0.0, {2.0}), 4.0},
      {"dup_abs(0.5,1.5)", DupAbsLoss(0.5, {1.5}), 1.0},
      {"dup_sq(1,1)", DupSqLoss(1.0, {1.0}), 0.0},
      {"dup_sq(0,1)", DupSqLoss(0.0, {1.0}), 1.0},
      {"dup_sq(1,2)", DupSqLoss(1.0, {2.0}), 9.0},
      {"dup_hts(1,0)", DupHtsLoss(1.0, {0.0}), 0.0},
      {"dup_hts(1,1)", DupHtsLoss(1.0, {1.0}), 0.5},
      {"dup_hts(2,2)", DupHtsLoss(2.0, {2.0}), 0.5 + 0.5 * std::log(4.0)},
      {"nll mode", metrics::Nll(MakeSet({0}, {1}, {0})),
       0.5 * std::log(2.0 * M_PI)},
      {"nll unit residual", metrics::Nll(MakeSet({0}, {1}, {1})),
       0.5 * std::log(2.0 * M_PI) + 0.5},
      {"nll with fixed variance",
       metrics::Nll(calibration::WithFixedVariance(
           two, calibration::OptimalFixedVariance(two))),
       0.5 * std::log(2.0 * M_PI) + 0.5},
      {"sharpness {1,3}", metrics::Sharpness(std::vector<double>{1, 3}), 2.0},
      {"sharpness {0,0}", metrics::Sharpness(std::vector<double>{0, 0}), 0.0},
      {"sharpness x4", metrics::Sharpness(std::vector<double>{2, 6}),
       4.0 * metrics::Sharpness(std::vector<double>{0.5, 1.5})},
      {"fixed var {1,1}",
       calibration::OptimalFixedVariance(MakeSet({0, 0}, {1, 1}, {1, -1})), 1.0},
      {"fixed var {0,0}",
       calibration::OptimalFixedVariance(MakeSet({1, 2}, {1, 1}, {1, 2})), 0.0},
      {"fixed var {0,2}",
       calibration::OptimalFixedVariance(MakeSet({0, 0}, {1, 1}, {0, 2})), 2.0},
      {"total Var[Q]", combined.epistemic, 1.0},
      {"total E[S]", combined.aleatoric, 2.0},
      {"total", combined.total(), 3.0},
      {"total with zero S", zero_sigma.total(),
       est::SummarizeSamples(std::vector<double>{0.0, 2.0}).variance()},
  };
  double worst = 0.0;
  std::string worst_name = "-";
  for (const auto& c : cases) {
    const double err = std::abs(c.got - c.want);
    if (!(err <= worst) || std::isnan(err)) {
      worst = std::isnan(err) ? INFINITY : err;
      worst_name = c.name;
    }
  }
  const double secs = Seconds(t0);
  return {worst <= 1e-9 && secs < 1.0,
          std::to_string(cases.size()) + " examples, max abs error " +
              Sci(worst) + " (" + worst_name + ", tol 1e-9), " + Num(secs, 3) +
              " s (limit 1 s)"};
}

Outcome GradientSuite() {
  const auto t0 = Clock::now();
  RandomEngine rng(2026);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  constexpr int kRows = 6;
  constexpr int kNetworks = 10;
  constexpr int kProbesPerNetwork = 10;
  constexpr double kStep = 1e-5;

  Matrix target(kRows, 1), target_var(kRows, 1), error(kRows, 1);
  for (int i = 0; i < kRows; ++i) {
    target(i, 0) = z(rng);
    target_var(i, 0) = pos(rng);
    error(i, 0) = pos(rng);
  }
  struct Objective {
    const char* name;
    int outputs;
    std::function<Var(Graph&, Var)> loss;
  };
  const std::vector<Objective> objectives = {
      {"MSE", 1, [&](Graph& g, Var h) { return graph_loss::Mse(g, h, target); }},
      {"HTS", 2, [&](Graph& g, Var h) { return graph_loss::Hts(g, h, target); }},
      {"KL", 2,
       [&](Graph& g, Var h) {
         return graph_loss::Kl(g, h, target, target_var);
       }},
      {"DUP_ABS", 1,
       [&](Graph& g, Var h) {
         return graph_loss::Dup(g, h, error, DupLoss::kAbs);
       }},
      {"DUP_SQ", 1,
       [&](Graph& g, Var h) {
         return graph_loss::Dup(g, h, error, DupLoss::kSq);
       }},
      {"DUP_HTS", 1,
       [&](Graph& g, Var h) {
         return graph_loss::Dup(g, h, error, DupLoss::kHts);
       }},
  };

  double worst = 0.0;
  std::string worst_name = "-";
  int probes = 0;
  for (const auto& obj : objectives) {
    for (int net = 0; net < kNetworks; ++net) {
      nn::MlpSpec spec;
      spec.input_dim = 3;
      spec.hidden_sizes = {8, 8};
      spec.output_dim = obj.outputs;
      spec.dropout_rate = 0.2;
      // tanh keeps the loss smooth; a ReLU kink inside the stencil makes
      // central differences meaningless.
      spec.activation = nn::Activation::kTanh;
      const nn::Mlp base = nn::Mlp::Initialize(spec, rng());
      Matrix x(kRows, 3);
      for (int i = 0; i < x.size(); ++i) x(i) = z(rng);
      const nn::DropoutSpec mask{true, rng()};
      const auto value = [&](const nn::Mlp& m, std::vector<double>* grad) {
        Graph g;
        std::vector<Var> params;
        const Var loss = obj.loss(g, m.Forward(g, g.Leaf(x), params, mask));
        if (grad) {
          g.Backward(loss);
          *grad = m.GatherGradient(g, params);
        }
        return g.value(loss)(0, 0);
      };
      std::vector<double> grad;
      value(base, &grad);
      std::uniform_int_distribution<std::size_t> pick(0, grad.size() - 1);
      for (int p = 0; p < kProbesPerNetwork; ++p, ++probes) {
        const std::size_t i = pick(rng);
        nn::Mlp plus = base, minus = base;
        plus.mutable_weights()[i] += kStep;
        minus.mutable_weights()[i] -= kStep;
        const double fd = (value(plus, nullptr) - value(minus, nullptr)) /
                          (2.0 * kStep);
        const double rel = std::abs(grad[i] - fd) /
                           std::max({std::abs(grad[i]), std::abs(fd), 1e-6});
        if (!(rel <= worst)) {
          worst = std::isnan(rel) ? INFINITY : rel;
          worst_name = obj.name;
        }
      }
    }
  }
  const double secs = Seconds(t0);
  return {worst <= 1e-4 && secs < 30.0,
          std::to_string(probes) + " probes over 6 objectives, max relative "
                                   "error " +
              Sci(worst) + " (" + worst_name + ", tol 1e-4), " + Num(secs, 2) +
              " s (limit 30 s)"};
}

Outcome GeneralizationIdentity() {
  RandomEngine rng(7);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> var(0.05, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double mu_hat = z(rng), mu_star = z(rng);
    const double v_hat = var(rng), v_star = var(rng);
    const GaussianPrediction p = Pred(mu_hat, v_hat);
    const double lhs = KlLoss(p, Target(mu_star, v_star)) - HtsLoss(p, mu_star);
    const double rhs = v_star / (2.0 * v_hat) - 0.5 * std::log(v_star) - 0.5;
    const double err = std::abs(lhs - rhs);
    if (!(err <= worst)) worst = std::isnan(err) ? INFINITY : err;
  }
  return {worst <= 1e-12,
          "1000 inputs, max abs error " + Sci(worst) + " (tol 1e-12)"};
}

Outcome CalibrationOracle() {
  RandomEngine rng(31);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> v(0.01, 4.0);
  std::uniform_real_distribution<double> mis(0.2, 5.0);
  std::uniform_real_distribution<double> log_scale(std::log(0.01), std::log(100.0));
  std::uniform_real_distribution<double> log_var(std::log(1e-3), std::log(1e3));
  int scale_losses = 0, fixed_losses = 0;
  for (int set = 0; set < 20; ++set) {
    const double factor = mis(rng);
    std::vector<double> mean(200), variance(200), gold(200);
    for (int i = 0; i < 200; ++i) {
      mean[i] = z(rng);
      const double true_var = v(rng);
      variance[i] = factor * true_var;
      gold[i] = mean[i] + std::sqrt(true_var) * z(rng);
    }
    const PredictionSet p = MakeSet(mean, variance, gold);
    const double best =
        metrics::Nll(calibration::ApplyScale(p, calibration::FitVarianceScale(p)));
    const double best_fixed = metrics::Nll(
        calibration::WithFixedVariance(p, calibration::OptimalFixedVariance(p)));
    for (int k = 0; k < 100; ++k) {
      const calibration::CalibrationScale other{std::exp(log_scale(rng)), "", "NLL"};
      scale_losses += best > metrics::Nll(calibration::ApplyScale(p, other));
      fixed_losses += best_fixed > metrics::Nll(calibration::WithFixedVariance(
                                       p, std::exp(log_var(rng))));
    }
  }
  return {scale_losses == 0 && fixed_losses == 0,
          "fitted scale lost " + std::to_string(scale_losses) +
              "/2000 comparisons, fixed variance lost " +
              std::to_string(fixed_losses) + "/2000"};
}

Outcome EceSanity() {
  const auto t0 = Clock::now();
  const auto build = [](double factor) {
    RandomEngine rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> v(0.05, 3.0);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> mean(10000), variance(10000), gold(10000);
    for (int i = 0; i < 10000; ++i) {
      mean[i] = u(rng);
      const double var = v(rng);
      gold[i] = mean[i] + std::sqrt(var) * z(rng);
      variance[i] = factor * var;
    }
    return MakeSet(mean, variance, gold);
  };
  const double calibrated = metrics::Ece(build(1.0), 100);
  const double halved = metrics::Ece(build(0.5), 100);
  const double secs = Seconds(t0);
  return {calibrated <= 0.02 && halved >= 0.05 && secs < 10.0,
          "calibrated ECE " + Num(calibrated) + " (<= 0.02), halved ECE " +
              Num(halved) + " (>= 0.05), " + Num(secs, 2) + " s (limit 10 s)"};
}

Outcome AleatoricRecovery() {
  const auto t0 = Clock::now();
  data::SyntheticScenario s;  // n = 5000, sigma = 0.1 + 0.5 |x0|
  s.seed = 1;
  const data::Dataset ds = data::GenHeteroscedastic(s);
  const auto parts = data::Split(ds, std::vector<double>{0.8, 0.2}, 2);
  est::EstimatorConfig c;
  c.kind = est::EstimatorKind::kHts;
  c.training.seed = 3;
  const est::Estimator e = est::Estimator::Train(c, parts[0].ToTrainingData());
  const auto pred = e.PredictRaw(parts[1].ToTrainingData().features);
  std::vector<double> predicted, truth;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    predicted.push_back(pred[i].stddev());
    truth.push_back(*parts[1].true_sigma(i));
  }
  const double r = metrics::Pearson(predicted, truth);
  const double secs = Seconds(t0);
  return {r >= 0.8 && secs < 180.0,
          "held-out Pearson(sigma_hat, sigma) " + Num(r) + " (>= 0.8), " +
              Num(secs, 1) + " s (limit 180 s)"};
}

Outcome DisagreementRecovery() {
  data::SyntheticScenario s;
  s.kind = data::ScenarioKind::kMultiAnnotator;
  s.annotators = 5;
  s.strata_sigma = {0.1, 0.8};
  s.seed = 1;
  const data::Dataset ds = data::GenMultiAnnotator(s);
  const auto parts = data::Split(ds, std::vector<double>{0.8, 0.2}, 2);
  est::EstimatorConfig c;
  c.kind = est::EstimatorKind::kKl;
  c.training.seed = 3;
  const est::Estimator e = est::Estimator::Train(c, parts[0].ToTrainingData());
  const data::TrainingData test = parts[1].ToTrainingData();
  const auto pred = e.PredictRaw(test.features);
  double sum[2] = {0, 0};
  int count[2] = {0, 0};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    // The last feature flags the stratum: -1 low, +1 high.
    const int k = test.features(static_cast<Eigen::Index>(i), test.dim() - 1) > 0;
    sum[k] += pred[i].stddev();
    ++count[k];
  }
  const double low = sum[0] / count[0], high = sum[1] / count[1];
  return {high >= 2.0 * low,
          "mean sigma_hat low " + Num(low) + ", high " + Num(high) + ", ratio " +
              Num(high / low, 2) + " (>= 2)"};
}

Outcome NoisyReference() {
  std::vector<double> hts, mcd;
  for (std::uint64_t seed : kSeeds) {
    const auto r = exp::RunNoisyReference(
        FromJson({{"scenario", {{"kind", "reference_pairs"}, {"noise_ratio", 5.0}}},
                  {"estimators", "HTS,MCD"},
                  {"seed", seed}}));
    for (const auto& row : r.rows) {
      if (!row.accuracy) throw TrainingError(row.label + ": " + row.error);
    }
    hts.push_back(*r.rows[0].accuracy);
    mcd.push_back(*r.rows[1].accuracy);
  }
  const double h = exp::Median(hts), m = exp::Median(mcd);
  return {h >= 0.85 && m >= 0.35 && m <= 0.65 && h > m,
          "median clean-selection HTS " + Num(h, 3) + " " + Join(hts) +
              " (>= 0.85), MCD " + Num(m, 3) + " " + Join(mcd) +
              " (in [0.35, 0.65]), HTS > MCD"};
}

Outcome OodSharpness() {
  std::vector<double> dup, hts;
  for (std::uint64_t seed : kSeeds) {
    const auto r = exp::RunOodSharpness(
        FromJson({{"scenario", {{"kind", "domain_shift"}}},
                  {"estimators", "DUP,HTS"},
                  {"seed", seed}}));
    for (const auto& row : r.rows) {
      if (!row.ratio) throw TrainingError(row.label + ": " + row.error);
    }
    dup.push_back(*r.rows[0].ratio);
    hts.push_back(*r.rows[1].ratio);
  }
  const double d = exp::Median(dup), h = exp::Median(hts);
  return {d > 1.0 && h >= 0.8 && h <= 1.25,
          "median OOD/in sharpness DUP " + Num(d, 3) + " " + Join(dup) +
              " (> 1), HTS " + Num(h, 3) + " " + Join(hts) +
              " (in [0.8, 1.25])"};
}

// Shared by the DUP-vs-MCD and loss-ablation criteria: the mixed benchmark is
// the domain-shift scenario with in-domain and shifted records pooled before
// splitting.
struct MixedRuns {
  std::map<std::string, std::vector<double>> ups, sharpness;
};

MixedRuns RunMixedBenchmark() {
  MixedRuns runs;
  for (std::uint64_t seed : kSeeds) {
    const auto r = exp::RunComparison(FromJson(
        {{"scenario", {{"kind", "domain_shift"}}},
         {"estimators",
          {"MCD", {{"kind", "DUP"}, {"dup_loss", "ABS"}},
           {{"kind", "DUP"}, {"dup_loss", "SQ"}},
           {{"kind", "DUP"}, {"dup_loss", "HTS"}}}},
         {"seed", seed}}));
    for (const auto& row : r.rows) {
      if (!row.ok() || !row.metrics->ups) {
        throw TrainingError(row.label + ": " + row.error);
      }
      runs.ups[row.label].push_back(*row.metrics->ups);
      runs.sharpness[row.label].push_back(row.metrics->sharpness);
    }
  }
  return runs;
}

Outcome DupVersusMcd(const MixedRuns& runs) {
  const std::string dup = "DUP[HTS]";
  const double dup_ups = exp::Median(runs.ups.at(dup));
  const double mcd_ups = exp::Median(runs.ups.at("MCD"));
  const double dup_sharp = exp::Median(runs.sharpness.at(dup));
  const double mcd_sharp = exp::Median(runs.sharpness.at("MCD"));
  return {dup_ups >= mcd_ups && dup_sharp <= mcd_sharp,
          "median UPS DUP " + Num(dup_ups, 3) + " vs MCD " + Num(mcd_ups, 3) +
              "; median sharpness DUP " + Num(dup_sharp) + " vs MCD " +
              Num(mcd_sharp) + " (calibrated, pooled domain-shift benchmark)"};
}

Outcome DupLossAblation(const MixedRuns& runs) {
  std::vector<double> medians, per_seed_range;
  const std::vector<std::string> labels = {"DUP[ABS]", "DUP[SQ]", "DUP[HTS]"};
  for (const auto& l : labels) medians.push_back(exp::Median(runs.ups.at(l)));
  for (std::size_t s = 0; s < std::size(kSeeds); ++s) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& l : labels) {
      lo = std::min(lo, runs.ups.at(l)[s]);
      hi = std::max(hi, runs.ups.at(l)[s]);
    }
    per_seed_range.push_back(hi - lo);
  }
  const double range = *std::max_element(medians.begin(), medians.end()) -
                       *std::min_element(medians.begin(), medians.end());
  return {range <= 0.05,
          "median UPS ABS/SQ/HTS " + Join(medians) + ", range " + Num(range, 3) +
              " (<= 0.05); per-seed ranges " + Join(per_seed_range)};
}

Outcome CostStructure() {
  const auto r = exp::RunBench(FromJson(
      {{"scenario", {{"kind", "heteroscedastic"}, {"n", 2000}}},
       {"estimators",
        {{{"kind", "MCD"}, {"mcd_samples", 100}}, "HTS",
         {{"kind", "DE"}, {"ensemble_size", 5}}}},
       {"bench_repetitions", 3},
       {"seed", 1}}));
  for (const auto& row : r.rows) {
    if (!row.error.empty()) throw TrainingError(row.label + ": " + row.error);
  }
  const auto& mcd = r.rows[0];
  const auto& hts = r.rows[1];
  const auto& de = r.rows[2];
  // The MCD point model is the single-model training reference.
  const double inference_ratio = mcd.inference_median / hts.inference_median;
  const double training_ratio = de.train_median / mcd.train_median;
  return {inference_ratio >= 20.0 && training_ratio >= 3.0,
          "MCD(M=100)/HTS inference " + Num(inference_ratio, 1) + "x (>= 20x; " +
              Sci(mcd.inference_median) + " s vs " + Sci(hts.inference_median) +
              " s), DE(5)/single training " + Num(training_ratio, 2) +
              "x (>= 3x)"};
}

}  // namespace
}  // namespace uqreg

int main() {
  using uqreg::Outcome;
  int failures = 0;
  const auto report = [&](int id, const char* name,
                          const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] C%02d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "closed-form loss values", uqreg::ClosedFormValues);
  report(2, "gradient suite", uqreg::GradientSuite);
  report(3, "generalization identity", uqreg::GeneralizationIdentity);
  report(4, "calibration oracle", uqreg::CalibrationOracle);
  report(5, "ECE calibration sanity", uqreg::EceSanity);
  report(6, "aleatoric recovery (HTS)", uqreg::AleatoricRecovery);
  report(7, "annotator disagreement recovery (KL)", uqreg::DisagreementRecovery);
  report(8, "noisy-reference detection", uqreg::NoisyReference);
  report(9, "OOD sharpness direction", uqreg::OodSharpness);

  std::optional<uqreg::MixedRuns> mixed;
  std::string mixed_error;
  try {
    mixed = uqreg::RunMixedBenchmark();
  } catch (const std::exception& e) {
    mixed_error = e.what();
  }
  const auto with_mixed = [&](Outcome (*f)(const uqreg::MixedRuns&)) {
    return [&, f]() -> Outcome {
      if (!mixed) return {false, "error: " + mixed_error};
      return f(*mixed);
    };
  };
  report(10, "DUP vs MCD", with_mixed(uqreg::DupVersusMcd));
  report(11, "cost structure", uqreg::CostStructure);
  report(12, "DUP loss ablation", with_mixed(uqreg::DupLossAblation));

  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
