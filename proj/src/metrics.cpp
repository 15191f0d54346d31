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

#include "uqreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "uqreg/error.hpp"

namespace uqreg::metrics {
namespace {

// Lower-tail quantile for p in (0, 0.5]: Acklam's rational approximation
// followed by one Newton step on the CDF.
double LowerQuantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  double z;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double density =
      std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  if (density > 0.0) z -= (NormalCdf(z) - p) / density;
  return z;
}

double Mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double NormalCdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double NormalQuantile(double p) {
  constexpr double kMinP = std::numeric_limits<double>::min();
  const double kMaxP = std::nextafter(1.0, 0.0);
  if (std::isnan(p)) throw InvalidInputError("NormalQuantile: NaN probability");
  if (p < kMinP) p = kMinP;
  if (p > kMaxP) p = kMaxP;
  if (p <= 0.5) return LowerQuantile(p);
  return -LowerQuantile(1.0 - p);
}

double Pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidInputError("Pearson: sequences differ in length");
  }
  if (a.size() < 2) throw InvalidInputError("Pearson: need at least 2 points");
  const double ma = Mean(a);
  const double mb = Mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw UndefinedCorrelationError("undefined correlation: constant input");
  }
  const double r = sab / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

double Pps(const PredictionSet& preds) {
  const auto m = preds.means();
  const auto g = preds.golds();
  return Pearson(m, g);
}

double Ups(const PredictionSet& preds) {
  const auto e = preds.abs_errors();
  const auto s = preds.stddevs();
  return Pearson(e, s);
}

double Nll(const PredictionSet& preds) {
  if (preds.empty()) throw InvalidInputError("Nll: empty prediction set");
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double total = 0.0;
  for (const auto& s : preds.segments()) {
    if (!(s.variance > 0.0)) {
      throw InvalidInputError("Nll: non-positive variance for '" + s.id + "'");
    }
    const double r = s.gold - s.mean;
    total += 0.5 * (log2pi + std::log(s.variance)) + r * r / (2.0 * s.variance);
  }
  return total / static_cast<double>(preds.size());
}

double IntervalZ(double gamma) { return NormalQuantile(0.5 * (1.0 + gamma)); }

double Coverage(const PredictionSet& preds, double gamma) {
  if (preds.empty()) throw InvalidInputError("Coverage: empty prediction set");
  const double z = IntervalZ(gamma);
  std::size_t inside = 0;
  for (const auto& s : preds.segments()) {
    if (std::abs(s.gold - s.mean) <= z * std::sqrt(s.variance)) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(preds.size());
}

std::vector<double> CoverageCurve(const PredictionSet& preds, int bins) {
  if (bins < 1) throw InvalidInputError("ECE needs at least one bin");
  if (preds.empty()) throw InvalidInputError("Coverage: empty prediction set");
  // Sort the standardized residuals once; coverage at z is then a count.
  std::vector<double> scaled;
  scaled.reserve(preds.size());
  for (const auto& s : preds.segments()) {
    const double sd = std::sqrt(s.variance);
    const double r = std::abs(s.gold - s.mean);
    scaled.push_back(sd > 0.0 ? r / sd
                              : (r == 0.0 ? 0.0
                                          : std::numeric_limits<double>::infinity()));
  }
  std::sort(scaled.begin(), scaled.end());
  std::vector<double> curve;
  curve.reserve(bins);
  for (int b = 1; b <= bins; ++b) {
    const double z = IntervalZ(static_cast<double>(b) / bins);
    const auto it = std::upper_bound(scaled.begin(), scaled.end(), z);
    curve.push_back(static_cast<double>(it - scaled.begin()) /
                    static_cast<double>(scaled.size()));
  }
  return curve;
}

double Ece(const PredictionSet& preds, int bins) {
  const auto curve = CoverageCurve(preds, bins);
  double total = 0.0;
  for (int b = 1; b <= bins; ++b) {
    total += std::abs(curve[b - 1] - static_cast<double>(b) / bins);
  }
  return total / bins;
}

double Sharpness(std::span<const double> variances) {
  if (variances.empty()) throw InvalidInputError("Sharpness: empty input");
  return Mean(variances);
}

double Sharpness(const PredictionSet& preds) {
  const auto v = preds.variances();
  return Sharpness(v);
}

MetricsReport Report(const PredictionSet& preds, int ece_bins) {
  preds.Validate();
  MetricsReport r;
  r.n = preds.size();
  if (preds.size() >= 2) {
    try {
      r.pps = Pps(preds);
    } catch (const UndefinedCorrelationError&) {
    }
    try {
      r.ups = Ups(preds);
    } catch (const UndefinedCorrelationError&) {
    }
  }
  r.nll = Nll(preds);
  r.ece = Ece(preds, ece_bins);
  r.sharpness = Sharpness(preds);
  return r;
}

}  // namespace uqreg::metrics
