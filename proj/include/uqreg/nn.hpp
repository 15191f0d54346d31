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

// Feed-forward networks with reverse-mode differentiation, inverted dropout
// and Adam. Everything is double precision.

#ifndef UQREG_NN_HPP_
#define UQREG_NN_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uqreg/random.hpp"

namespace uqreg::nn {

using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Computation graph
// ---------------------------------------------------------------------------

enum class OpTag {
  kLeaf,
  kMatMul,
  kAddRowBroadcast,  // a (n x k) + b (1 x k)
  kTanh,
  kRelu,
  kMulConst,  // elementwise product with a constant matrix (dropout masks)
  kColumn,
  kAdd,
  kSub,
  kMul,
  kSquare,
  kExp,
  kLog,
  kScale,
  kAddScalar,
  kClamp,
  kMean,  // mean over all entries -> 1 x 1
};

struct Var {
  int id = -1;
};

struct TensorNode {
  Matrix value;
  Matrix grad;  // same shape as value
  int lhs = -1;
  int rhs = -1;
  OpTag op_tag = OpTag::kLeaf;
  double a = 0.0;  // op parameters (scale factor, clamp bounds, column index)
  double b = 0.0;
  Matrix constant;  // mask for kMulConst
};

// Tape of nodes in creation order. Creation order is a topological order, so
// backward() is a single reverse sweep and visits every node once.
class Graph {
 public:
  Var Leaf(Matrix value);

  Var MatMul(Var a, Var b);
  Var AddRowBroadcast(Var a, Var row);
  Var Tanh(Var a);
  Var Relu(Var a);
  Var MulConst(Var a, Matrix constant);
  Var Column(Var a, int column);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Square(Var a);
  Var Exp(Var a);
  Var Log(Var a);
  Var Scale(Var a, double factor);
  Var AddScalar(Var a, double offset);
  // Gradient is zero where the input lies outside [lo, hi].
  Var Clamp(Var a, double lo, double hi);
  Var Mean(Var a);

  // Requires a 1 x 1 loss. Fills grad of every node reachable from `loss`.
  void Backward(Var loss);

  const Matrix& value(Var v) const { return nodes_.at(v.id).value; }
  const Matrix& grad(Var v) const { return nodes_.at(v.id).grad; }
  const TensorNode& node(Var v) const { return nodes_.at(v.id); }
  std::size_t size() const { return nodes_.size(); }

 private:
  Var Push(TensorNode node);
  TensorNode& at(Var v);

  std::vector<TensorNode> nodes_;
};

// ---------------------------------------------------------------------------
// Multilayer perceptron
// ---------------------------------------------------------------------------

enum class Activation { kTanh, kRelu };

std::string ActivationName(Activation a);
Activation ParseActivation(const std::string& name);

struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_sizes = {64, 32};
  int output_dim = 1;  // 1: point head, 2: mean + log-variance head
  double dropout_rate = 0.15;
  Activation activation = Activation::kTanh;

  // Throws InvalidInputError when an invariant is violated.
  void Validate() const;
  std::size_t ParameterCount() const;
  bool operator==(const MlpSpec&) const = default;
};

struct DropoutSpec {
  bool active = false;
  std::uint64_t seed = 0;
};

class Mlp {
 public:
  Mlp() = default;
  // Zero weights and biases.
  explicit Mlp(MlpSpec spec);
  Mlp(MlpSpec spec, std::vector<double> weights);

  // Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.
  static Mlp Initialize(const MlpSpec& spec, std::uint64_t seed);

  const MlpSpec& spec() const { return spec_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }

  // Inference path, no tape. Rows of `batch` are examples.
  Matrix Forward(const Matrix& batch, const DropoutSpec& dropout = {}) const;

  // Tape path. `params` receives one leaf per weight matrix / bias row, in
  // flat-weight order; GatherGradient() flattens their grads back.
  Var Forward(Graph& graph, Var input, std::vector<Var>& params,
              const DropoutSpec& dropout) const;
  std::vector<double> GatherGradient(const Graph& graph,
                                     const std::vector<Var>& params) const;

  bool operator==(const Mlp&) const = default;

 private:
  struct LayerShape {
    int fan_in;
    int fan_out;
    std::size_t offset;  // weights: fan_in x fan_out col-major, then bias
  };
  std::vector<LayerShape> Layers() const;
  Matrix DropoutMask(int rows, int cols, int layer, std::uint64_t seed) const;

  MlpSpec spec_;
  std::vector<double> weights_;
};

// Convenience wrapper matching the free-function form of the forward pass.
inline Matrix Forward(const Mlp& model, const Matrix& batch,
                      bool dropout_active, std::uint64_t rng_seed) {
  return model.Forward(batch, DropoutSpec{dropout_active, rng_seed});
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamState {
  std::int64_t step_count = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t parameter_count, double lr, double beta1 = 0.9,
            double beta2 = 0.999, double eps = 1e-8);
};

// Bias-corrected Adam update. Throws TrainingError (weights untouched) on a
// non-finite gradient.
void AdamStep(AdamState& state, std::span<double> weights,
              std::span<const double> gradient);

}  // namespace uqreg::nn

#endif  // UQREG_NN_HPP_
