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

#include "uqreg/nn.hpp"

#include <cmath>
#include <sstream>

#include "uqreg/error.hpp"

namespace uqreg::nn {
namespace {

std::string Shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void RequireSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInputError(std::string(op) + ": shape mismatch " + Shape(a) +
                            " vs " + Shape(b));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

Var Graph::Push(TensorNode node) {
  node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

TensorNode& Graph::at(Var v) { return nodes_.at(v.id); }

Var Graph::Leaf(Matrix value) {
  TensorNode n;
  n.value = std::move(value);
  return Push(std::move(n));
}

Var Graph::MatMul(Var a, Var b) {
  const Matrix& x = value(a);
  const Matrix& y = value(b);
  if (x.cols() != y.rows()) {
    throw InvalidInputError("MatMul: inner dimension mismatch " + Shape(x) +
                            " * " + Shape(y));
  }
  TensorNode n;
  n.value = x * y;
  n.op_tag = OpTag::kMatMul;
  n.lhs = a.id;
  n.rhs = b.id;
  return Push(std::move(n));
}

Var Graph::AddRowBroadcast(Var a, Var row) {
  const Matrix& x = value(a);
  const Matrix& r = value(row);
  if (r.rows() != 1 || r.cols() != x.cols()) {
    throw InvalidInputError("AddRowBroadcast: bad row shape " + Shape(r) +
                            " for " + Shape(x));
  }
  TensorNode n;
  n.value = x.rowwise() + r.row(0);
  n.op_tag = OpTag::kAddRowBroadcast;
  n.lhs = a.id;
  n.rhs = row.id;
  return Push(std::move(n));
}

Var Graph::Tanh(Var a) {
  TensorNode n;
  n.value = value(a).array().tanh().matrix();
  n.op_tag = OpTag::kTanh;
  n.lhs = a.id;
  return Push(std::move(n));
}

Var Graph::Relu(Var a) {
  TensorNode n;
  n.value = value(a).cwiseMax(0.0);
  n.op_tag = OpTag::kRelu;
  n.lhs = a.id;
  return Push(std::move(n));
}

Var Graph::MulConst(Var a, Matrix constant) {
  RequireSameShape(value(a), constant, "MulConst");
  TensorNode n;
  n.value = value(a).cwiseProduct(constant);
  n.op_tag = OpTag::kMulConst;
  n.lhs = a.id;
  n.constant = std::move(constant);
  return Push(std::move(n));
}

Var Graph::Column(Var a, int column) {
  const Matrix& x = value(a);
  if (column < 0 || column >= x.cols()) {
    throw InvalidInputError("Column: index out of range");
  }
  TensorNode n;
  n.value = x.col(column);
  n.op_tag = OpTag::kColumn;
  n.lhs = a.id;
  n.a = column;
  return Push(std::move(n));
}

Var Graph::Add(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Add");
  TensorNode n;
  n.value = value(a) + value(b);
  n.op_tag = OpTag::kAdd;
  n.lhs = a.id;
  n.rhs = b.id;
  return Push(std::move(n));
}

Var Graph::Sub(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Sub");
  TensorNode n;
  n.value = value(a) - value(b);
  n.op_tag = OpTag::kSub;
  n.lhs = a.id;
  n.rhs = b.id;
  return Push(std::move(n));
}

Var Graph::Mul(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Mul");
  TensorNode n;
  n.value = value(a).cwiseProduct(value(b));
  n.op_tag = OpTag::kMul;
  n.lhs = a.id;
  n.rhs = b.id;
  return Push(std::move(n));
}

Var Graph::Square(Var a) {
  TensorNode n;
  n.value = value(a).array().square().matrix();
  n.op_tag = OpTag::kSquare;
  n.lhs = a.id;
  return Push(std::move(n));
}

Var Graph::Exp(Var a) {
  TensorNode n;
  n.value = value(a).array().exp().matrix();
  n.op_tag = OpTag::kExp;
  n.lhs = a.id;
  return Push(std::move(n));
}

Var Graph::Log(Var a) {
  if ((value(a).array() <= 0.0).any()) {
    throw InvalidInputError("Log: non-positive argument");
  }
  TensorNode n;
  n.value = value(a).array().log().matrix();
  n.op_tag = OpTag::kLog;
  n.lhs = a.id;
  return Push(std::move(n));
}

Var Graph::Scale(Var a, double factor) {
  TensorNode n;
  n.value = value(a) * factor;
  n.op_tag = OpTag::kScale;
  n.lhs = a.id;
  n.a = factor;
  return Push(std::move(n));
}

Var Graph::AddScalar(Var a, double offset) {
  TensorNode n;
  n.value = (value(a).array() + offset).matrix();
  n.op_tag = OpTag::kAddScalar;
  n.lhs = a.id;
  n.a = offset;
  return Push(std::move(n));
}

Var Graph::Clamp(Var a, double lo, double hi) {
  TensorNode n;
  n.value = value(a).cwiseMax(lo).cwiseMin(hi);
  n.op_tag = OpTag::kClamp;
  n.lhs = a.id;
  n.a = lo;
  n.b = hi;
  return Push(std::move(n));
}

Var Graph::Mean(Var a) {
  const Matrix& x = value(a);
  if (x.size() == 0) throw InvalidInputError("Mean: empty tensor");
  TensorNode n;
  n.value = Matrix::Constant(1, 1, x.mean());
  n.op_tag = OpTag::kMean;
  n.lhs = a.id;
  return Push(std::move(n));
}

void Graph::Backward(Var loss) {
  TensorNode& root = at(loss);
  if (root.value.rows() != 1 || root.value.cols() != 1) {
    throw InvalidInputError("Backward: loss must be a scalar, got " +
                            Shape(root.value));
  }
  for (auto& n : nodes_) n.grad.setZero();
  root.grad(0, 0) = 1.0;

  for (int i = loss.id; i >= 0; --i) {
    TensorNode& n = nodes_[i];
    if (n.op_tag == OpTag::kLeaf) continue;
    const Matrix& g = n.grad;
    TensorNode* l = n.lhs >= 0 ? &nodes_[n.lhs] : nullptr;
    TensorNode* r = n.rhs >= 0 ? &nodes_[n.rhs] : nullptr;
    switch (n.op_tag) {
      case OpTag::kMatMul:
        l->grad.noalias() += g * r->value.transpose();
        r->grad.noalias() += l->value.transpose() * g;
        break;
      case OpTag::kAddRowBroadcast:
        l->grad += g;
        r->grad += g.colwise().sum();
        break;
      case OpTag::kTanh:
        l->grad.array() += g.array() * (1.0 - n.value.array().square());
        break;
      case OpTag::kRelu:
        l->grad.array() +=
            g.array() * (l->value.array() > 0.0).cast<double>();
        break;
      case OpTag::kMulConst:
        l->grad.array() += g.array() * n.constant.array();
        break;
      case OpTag::kColumn:
        l->grad.col(static_cast<int>(n.a)) += g.col(0);
        break;
      case OpTag::kAdd:
        l->grad += g;
        r->grad += g;
        break;
      case OpTag::kSub:
        l->grad += g;
        r->grad -= g;
        break;
      case OpTag::kMul:
        l->grad.array() += g.array() * r->value.array();
        r->grad.array() += g.array() * l->value.array();
        break;
      case OpTag::kSquare:
        l->grad.array() += 2.0 * g.array() * l->value.array();
        break;
      case OpTag::kExp:
        l->grad.array() += g.array() * n.value.array();
        break;
      case OpTag::kLog:
        l->grad.array() += g.array() / l->value.array();
        break;
      case OpTag::kScale:
        l->grad += g * n.a;
        break;
      case OpTag::kAddScalar:
        l->grad += g;
        break;
      case OpTag::kClamp:
        l->grad.array() += g.array() * ((l->value.array() >= n.a) &&
                                        (l->value.array() <= n.b))
                                           .cast<double>();
        break;
      case OpTag::kMean:
        l->grad.array() += g(0, 0) / static_cast<double>(l->value.size());
        break;
      case OpTag::kLeaf:
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// Mlp
// ---------------------------------------------------------------------------

std::string ActivationName(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

Activation ParseActivation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation '" + name + "'");
}

void MlpSpec::Validate() const {
  if (input_dim < 1) throw InvalidInputError("MlpSpec: input_dim must be >= 1");
  for (int h : hidden_sizes) {
    if (h < 1) throw InvalidInputError("MlpSpec: hidden sizes must be >= 1");
  }
  if (output_dim != 1 && output_dim != 2) {
    throw InvalidInputError("MlpSpec: output_dim must be 1 or 2");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw InvalidInputError("MlpSpec: dropout_rate must lie in [0, 1)");
  }
}

std::size_t MlpSpec::ParameterCount() const {
  std::size_t count = 0;
  int fan_in = input_dim;
  for (int h : hidden_sizes) {
    count += static_cast<std::size_t>(fan_in) * h + h;
    fan_in = h;
  }
  return count + static_cast<std::size_t>(fan_in) * output_dim + output_dim;
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  spec_.Validate();
  weights_.assign(spec_.ParameterCount(), 0.0);
}

Mlp::Mlp(MlpSpec spec, std::vector<double> weights)
    : spec_(std::move(spec)), weights_(std::move(weights)) {
  spec_.Validate();
  if (weights_.size() != spec_.ParameterCount()) {
    throw InvalidInputError("Mlp: weight count does not match spec");
  }
}

Mlp Mlp::Initialize(const MlpSpec& spec, std::uint64_t seed) {
  Mlp model(spec);
  RandomEngine rng = MakeEngine(seed, 0);
  for (const LayerShape& layer : model.Layers()) {
    const double limit = std::sqrt(6.0 / (layer.fan_in + layer.fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const std::size_t n = static_cast<std::size_t>(layer.fan_in) * layer.fan_out;
    for (std::size_t i = 0; i < n; ++i) {
      model.weights_[layer.offset + i] = dist(rng);
    }
  }
  return model;
}

std::vector<Mlp::LayerShape> Mlp::Layers() const {
  std::vector<LayerShape> layers;
  std::size_t offset = 0;
  int fan_in = spec_.input_dim;
  auto add = [&](int fan_out) {
    layers.push_back({fan_in, fan_out, offset});
    offset += static_cast<std::size_t>(fan_in) * fan_out + fan_out;
    fan_in = fan_out;
  };
  for (int h : spec_.hidden_sizes) add(h);
  add(spec_.output_dim);
  return layers;
}

Matrix Mlp::DropoutMask(int rows, int cols, int layer,
                        std::uint64_t seed) const {
  RandomEngine rng = MakeEngine(seed, static_cast<std::uint64_t>(layer));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double p = spec_.dropout_rate;
  const double keep_scale = 1.0 / (1.0 - p);
  Matrix mask(rows, cols);
  for (Eigen::Index j = 0; j < mask.cols(); ++j) {
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
      mask(i, j) = unit(rng) < p ? 0.0 : keep_scale;
    }
  }
  return mask;
}

Matrix Mlp::Forward(const Matrix& batch, const DropoutSpec& dropout) const {
  if (batch.cols() != spec_.input_dim) {
    throw InvalidInputError("Mlp::Forward: batch has " +
                            std::to_string(batch.cols()) +
                            " columns, model expects " +
                            std::to_string(spec_.input_dim));
  }
  const bool drop = dropout.active && spec_.dropout_rate > 0.0;
  const auto layers = Layers();
  Matrix h = batch;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    Eigen::Map<const Matrix> w(weights_.data() + s.offset, s.fan_in,
                               s.fan_out);
    Eigen::Map<const Eigen::RowVectorXd> b(
        weights_.data() + s.offset +
            static_cast<std::size_t>(s.fan_in) * s.fan_out,
        s.fan_out);
    Matrix z = h * w;
    z.rowwise() += b;
    if (l + 1 == layers.size()) return z;
    if (spec_.activation == Activation::kTanh) {
      z = z.array().tanh().matrix();
    } else {
      z = z.cwiseMax(0.0);
    }
    if (drop) {
      z = z.cwiseProduct(DropoutMask(static_cast<int>(z.rows()),
                                     static_cast<int>(z.cols()),
                                     static_cast<int>(l), dropout.seed));
    }
    h = std::move(z);
  }
  return h;
}

Var Mlp::Forward(Graph& graph, Var input, std::vector<Var>& params,
                 const DropoutSpec& dropout) const {
  if (graph.value(input).cols() != spec_.input_dim) {
    throw InvalidInputError("Mlp::Forward: input dimension mismatch");
  }
  const bool drop = dropout.active && spec_.dropout_rate > 0.0;
  const auto layers = Layers();
  params.clear();
  Var h = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    Matrix w = Eigen::Map<const Matrix>(weights_.data() + s.offset, s.fan_in,
                                        s.fan_out);
    Matrix b = Eigen::Map<const Matrix>(
        weights_.data() + s.offset +
            static_cast<std::size_t>(s.fan_in) * s.fan_out,
        1, s.fan_out);
    Var wv = graph.Leaf(std::move(w));
    Var bv = graph.Leaf(std::move(b));
    params.push_back(wv);
    params.push_back(bv);
    Var z = graph.AddRowBroadcast(graph.MatMul(h, wv), bv);
    if (l + 1 == layers.size()) return z;
    z = spec_.activation == Activation::kTanh ? graph.Tanh(z) : graph.Relu(z);
    if (drop) {
      const Matrix& zv = graph.value(z);
      z = graph.MulConst(z, DropoutMask(static_cast<int>(zv.rows()),
                                        static_cast<int>(zv.cols()),
                                        static_cast<int>(l), dropout.seed));
    }
    h = z;
  }
  return h;
}

std::vector<double> Mlp::GatherGradient(const Graph& graph,
                                        const std::vector<Var>& params) const {
  std::vector<double> flat(weights_.size(), 0.0);
  const auto layers = Layers();
  if (params.size() != 2 * layers.size()) {
    throw InvalidInputError("GatherGradient: parameter list does not match");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    Eigen::Map<Matrix>(flat.data() + s.offset, s.fan_in, s.fan_out) =
        graph.grad(params[2 * l]);
    Eigen::Map<Matrix>(
        flat.data() + s.offset + static_cast<std::size_t>(s.fan_in) * s.fan_out,
        1, s.fan_out) = graph.grad(params[2 * l + 1]);
  }
  return flat;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

AdamState::AdamState(std::size_t parameter_count, double lr, double b1,
                     double b2, double e)
    : first_moment(parameter_count, 0.0),
      second_moment(parameter_count, 0.0),
      learning_rate(lr),
      beta1(b1),
      beta2(b2),
      eps(e) {}

void AdamStep(AdamState& state, std::span<double> weights,
              std::span<const double> gradient) {
  if (weights.size() != gradient.size() ||
      state.first_moment.size() != weights.size() ||
      state.second_moment.size() != weights.size()) {
    throw InvalidInputError("AdamStep: gradient does not cover all parameters");
  }
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    if (!std::isfinite(gradient[i])) {
      throw TrainingError("non-finite gradient at parameter " +
                          std::to_string(i) + " (step " +
                          std::to_string(state.step_count + 1) + ")");
    }
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double g = gradient[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g * g;
    weights[i] -= state.learning_rate * (m / c1) / (std::sqrt(v / c2) + state.eps);
  }
}

}  // namespace uqreg::nn
