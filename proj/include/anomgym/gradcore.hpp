// Copyright 2026 The anomgym Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Reverse-mode differentiation over dense matrices.
//
// A Value is a handle to a node of a computation graph. Parameters are leaf
// nodes that persist across steps; every forward pass builds fresh interior
// nodes that point back at their operands, so a graph is acyclic by
// construction and is released when the last handle to its root goes away.
// A graph must only be touched by one thread at a time.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "anomgym/matrix.hpp"
#include "anomgym/rng.hpp"

namespace anomgym::grad {

enum class Op : std::uint8_t {
  kLeaf,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kTanh,
  kRelu,
  kLeakyRelu,
  kSigmoid,
  kExp,
  kLog,
  kPow,
  kSoftplus,
  kAbs,
  kSum,
  kMean,
  kRowSum,
  kConcatCols,
  kSliceCols,
  kGatherRows,
  kDropout,
  kLayerNorm,
  kRowSoftmax,
  kTokenize,
  kGroupMatMulNT,
  kGroupMatMul,
};

const char* op_name(Op op);

struct Node {
  Matrix data;
  Matrix grad;  // allocated on first use, always data-shaped once allocated
  Op op = Op::kLeaf;
  bool requires_grad = false;
  std::string name;
  std::vector<std::shared_ptr<Node>> parents;
  // Pushes this->grad into the parents' gradients.
  std::function<void(Node&)> backward;

  Matrix& ensure_grad() {
    if (!grad.same_shape(data)) grad = Matrix(data.rows(), data.cols());
    return grad;
  }
};

class Value {
 public:
  Value() = default;
  explicit Value(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Matrix& data() const { return node_->data; }
  Matrix& mutable_data() { return node_->data; }
  const Matrix& grad() const { return node_->ensure_grad(); }
  Matrix& mutable_grad() { return node_->ensure_grad(); }
  std::size_t rows() const { return node_->data.rows(); }
  std::size_t cols() const { return node_->data.cols(); }
  Op op() const { return node_->op; }
  bool requires_grad() const { return node_->requires_grad; }
  const std::string& name() const { return node_->name; }
  double item() const;

  void zero_grad() { node_->ensure_grad().fill(0.0); }

  const std::shared_ptr<Node>& node() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<Node> node_;
};

/// Trainable leaf.
Value parameter(Matrix init, std::string name);
/// Leaf that never receives a gradient.
Value constant(Matrix data);
Value constant_scalar(double v);

/// Accumulates d(root)/d(node) into every reachable node's grad.
/// Gradients accumulate; callers zero parameter gradients between steps.
void backward(const Value& root);

void zero_grad(std::span<Value> params);

// --- primitives ---------------------------------------------------------
Value matmul(const Value& a, const Value& b);
/// b may be the same shape as a, a 1 x cols row (broadcast over rows) or 1 x 1.
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value scale(const Value& a, double factor);
Value add_scalar(const Value& a, double c);
Value tanh(const Value& a);
Value relu(const Value& a);
Value leaky_relu(const Value& a, double slope);
Value sigmoid(const Value& a);
Value exp(const Value& a);
/// log(max(a, 1e-12)).
Value log(const Value& a);
Value pow(const Value& a, double exponent);
Value softplus(const Value& a);
Value abs(const Value& a);
Value sum(const Value& a);
Value mean(const Value& a);
Value row_sum(const Value& a);
Value concat_cols(const std::vector<Value>& parts);
Value slice_cols(const Value& a, std::size_t begin, std::size_t end);
Value gather_rows(const Value& a, std::vector<std::size_t> rows);
/// Inverted dropout. Identity when !train or rate == 0.
Value dropout(const Value& a, double rate, bool train, Rng& rng);
/// Per-row standardization (no affine part), eps 1e-5.
Value layer_norm(const Value& a);
Value row_softmax(const Value& a);

// --- tabular transformer helpers ----------------------------------------
/// x: b x d, weight and bias: d x e, cls: 1 x e. Returns (b*(d+1)) x e where
/// row g*(d+1) is the CLS token and row g*(d+1)+1+j is x[g,j]*weight[j]+bias[j].
Value tokenize(const Value& x, const Value& weight, const Value& bias, const Value& cls);
/// q, k: (b*T) x h. Returns (b*T) x T with out[g*T+i, j] = q[g*T+i] . k[g*T+j].
Value group_matmul_nt(const Value& q, const Value& k, std::size_t group);
/// a: (b*T) x T, v: (b*T) x h. Returns (b*T) x h, out[g*T+i] = sum_j a[g*T+i,j] v[g*T+j].
Value group_matmul(const Value& a, const Value& v, std::size_t group);

// Convenience arithmetic.
inline Value operator+(const Value& a, const Value& b) { return add(a, b); }
inline Value operator-(const Value& a, const Value& b) { return sub(a, b); }
inline Value operator*(const Value& a, const Value& b) { return mul(a, b); }

}  // namespace anomgym::grad
