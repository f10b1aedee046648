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
#include "anomgym/gradcore.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "anomgym/kernels.hpp"

namespace anomgym::grad {
namespace {

constexpr double kLogClamp = 1e-12;
constexpr double kLayerNormEps = 1e-5;

std::string shape_of(const Value& v) { return v.data().shape_string(); }

Value make(Matrix data, Op op, std::vector<std::shared_ptr<Node>> parents,
           std::function<void(Node&)> bw) {
  auto node = std::make_shared<Node>();
  node->data = std::move(data);
  node->op = op;
  for (const auto& p : parents) node->requires_grad = node->requires_grad || p->requires_grad;
  node->parents = std::move(parents);
  if (node->requires_grad) node->backward = std::move(bw);
  return Value(std::move(node));
}

enum class Broadcast { kSame, kRow, kScalar };

Broadcast broadcast_kind(const Value& a, const Value& b, const char* op) {
  const Matrix& x = a.data();
  const Matrix& y = b.data();
  if (x.same_shape(y)) return Broadcast::kSame;
  if (y.rows() == 1 && y.cols() == 1) return Broadcast::kScalar;
  if (y.rows() == 1 && y.cols() == x.cols()) return Broadcast::kRow;
  throw DimensionError(std::string(op) + ": cannot broadcast " + shape_of(b) + " onto " +
                       shape_of(a));
}

inline double bval(const Matrix& y, Broadcast k, std::size_t r, std::size_t c) {
  switch (k) {
    case Broadcast::kSame: return y(r, c);
    case Broadcast::kRow: return y(0, c);
    case Broadcast::kScalar: return y[0];
  }
  return 0.0;
}

inline void badd(Matrix& g, Broadcast k, std::size_t r, std::size_t c, double v) {
  switch (k) {
    case Broadcast::kSame: g(r, c) += v; break;
    case Broadcast::kRow: g(0, c) += v; break;
    case Broadcast::kScalar: g[0] += v; break;
  }
}

template <typename F, typename D>
Value unary(const Value& a, Op op, F f, D df) {
  const Matrix& x = a.data();
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  return make(std::move(out), op, {a.node()}, [df](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Matrix& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * df(p.data[i], self.data[i]);
  });
}

}  // namespace

const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kMatMul: return "matmul";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kScale: return "scale";
    case Op::kAddScalar: return "add_scalar";
    case Op::kTanh: return "tanh";
    case Op::kRelu: return "relu";
    case Op::kLeakyRelu: return "leaky_relu";
    case Op::kSigmoid: return "sigmoid";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kPow: return "pow";
    case Op::kSoftplus: return "softplus";
    case Op::kAbs: return "abs";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kRowSum: return "row_sum";
    case Op::kConcatCols: return "concat_cols";
    case Op::kSliceCols: return "slice_cols";
    case Op::kGatherRows: return "gather_rows";
    case Op::kDropout: return "dropout";
    case Op::kLayerNorm: return "layer_norm";
    case Op::kRowSoftmax: return "row_softmax";
    case Op::kTokenize: return "tokenize";
    case Op::kGroupMatMulNT: return "group_matmul_nt";
    case Op::kGroupMatMul: return "group_matmul";
  }
  return "?";
}

double Value::item() const {
  if (node_->data.size() != 1) {
    throw ContractError("item() on a " + node_->data.shape_string() + " value");
  }
  return node_->data[0];
}

Value parameter(Matrix init, std::string name) {
  auto node = std::make_shared<Node>();
  node->data = std::move(init);
  node->requires_grad = true;
  node->name = std::move(name);
  return Value(std::move(node));
}

Value constant(Matrix data) {
  auto node = std::make_shared<Node>();
  node->data = std::move(data);
  return Value(std::move(node));
}

Value constant_scalar(double v) { return constant(Matrix(1, 1, v)); }

void backward(const Value& root) {
  if (root.rows() != 1 || root.cols() != 1) {
    throw ContractError("backward requires a 1x1 root, got " + shape_of(root));
  }
  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.node().get(), 0);
  seen.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node* n : order) {
    if (n->op == Op::kLeaf) continue;
    if (n->grad.same_shape(n->data)) {
      n->grad.fill(0.0);
    } else {
      n->ensure_grad();  // freshly zeroed
    }
  }
  root.node()->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward) n->backward(*n);
  }
}

void zero_grad(std::span<Value> params) {
  for (auto& p : params) p.zero_grad();
}

Value matmul(const Value& a, const Value& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_of(a) + " times " + shape_of(b));
  }
  Matrix out;
  kernels::gemm_nn(a.data(), b.data(), out);
  return make(std::move(out), Op::kMatMul, {a.node(), b.node()}, [](Node& self) {
    Node& x = *self.parents[0];
    Node& w = *self.parents[1];
    if (x.requires_grad) kernels::gemm_nt(self.grad, w.data, x.ensure_grad(), true);
    if (w.requires_grad) kernels::gemm_tn(x.data, self.grad, w.ensure_grad(), true);
  });
}

Value add(const Value& a, const Value& b) {
  const Broadcast k = broadcast_kind(a, b, "add");
  const Matrix& x = a.data();
  const Matrix& y = b.data();
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(r, c) + bval(y, k, r, c);
  return make(std::move(out), Op::kAdd, {a.node(), b.node()}, [k](Node& self) {
    Node& x = *self.parents[0];
    Node& y = *self.parents[1];
    if (x.requires_grad) {
      Matrix& g = x.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (y.requires_grad) {
      Matrix& g = y.ensure_grad();
      for (std::size_t r = 0; r < self.data.rows(); ++r)
        for (std::size_t c = 0; c < self.data.cols(); ++c) badd(g, k, r, c, self.grad(r, c));
    }
  });
}

Value sub(const Value& a, const Value& b) {
  const Broadcast k = broadcast_kind(a, b, "sub");
  const Matrix& x = a.data();
  const Matrix& y = b.data();
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(r, c) - bval(y, k, r, c);
  return make(std::move(out), Op::kSub, {a.node(), b.node()}, [k](Node& self) {
    Node& x = *self.parents[0];
    Node& y = *self.parents[1];
    if (x.requires_grad) {
      Matrix& g = x.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (y.requires_grad) {
      Matrix& g = y.ensure_grad();
      for (std::size_t r = 0; r < self.data.rows(); ++r)
        for (std::size_t c = 0; c < self.data.cols(); ++c) badd(g, k, r, c, -self.grad(r, c));
    }
  });
}

Value mul(const Value& a, const Value& b) {
  const Broadcast k = broadcast_kind(a, b, "mul");
  const Matrix& x = a.data();
  const Matrix& y = b.data();
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(r, c) * bval(y, k, r, c);
  return make(std::move(out), Op::kMul, {a.node(), b.node()}, [k](Node& self) {
    Node& x = *self.parents[0];
    Node& y = *self.parents[1];
    for (std::size_t r = 0; r < self.data.rows(); ++r) {
      for (std::size_t c = 0; c < self.data.cols(); ++c) {
        const double g = self.grad(r, c);
        if (x.requires_grad) x.ensure_grad()(r, c) += g * bval(y.data, k, r, c);
        if (y.requires_grad) badd(y.ensure_grad(), k, r, c, g * x.data(r, c));
      }
    }
  });
}

Value scale(const Value& a, double factor) {
  return unary(
      a, Op::kScale, [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

Value add_scalar(const Value& a, double c) {
  return unary(
      a, Op::kAddScalar, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Value tanh(const Value& a) {
  return unary(
      a, Op::kTanh, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Value relu(const Value& a) {
  return unary(
      a, Op::kRelu, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Value leaky_relu(const Value& a, double slope) {
  return unary(
      a, Op::kLeakyRelu, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Value sigmoid(const Value& a) {
  return unary(
      a, Op::kSigmoid,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Value exp(const Value& a) {
  return unary(
      a, Op::kExp, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Value log(const Value& a) {
  return unary(
      a, Op::kLog, [](double x) { return std::log(std::max(x, kLogClamp)); },
      [](double x, double) { return x > kLogClamp ? 1.0 / x : 0.0; });
}

Value pow(const Value& a, double exponent) {
  return unary(
      a, Op::kPow, [exponent](double x) { return std::pow(x, exponent); },
      [exponent](double x, double) { return exponent * std::pow(x, exponent - 1.0); });
}

Value softplus(const Value& a) {
  return unary(
      a, Op::kSoftplus,
      [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); },
      [](double x, double) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      });
}

Value abs(const Value& a) {
  return unary(
      a, Op::kAbs, [](double x) { return std::abs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Value sum(const Value& a) {
  double s = 0.0;
  for (double v : a.data().values()) s += v;
  return make(Matrix(1, 1, s), Op::kSum, {a.node()}, [](Node& self) {
    Node& p = *self.parents[0];
    Matrix& g = p.ensure_grad();
    const double d = self.grad[0];
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += d;
  });
}

Value mean(const Value& a) {
  const auto n = static_cast<double>(a.data().size());
  if (n == 0) throw DimensionError("mean of an empty value");
  double s = 0.0;
  for (double v : a.data().values()) s += v;
  return make(Matrix(1, 1, s / n), Op::kMean, {a.node()}, [n](Node& self) {
    Node& p = *self.parents[0];
    Matrix& g = p.ensure_grad();
    const double d = self.grad[0] / n;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += d;
  });
}

Value row_sum(const Value& a) {
  const Matrix& x = a.data();
  Matrix out(x.rows(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = 0.0;
    for (double v : x.row(r)) s += v;
    out(r, 0) = s;
  }
  return make(std::move(out), Op::kRowSum, {a.node()}, [](Node& self) {
    Node& p = *self.parents[0];
    Matrix& g = p.ensure_grad();
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) += self.grad(r, 0);
  });
}

Value concat_cols(const std::vector<Value>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols of nothing");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  std::vector<std::shared_ptr<Node>> parents;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw DimensionError("concat_cols: row count mismatch");
    cols += p.cols();
    parents.push_back(p.node());
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(p.data().row(r).data(), p.cols(), out.row(r).data() + offset);
    offset += p.cols();
  }
  return make(std::move(out), Op::kConcatCols, std::move(parents), [](Node& self) {
    std::size_t offset = 0;
    for (auto& pp : self.parents) {
      Node& p = *pp;
      if (p.requires_grad) {
        Matrix& g = p.ensure_grad();
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) += self.grad(r, offset + c);
      }
      offset += p.data.cols();
    }
  });
}

Value slice_cols(const Value& a, std::size_t begin, std::size_t end) {
  if (begin >= end || end > a.cols()) {
    throw DimensionError("slice_cols [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") out of " + shape_of(a));
  }
  const Matrix& x = a.data();
  Matrix out(x.rows(), end - begin);
  for (std::size_t r = 0; r < x.rows(); ++r)
    std::copy_n(x.row(r).data() + begin, end - begin, out.row(r).data());
  return make(std::move(out), Op::kSliceCols, {a.node()}, [begin](Node& self) {
    Matrix& g = self.parents[0]->ensure_grad();
    for (std::size_t r = 0; r < self.grad.rows(); ++r)
      for (std::size_t c = 0; c < self.grad.cols(); ++c) g(r, begin + c) += self.grad(r, c);
  });
}

Value gather_rows(const Value& a, std::vector<std::size_t> rows) {
  for (std::size_t r : rows) {
    if (r >= a.rows()) throw DimensionError("gather_rows: index out of range");
  }
  Matrix out = a.data().select_rows(rows);
  return make(std::move(out), Op::kGatherRows, {a.node()},
              [rows = std::move(rows)](Node& self) {
                Matrix& g = self.parents[0]->ensure_grad();
                for (std::size_t i = 0; i < rows.size(); ++i)
                  for (std::size_t c = 0; c < g.cols(); ++c) g(rows[i], c) += self.grad(i, c);
              });
}

Value dropout(const Value& a, double rate, bool train, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ContractError("dropout rate must lie in [0, 1)");
  if (!train || rate == 0.0) return a;
  const Matrix& x = a.data();
  Matrix mask(x.rows(), x.cols());
  const double keep_scale = 1.0 / (1.0 - rate);
  // keep iff a raw 64-bit draw falls below (1 - rate) * 2^64
  const auto threshold = static_cast<std::uint64_t>(std::ldexp(1.0 - rate, 64) - 1.0);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng() <= threshold ? keep_scale : 0.0;
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * mask[i];
  return make(std::move(out), Op::kDropout, {a.node()}, [mask = std::move(mask)](Node& self) {
    Matrix& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mask[i];
  });
}

Value layer_norm(const Value& a) {
  const Matrix& x = a.data();
  const std::size_t n = x.cols();
  Matrix out(x.rows(), n);
  std::vector<double> inv_std(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double mu = 0.0;
    for (double v : x.row(r)) mu += v;
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x.row(r)) var += (v - mu) * (v - mu);
    var /= static_cast<double>(n);
    inv_std[r] = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t c = 0; c < n; ++c) out(r, c) = (x(r, c) - mu) * inv_std[r];
  }
  return make(std::move(out), Op::kLayerNorm, {a.node()},
              [inv_std = std::move(inv_std)](Node& self) {
                Matrix& g = self.parents[0]->ensure_grad();
                const std::size_t n = self.data.cols();
                const double inv_n = 1.0 / static_cast<double>(n);
                for (std::size_t r = 0; r < self.data.rows(); ++r) {
                  double sum_g = 0.0;
                  double sum_gy = 0.0;
                  for (std::size_t c = 0; c < n; ++c) {
                    sum_g += self.grad(r, c);
                    sum_gy += self.grad(r, c) * self.data(r, c);
                  }
                  for (std::size_t c = 0; c < n; ++c) {
                    g(r, c) += inv_std[r] * (self.grad(r, c) - inv_n * sum_g -
                                             self.data(r, c) * inv_n * sum_gy);
                  }
                }
              });
}

Value row_softmax(const Value& a) {
  const Matrix& x = a.data();
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) z += out(r, c) = std::exp(row[c] - mx);
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) /= z;
  }
  return make(std::move(out), Op::kRowSoftmax, {a.node()}, [](Node& self) {
    Matrix& g = self.parents[0]->ensure_grad();
    for (std::size_t r = 0; r < self.data.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < self.data.cols(); ++c) dot += self.grad(r, c) * self.data(r, c);
      for (std::size_t c = 0; c < self.data.cols(); ++c)
        g(r, c) += self.data(r, c) * (self.grad(r, c) - dot);
    }
  });
}

Value tokenize(const Value& x, const Value& weight, const Value& bias, const Value& cls) {
  const std::size_t b = x.rows();
  const std::size_t d = x.cols();
  const std::size_t e = weight.cols();
  if (weight.rows() != d || !bias.data().same_shape(weight.data()) || cls.rows() != 1 ||
      cls.cols() != e) {
    throw DimensionError("tokenize: parameter shapes do not match input " + shape_of(x));
  }
  const std::size_t t = d + 1;
  Matrix out(b * t, e);
  for (std::size_t g = 0; g < b; ++g) {
    std::copy_n(cls.data().data(), e, out.row(g * t).data());
    for (std::size_t j = 0; j < d; ++j) {
      const double v = x.data()(g, j);
      double* o = out.row(g * t + 1 + j).data();
      for (std::size_t c = 0; c < e; ++c) o[c] = v * weight.data()(j, c) + bias.data()(j, c);
    }
  }
  return make(std::move(out), Op::kTokenize, {x.node(), weight.node(), bias.node(), cls.node()},
              [b, d, e, t](Node& self) {
                Node& xn = *self.parents[0];
                Node& wn = *self.parents[1];
                Node& bn = *self.parents[2];
                Node& cn = *self.parents[3];
                for (std::size_t g = 0; g < b; ++g) {
                  if (cn.requires_grad) {
                    Matrix& gc = cn.ensure_grad();
                    for (std::size_t c = 0; c < e; ++c) gc(0, c) += self.grad(g * t, c);
                  }
                  for (std::size_t j = 0; j < d; ++j) {
                    const auto go = self.grad.row(g * t + 1 + j);
                    const double v = xn.data(g, j);
                    double dx = 0.0;
                    for (std::size_t c = 0; c < e; ++c) {
                      dx += go[c] * wn.data(j, c);
                      if (wn.requires_grad) wn.ensure_grad()(j, c) += go[c] * v;
                      if (bn.requires_grad) bn.ensure_grad()(j, c) += go[c];
                    }
                    if (xn.requires_grad) xn.ensure_grad()(g, j) += dx;
                  }
                }
              });
}

Value group_matmul_nt(const Value& q, const Value& k, std::size_t group) {
  if (!q.data().same_shape(k.data()) || group == 0 || q.rows() % group != 0) {
    throw DimensionError("group_matmul_nt: " + shape_of(q) + " vs " + shape_of(k));
  }
  const std::size_t h = q.cols();
  const std::size_t n = q.rows();
  Matrix out(n, group);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t base = (r / group) * group;
    const auto qr = q.data().row(r);
    for (std::size_t j = 0; j < group; ++j) {
      const auto kr = k.data().row(base + j);
      double s = 0.0;
      for (std::size_t c = 0; c < h; ++c) s += qr[c] * kr[c];
      out(r, j) = s;
    }
  }
  return make(std::move(out), Op::kGroupMatMulNT, {q.node(), k.node()}, [group, h](Node& self) {
    Node& qn = *self.parents[0];
    Node& kn = *self.parents[1];
    for (std::size_t r = 0; r < self.data.rows(); ++r) {
      const std::size_t base = (r / group) * group;
      for (std::size_t j = 0; j < group; ++j) {
        const double go = self.grad(r, j);
        if (go == 0.0) continue;
        if (qn.requires_grad) {
          auto gq = qn.ensure_grad().row(r);
          const auto kr = kn.data.row(base + j);
          for (std::size_t c = 0; c < h; ++c) gq[c] += go * kr[c];
        }
        if (kn.requires_grad) {
          auto gk = kn.ensure_grad().row(base + j);
          const auto qr = qn.data.row(r);
          for (std::size_t c = 0; c < h; ++c) gk[c] += go * qr[c];
        }
      }
    }
  });
}

Value group_matmul(const Value& a, const Value& v, std::size_t group) {
  if (a.cols() != group || a.rows() != v.rows() || group == 0 || a.rows() % group != 0) {
    throw DimensionError("group_matmul: " + shape_of(a) + " vs " + shape_of(v));
  }
  const std::size_t h = v.cols();
  const std::size_t n = a.rows();
  Matrix out(n, h);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t base = (r / group) * group;
    auto o = out.row(r);
    for (std::size_t j = 0; j < group; ++j) {
      const double w = a.data()(r, j);
      const auto vr = v.data().row(base + j);
      for (std::size_t c = 0; c < h; ++c) o[c] += w * vr[c];
    }
  }
  return make(std::move(out), Op::kGroupMatMul, {a.node(), v.node()}, [group, h](Node& self) {
    Node& an = *self.parents[0];
    Node& vn = *self.parents[1];
    for (std::size_t r = 0; r < self.data.rows(); ++r) {
      const std::size_t base = (r / group) * group;
      const auto go = self.grad.row(r);
      for (std::size_t j = 0; j < group; ++j) {
        const auto vr = vn.data.row(base + j);
        if (an.requires_grad) {
          double s = 0.0;
          for (std::size_t c = 0; c < h; ++c) s += go[c] * vr[c];
          an.ensure_grad()(r, j) += s;
        }
        if (vn.requires_grad) {
          const double w = an.data(r, j);
          auto gv = vn.ensure_grad().row(base + j);
          for (std::size_t c = 0; c < h; ++c) gv[c] += w * go[c];
        }
      }
    }
  });
}

}  // namespace anomgym::grad
