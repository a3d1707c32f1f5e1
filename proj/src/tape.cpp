// Copyright 2026 The adgb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adgb/tape.hpp"

#include <algorithm>
#include <string>

namespace adgb {

Matrix row_stable_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  Vector stage(a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    stage = a.row(i).transpose();
    out.row(i).noalias() = stage.transpose() * b;
  }
  return out;
}

Matrix sorted_scatter_add(const Matrix& a, const std::vector<int>& rows, int out_rows) {
  Matrix out = Matrix::Zero(out_rows, a.cols());
  std::vector<std::vector<int>> groups(out_rows);
  for (std::size_t i = 0; i < rows.size(); ++i) groups[rows[i]].push_back(static_cast<int>(i));
  std::vector<double> bucket;
  for (int r = 0; r < out_rows; ++r) {
    const auto& g = groups[r];
    if (g.empty()) continue;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      bucket.clear();
      for (int src : g) bucket.push_back(a(src, c));
      std::sort(bucket.begin(), bucket.end());
      double acc = 0.0;
      for (double x : bucket) acc += x;
      out(r, c) = acc;
    }
  }
  return out;
}

void Tape::check(Var v, const char* who) const {
  if (!v.valid() || v.id >= static_cast<int>(nodes_.size()))
    throw ShapeError(std::string(who) + ": invalid tape handle");
}

int Tape::push(Node n) {
  const Matrix& v = n.borrowed ? *n.borrowed : n.val;
  require_finite(v, "tape op output");
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::leaf(Matrix value) {
  Node n;
  n.op = Op::Leaf;
  n.val = std::move(value);
  return {push(std::move(n))};
}

Var Tape::leaf_ref(const Matrix& value) {
  Node n;
  n.op = Op::Leaf;
  n.borrowed = &value;
  return {push(std::move(n))};
}

Var Tape::matmul(Var a, Var b) {
  check(a, "matmul");
  check(b, "matmul");
  const Matrix& av = node_val(a.id);
  const Matrix& bv = node_val(b.id);
  if (av.cols() != bv.rows())
    throw ShapeError("matmul: inner dimensions differ (" + std::to_string(av.cols()) + " vs " +
                     std::to_string(bv.rows()) + ")");
  Node n;
  n.op = Op::MatMul;
  n.a = a.id;
  n.b = b.id;
  n.val = row_stable_product(av, bv);
  return {push(std::move(n))};
}

Var Tape::add(Var a, Var b) {
  check(a, "add");
  check(b, "add");
  const Matrix& av = node_val(a.id);
  const Matrix& bv = node_val(b.id);
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) throw ShapeError("add: shape mismatch");
  Node n;
  n.op = Op::Add;
  n.a = a.id;
  n.b = b.id;
  n.val = av + bv;
  return {push(std::move(n))};
}

Var Tape::sub(Var a, Var b) {
  check(a, "sub");
  check(b, "sub");
  const Matrix& av = node_val(a.id);
  const Matrix& bv = node_val(b.id);
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) throw ShapeError("sub: shape mismatch");
  Node n;
  n.op = Op::Sub;
  n.a = a.id;
  n.b = b.id;
  n.val = av - bv;
  return {push(std::move(n))};
}

Var Tape::scale(Var a, double s) {
  check(a, "scale");
  Node n;
  n.op = Op::Scale;
  n.a = a.id;
  n.c = s;
  n.val = node_val(a.id) * s;
  return {push(std::move(n))};
}

Var Tape::add_bias(Var a, Var bias) {
  check(a, "add_bias");
  check(bias, "add_bias");
  const Matrix& av = node_val(a.id);
  const Matrix& bv = node_val(bias.id);
  if (bv.rows() != 1 || bv.cols() != av.cols()) throw ShapeError("add_bias: bias must be 1 x cols");
  Node n;
  n.op = Op::AddBias;
  n.a = a.id;
  n.b = bias.id;
  n.val = av.rowwise() + bv.row(0);
  return {push(std::move(n))};
}

Var Tape::relu(Var a) {
  check(a, "relu");
  Node n;
  n.op = Op::Relu;
  n.a = a.id;
  n.val = node_val(a.id).cwiseMax(0.0);
  return {push(std::move(n))};
}

Var Tape::square(Var a) {
  check(a, "square");
  Node n;
  n.op = Op::Square;
  n.a = a.id;
  n.val = node_val(a.id).array().square();
  return {push(std::move(n))};
}

Var Tape::sum(Var a) {
  check(a, "sum");
  Node n;
  n.op = Op::Sum;
  n.a = a.id;
  n.val = Matrix::Constant(1, 1, node_val(a.id).sum());
  return {push(std::move(n))};
}

Var Tape::hconcat(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("hconcat: empty part list");
  Eigen::Index rows = -1, cols = 0;
  for (Var p : parts) {
    check(p, "hconcat");
    const Matrix& v = node_val(p.id);
    if (rows < 0) rows = v.rows();
    if (v.rows() != rows) throw ShapeError("hconcat: row count mismatch");
    cols += v.cols();
  }
  Node n;
  n.op = Op::HConcat;
  n.val.resize(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    const Matrix& v = node_val(p.id);
    n.val.middleCols(at, v.cols()) = v;
    at += v.cols();
    n.inputs.push_back(p.id);
  }
  return {push(std::move(n))};
}

Var Tape::vconcat(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("vconcat: empty part list");
  Eigen::Index cols = -1, rows = 0;
  for (Var p : parts) {
    check(p, "vconcat");
    const Matrix& v = node_val(p.id);
    if (cols < 0) cols = v.cols();
    if (v.cols() != cols) throw ShapeError("vconcat: column count mismatch");
    rows += v.rows();
  }
  Node n;
  n.op = Op::VConcat;
  n.val.resize(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    const Matrix& v = node_val(p.id);
    n.val.middleRows(at, v.rows()) = v;
    at += v.rows();
    n.inputs.push_back(p.id);
  }
  return {push(std::move(n))};
}

Var Tape::gather_rows(Var a, std::vector<int> rows) {
  check(a, "gather_rows");
  const Matrix& av = node_val(a.id);
  Node n;
  n.op = Op::Gather;
  n.a = a.id;
  n.val.resize(static_cast<Eigen::Index>(rows.size()), av.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= av.rows()) throw ShapeError("gather_rows: index out of range");
    n.val.row(static_cast<Eigen::Index>(i)) = av.row(rows[i]);
  }
  n.index = std::move(rows);
  return {push(std::move(n))};
}

Var Tape::scatter_add_rows(Var a, std::vector<int> rows, int out_rows) {
  check(a, "scatter_add_rows");
  const Matrix& av = node_val(a.id);
  if (static_cast<Eigen::Index>(rows.size()) != av.rows())
    throw ShapeError("scatter_add_rows: index count must equal input rows");
  for (int r : rows)
    if (r < 0 || r >= out_rows) throw ShapeError("scatter_add_rows: index out of range");

  Node n;
  n.op = Op::ScatterAdd;
  n.a = a.id;
  n.out_rows = out_rows;
  n.val = sorted_scatter_add(av, rows, out_rows);
  n.index = std::move(rows);
  return {push(std::move(n))};
}

const Matrix& Tape::value(Var v) const {
  check(v, "value");
  return node_val(v.id);
}

Matrix& Tape::grad_buf(int id) {
  Node& n = nodes_[id];
  if (!n.grad_set) {
    const Matrix& v = node_val(id);
    n.grad = Matrix::Zero(v.rows(), v.cols());
    n.grad_set = true;
  }
  return n.grad;
}

const Matrix& Tape::grad(Var v) {
  check(v, "grad");
  return grad_buf(v.id);
}

void Tape::backward(Var loss) {
  check(loss, "backward");
  const Matrix& lv = node_val(loss.id);
  if (lv.rows() != 1 || lv.cols() != 1)
    throw ShapeError("backward: loss must be a 1 x 1 scalar");
  for (auto& n : nodes_) n.grad_set = false;
  grad_buf(loss.id)(0, 0) = 1.0;

  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.grad_set) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul: {
        const Matrix& av = node_val(n.a);
        const Matrix& bv = node_val(n.b);
        grad_buf(n.a).noalias() += g * bv.transpose();
        grad_buf(n.b).noalias() += av.transpose() * g;
        break;
      }
      case Op::Add:
        grad_buf(n.a) += g;
        grad_buf(n.b) += g;
        break;
      case Op::Sub:
        grad_buf(n.a) += g;
        grad_buf(n.b) -= g;
        break;
      case Op::Scale:
        grad_buf(n.a) += g * n.c;
        break;
      case Op::AddBias:
        grad_buf(n.a) += g;
        grad_buf(n.b).row(0) += g.colwise().sum();
        break;
      case Op::Relu:
        grad_buf(n.a).array() += g.array() * (node_val(n.a).array() > 0.0).cast<double>();
        break;
      case Op::Square:
        grad_buf(n.a).array() += g.array() * 2.0 * node_val(n.a).array();
        break;
      case Op::Sum:
        grad_buf(n.a).array() += g(0, 0);
        break;
      case Op::HConcat: {
        Eigen::Index at = 0;
        for (int src : n.inputs) {
          Matrix& sg = grad_buf(src);
          sg += g.middleCols(at, sg.cols());
          at += sg.cols();
        }
        break;
      }
      case Op::VConcat: {
        Eigen::Index at = 0;
        for (int src : n.inputs) {
          Matrix& sg = grad_buf(src);
          sg += g.middleRows(at, sg.rows());
          at += sg.rows();
        }
        break;
      }
      case Op::Gather: {
        Matrix& sg = grad_buf(n.a);
        for (std::size_t i = 0; i < n.index.size(); ++i)
          sg.row(n.index[i]) += g.row(static_cast<Eigen::Index>(i));
        break;
      }
      case Op::ScatterAdd: {
        Matrix& sg = grad_buf(n.a);
        for (std::size_t i = 0; i < n.index.size(); ++i)
          sg.row(static_cast<Eigen::Index>(i)) += g.row(n.index[i]);
        break;
      }
    }
  }

  for (auto& n : nodes_)
    if (n.grad_set) require_finite(n.grad, "tape gradient");
}

void Tape::reset() { nodes_.clear(); }

}  // namespace adgb
