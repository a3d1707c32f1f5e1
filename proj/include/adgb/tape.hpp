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

#pragma once

#include <deque>
#include <vector>

#include "adgb/types.hpp"

namespace adgb {

// Deterministic kernels shared by the tape and the plain evaluation paths.
//
// row_stable_product computes a * b one output row at a time through a staged
// aligned copy of the input row, so each row's result depends only on its
// values and never on its position. sorted_scatter_add accumulates every
// target row's contributions per column in ascending value order, making the
// result a function of the contribution multiset only. Together these make
// model evaluation bitwise invariant under particle permutations.
Matrix row_stable_product(const Matrix& a, const Matrix& b);
Matrix sorted_scatter_add(const Matrix& a, const std::vector<int>& rows, int out_rows);

// Handle to a tape node. Valid only for the tape that produced it, until the
// next reset().
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode autodiff over a fixed op set sized for the dynamics model:
// matmul, add, sub, scale, bias broadcast, relu, square, sum, row/col
// concatenation, and row gather / scatter-add for message aggregation.
//
// Every op validates shapes and rejects non-finite outputs. Matrix products
// are computed row by row through a staging buffer and scatter-add
// accumulates each receiver's contributions in value order, which makes the
// forward pass invariant to row permutations of the inputs bit for bit.
class Tape {
 public:
  Tape() = default;

  // Leaf holding a copy of `value`. Gradients accumulate here.
  Var leaf(Matrix value);
  // Leaf borrowing `value`; the caller keeps it alive until reset(). Used for
  // model parameters during inference-heavy loops where copies would dominate.
  Var leaf_ref(const Matrix& value);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var a, double s);
  // a + broadcast of a 1 x cols bias over every row of a.
  Var add_bias(Var a, Var bias);
  Var relu(Var a);
  Var square(Var a);
  // Sum of all entries; result is 1 x 1.
  Var sum(Var a);
  Var hconcat(const std::vector<Var>& parts);
  Var vconcat(const std::vector<Var>& parts);
  // out.row(i) = a.row(rows[i]).
  Var gather_rows(Var a, std::vector<int> rows);
  // out has `out_rows` rows; a.row(i) accumulates into out.row(rows[i]).
  Var scatter_add_rows(Var a, std::vector<int> rows, int out_rows);

  const Matrix& value(Var v) const;
  // Reverse pass from a 1 x 1 loss node. Gradients of all reachable nodes are
  // available through grad() afterwards; unreached nodes report zeros.
  void backward(Var loss);
  const Matrix& grad(Var v);

  // Clears all nodes; Var handles become invalid. Borrowed leaves are
  // released.
  void reset();
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  enum class Op {
    Leaf,
    MatMul,
    Add,
    Sub,
    Scale,
    AddBias,
    Relu,
    Square,
    Sum,
    HConcat,
    VConcat,
    Gather,
    ScatterAdd,
  };

  struct Node {
    Op op = Op::Leaf;
    int a = -1, b = -1;
    double c = 0.0;
    std::vector<int> inputs;   // concat sources
    std::vector<int> index;    // gather/scatter row map
    int out_rows = 0;          // scatter target height
    Matrix val;
    const Matrix* borrowed = nullptr;
    Matrix grad;
    bool grad_set = false;
  };

  const Matrix& node_val(int id) const {
    const Node& n = nodes_[id];
    return n.borrowed ? *n.borrowed : n.val;
  }
  Matrix& grad_buf(int id);
  int push(Node n);
  void check(Var v, const char* who) const;

  std::deque<Node> nodes_;
};

}  // namespace adgb
