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

#include <doctest.h>

#include <cmath>

#include "adgb/nn.hpp"
#include "adgb/rng.hpp"
#include "adgb/tape.hpp"
#include "oracles.hpp"

using namespace adgb;

namespace {

Matrix random_matrix(Rng& rng, int r, int c, double scale = 1.0) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

}  // namespace

TEST_CASE("loss = x^2 at x = 3 has gradient 6") {
  Tape tape;
  Var x = tape.leaf(Matrix::Constant(1, 1, 3.0));
  Var loss = tape.sum(tape.square(x));
  tape.backward(loss);
  CHECK(tape.grad(x)(0, 0) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("loss = sum(A * I) has all-ones gradient for A") {
  Rng rng(7);
  Matrix a = random_matrix(rng, 4, 4);
  Tape tape;
  Var av = tape.leaf(a);
  Var iv = tape.leaf(Matrix::Identity(4, 4));
  Var loss = tape.sum(tape.matmul(av, iv));
  tape.backward(loss);
  CHECK((tape.grad(av).array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("every op matches central finite differences on random instances") {
  Rng rng(42);
  const double kTol = 1e-4;
  int cases = 0;
  for (int trial = 0; trial < 110; ++trial) {
    int r = 1 + static_cast<int>(rng.below(5));
    int c = 1 + static_cast<int>(rng.below(5));
    int k = 1 + static_cast<int>(rng.below(5));
    Matrix a = random_matrix(rng, r, k);
    Matrix b = random_matrix(rng, k, c);
    Matrix c2 = random_matrix(rng, r, k);
    Matrix bias = random_matrix(rng, 1, k);
    std::vector<int> gather_rows(3);
    for (auto& g : gather_rows) g = static_cast<int>(rng.below(r));
    std::vector<int> scatter_rows(r);
    int out_rows = r + 2;
    for (auto& s : scatter_rows) s = static_cast<int>(rng.below(out_rows));

    int which = trial % 9;
    auto build = [&](Tape& tape, Var av) -> Var {
      switch (which) {
        case 0: return tape.sum(tape.matmul(av, tape.leaf(b)));
        case 1: return tape.sum(tape.square(tape.add(av, tape.leaf(c2))));
        case 2: return tape.sum(tape.square(tape.sub(av, tape.leaf(c2))));
        case 3: return tape.sum(tape.square(tape.scale(av, -1.7)));
        case 4: return tape.sum(tape.square(tape.add_bias(av, tape.leaf(bias))));
        case 5: return tape.sum(tape.square(tape.relu(av)));
        case 6: return tape.sum(tape.square(tape.hconcat({av, tape.leaf(c2)})));
        case 7: return tape.sum(tape.square(tape.gather_rows(av, gather_rows)));
        default:
          return tape.sum(tape.square(tape.scatter_add_rows(av, scatter_rows, out_rows)));
      }
    };

    Tape tape;
    Var av = tape.leaf(a);
    Var loss = build(tape, av);
    tape.backward(loss);
    Matrix analytic = tape.grad(av);

    Matrix fd = oracle::fd_gradient(
        [&](const Matrix& x) {
          Tape t2;
          Var xv = t2.leaf(x);
          return t2.value(build(t2, xv))(0, 0);
        },
        a);
    CHECK(oracle::grad_rel_error(analytic, fd) < kTol);
    ++cases;
  }
  CHECK(cases >= 100);
}

TEST_CASE("vconcat and sum gradients flow to each part") {
  Rng rng(3);
  Matrix a = random_matrix(rng, 3, 2), b = random_matrix(rng, 2, 2);
  Tape tape;
  Var av = tape.leaf(a), bv = tape.leaf(b);
  Var loss = tape.sum(tape.square(tape.vconcat({av, bv})));
  tape.backward(loss);
  CHECK(oracle::grad_rel_error(tape.grad(av),
                               oracle::fd_gradient(
                                   [&](const Matrix& x) {
                                     Tape t;
                                     Var xv = t.leaf(x);
                                     return t.value(t.sum(t.square(t.vconcat({xv, t.leaf(b)}))))(0, 0);
                                   },
                                   a)) < 1e-4);
}

TEST_CASE("random 2-layer MLP gradient matches finite differences") {
  Rng rng(11);
  Mlp mlp = Mlp::make({4, 6, 2}, rng);
  Matrix x = random_matrix(rng, 3, 4);

  Tape tape;
  MlpVars vars = mlp_to_tape(tape, mlp);
  Var loss = tape.sum(tape.square(mlp_forward(tape, vars, tape.leaf(x))));
  tape.backward(loss);

  for (int layer = 0; layer < 2; ++layer) {
    Matrix fd_w = oracle::fd_gradient(
        [&](const Matrix& w) {
          Mlp m2 = mlp;
          m2.weights[layer] = w;
          return mlp_forward(m2, x).array().square().sum();
        },
        mlp.weights[layer]);
    CHECK(oracle::grad_rel_error(tape.grad(vars.weights[layer]), fd_w) < 1e-4);
    Matrix fd_b = oracle::fd_gradient(
        [&](const Matrix& b) {
          Mlp m2 = mlp;
          m2.biases[layer] = b;
          return mlp_forward(m2, x).array().square().sum();
        },
        mlp.biases[layer]);
    CHECK(oracle::grad_rel_error(tape.grad(vars.biases[layer]), fd_b) < 1e-4);
  }
}

TEST_CASE("mlp zero weights yields the last-layer bias") {
  Mlp mlp = Mlp::zeros({3, 4, 2});
  mlp.biases[1] << 0.5, -1.25;
  Rng rng(5);
  Matrix x = random_matrix(rng, 6, 3);
  Matrix y = mlp_forward(mlp, x);
  for (int i = 0; i < 6; ++i) {
    CHECK(y(i, 0) == doctest::Approx(0.5));
    CHECK(y(i, 1) == doctest::Approx(-1.25));
  }
}

TEST_CASE("identity-weight single layer passes input through") {
  Mlp mlp = Mlp::zeros({3, 3});
  mlp.weights[0] = Matrix::Identity(3, 3);
  Rng rng(6);
  Matrix x = random_matrix(rng, 4, 3);
  CHECK((mlp_forward(mlp, x) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hand-set 2-2-1 MLP matches manual arithmetic") {
  Mlp mlp = Mlp::zeros({2, 2, 1});
  mlp.weights[0] << 1.0, -2.0, 0.5, 3.0;
  mlp.biases[0] << 0.25, -0.5;
  mlp.weights[1] << 2.0, -1.0;
  mlp.biases[1] << 0.125;
  Matrix x(1, 2);
  x << 1.0, 1.0;
  // hidden pre-activation: (1*1 + 1*0.5 + 0.25, 1*-2 + 1*3 - 0.5) = (1.75, 0.5)
  // relu keeps both; output: 1.75*2 + 0.5*(-1) + 0.125 = 3.125
  CHECK(mlp_forward(mlp, x)(0, 0) == doctest::Approx(3.125).epsilon(1e-12));
}

TEST_CASE("mlp rejects width mismatch") {
  Mlp mlp = Mlp::zeros({3, 2});
  Matrix x(1, 4);
  x.setZero();
  CHECK_THROWS_AS(mlp_forward(mlp, x), ShapeError);
}

TEST_CASE("forward passes are pure and bitwise reproducible") {
  Rng rng(9);
  Mlp mlp = Mlp::make({5, 8, 3}, rng);
  Matrix x = random_matrix(rng, 7, 5);
  Matrix y1 = mlp_forward(mlp, x);
  Matrix y2 = mlp_forward(mlp, x);
  CHECK((y1.array() == y2.array()).all());
}

TEST_CASE("non-finite values raise instead of propagating") {
  Tape tape;
  Matrix bad(1, 1);
  bad << std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(tape.leaf(bad), NumericError);

  Var big = tape.leaf(Matrix::Constant(1, 1, 1e308));
  CHECK_THROWS_AS(tape.square(big), NumericError);
}

TEST_CASE("backward requires a scalar loss") {
  Tape tape;
  Var x = tape.leaf(Matrix::Zero(2, 2));
  CHECK_THROWS_AS(tape.backward(x), ShapeError);
}

TEST_CASE("matmul shape mismatch raises") {
  Tape tape;
  Var a = tape.leaf(Matrix::Zero(2, 3));
  Var b = tape.leaf(Matrix::Zero(2, 3));
  CHECK_THROWS_AS(tape.matmul(a, b), ShapeError);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  AdamState state;
  Matrix p = Matrix::Constant(2, 2, 1.5);
  Matrix g = Matrix::Zero(2, 2);
  Matrix before = p;
  adam_step(state, {&p}, {&g});
  CHECK((p.array() == before.array()).all());
}

TEST_CASE("adam first step matches the hand-evaluated update") {
  AdamState state;
  state.lr = 0.1;
  Matrix p = Matrix::Constant(1, 1, 2.0);
  Matrix g = Matrix::Constant(1, 1, 1.0);
  adam_step(state, {&p}, {&g});
  // m = 0.1, v = 0.001; m_hat = 1, v_hat = 1; delta = -0.1 * 1 / (1 + 1e-8)
  double expected = 2.0 - 0.1 * 1.0 / (1.0 + 1e-8);
  CHECK(p(0, 0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(state.step == 1);
}

TEST_CASE("adam with a fixed gradient moves monotonically in the descent direction") {
  AdamState state;
  state.lr = 0.05;
  Matrix p = Matrix::Constant(1, 1, 1.0);
  Matrix g = Matrix::Constant(1, 1, 0.5);
  double prev = p(0, 0);
  for (int i = 0; i < 3; ++i) {
    adam_step(state, {&p}, {&g});
    CHECK(p(0, 0) < prev);
    prev = p(0, 0);
  }
}

TEST_CASE("adam rejects non-finite gradients") {
  AdamState state;
  Matrix p = Matrix::Zero(1, 1);
  Matrix g = Matrix::Constant(1, 1, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(adam_step(state, {&p}, {&g}), NumericError);
}

TEST_CASE("mlp parameter count matches the width formula") {
  Rng rng(1);
  Mlp mlp = Mlp::make({7, 5, 3}, rng);
  CHECK(mlp.param_count() == 7 * 5 + 5 + 5 * 3 + 3);
}
