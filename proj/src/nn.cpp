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

#include "adgb/nn.hpp"

#include <cmath>
#include <string>

namespace adgb {

Mlp Mlp::make(std::vector<int> widths, Rng& rng) {
  if (widths.size() < 2) throw ConfigError("Mlp: need at least input and output widths");
  for (int w : widths)
    if (w <= 0) throw ConfigError("Mlp: widths must be positive");
  Mlp m;
  m.widths = std::move(widths);
  for (std::size_t i = 0; i + 1 < m.widths.size(); ++i) {
    int fan_in = m.widths[i], fan_out = m.widths[i + 1];
    double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.push_back(Matrix::Zero(1, fan_out));
  }
  return m;
}

Mlp Mlp::zeros(std::vector<int> widths) {
  Rng rng(0);
  Mlp m = make(std::move(widths), rng);
  for (auto& w : m.weights) w.setZero();
  return m;
}

int Mlp::param_count() const {
  int n = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    n += static_cast<int>(weights[i].size() + biases[i].size());
  return n;
}

Matrix mlp_forward(const Mlp& m, const Matrix& x) {
  if (x.cols() != m.in_width())
    throw ShapeError("mlp_forward: input width " + std::to_string(x.cols()) + " != " +
                     std::to_string(m.in_width()));
  Matrix h = x;
  for (int l = 0; l < m.layer_count(); ++l) {
    Matrix out = row_stable_product(h, m.weights[l]);
    out.rowwise() += m.biases[l].row(0);
    if (l + 1 < m.layer_count()) out = out.cwiseMax(0.0);
    h = std::move(out);
  }
  require_finite(h, "mlp_forward");
  return h;
}

MlpVars mlp_to_tape(Tape& tape, const Mlp& m) {
  MlpVars v;
  for (int l = 0; l < m.layer_count(); ++l) {
    v.weights.push_back(tape.leaf(m.weights[l]));
    v.biases.push_back(tape.leaf(m.biases[l]));
  }
  return v;
}

MlpVars mlp_to_tape_ref(Tape& tape, const Mlp& m) {
  MlpVars v;
  for (int l = 0; l < m.layer_count(); ++l) {
    v.weights.push_back(tape.leaf_ref(m.weights[l]));
    v.biases.push_back(tape.leaf_ref(m.biases[l]));
  }
  return v;
}

Var mlp_forward(Tape& tape, const MlpVars& m, Var x) {
  Var h = x;
  int layers = static_cast<int>(m.weights.size());
  for (int l = 0; l < layers; ++l) {
    h = tape.add_bias(tape.matmul(h, m.weights[l]), m.biases[l]);
    if (l + 1 < layers) h = tape.relu(h);
  }
  return h;
}

void adam_step(AdamState& state, std::vector<Matrix*> params, const std::vector<const Matrix*>& grads) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: param/grad count mismatch");
  if (state.m.empty()) {
    for (const Matrix* p : params) {
      state.m.push_back(Matrix::Zero(p->rows(), p->cols()));
      state.v.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam_step: state size mismatch");
  state.step += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    if (p.rows() != g.rows() || p.cols() != g.cols())
      throw ShapeError("adam_step: grad shape mismatch");
    require_finite(g, "adam_step gradient");
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i].array().matrix() + (1.0 - state.beta2) * g.cwiseProduct(g);
    Matrix m_hat = state.m[i] / bc1;
    Matrix v_hat = state.v[i] / bc2;
    p.array() -= state.lr * m_hat.array() / (v_hat.array().sqrt() + state.eps);
  }
}

}  // namespace adgb
