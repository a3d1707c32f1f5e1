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

#include <cstdint>
#include <vector>

#include "adgb/rng.hpp"
#include "adgb/tape.hpp"
#include "adgb/types.hpp"

namespace adgb {

// Fully connected network, rectifier on hidden layers, identity output.
// weights[i] is widths[i] x widths[i+1]; biases[i] is 1 x widths[i+1].
struct Mlp {
  std::vector<int> widths;
  std::vector<Matrix> weights;
  std::vector<Matrix> biases;

  static Mlp make(std::vector<int> widths, Rng& rng);
  static Mlp zeros(std::vector<int> widths);

  int in_width() const { return widths.front(); }
  int out_width() const { return widths.back(); }
  int param_count() const;
  int layer_count() const { return static_cast<int>(weights.size()); }
};

// Plain forward pass; x is rows x in_width.
Matrix mlp_forward(const Mlp& m, const Matrix& x);

// Parameter handles for one Mlp pushed onto a tape.
struct MlpVars {
  std::vector<Var> weights;
  std::vector<Var> biases;
};

// Pushes parameters as owned leaves (training: gradients accumulate there).
MlpVars mlp_to_tape(Tape& tape, const Mlp& m);
// Pushes parameters as borrowed leaves (inference loops; m must outlive the
// tape generation).
MlpVars mlp_to_tape_ref(Tape& tape, const Mlp& m);

Var mlp_forward(Tape& tape, const MlpVars& m, Var x);

// Standard Adam. Moment buffers are created lazily to match parameter shapes.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

// In-place update of params given same-ordered grads. The step counter is
// incremented before bias correction.
void adam_step(AdamState& state, std::vector<Matrix*> params, const std::vector<const Matrix*>& grads);

}  // namespace adgb
