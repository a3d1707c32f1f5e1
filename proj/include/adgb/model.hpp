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

#include "adgb/graph.hpp"
#include "adgb/nn.hpp"
#include "adgb/tape.hpp"

namespace adgb {

// Architecture of the property-conditioned dynamics model.
struct ModelConfig {
  int hidden = 64;
  int rounds = 3;                 // message-passing steps L
  bool edge_state_in_prop = true; // feed previous edge embedding to the edge propagator
  bool residual_vertex = true;    // vertex update adds to the previous embedding
  GraphConfig graph;
  Material material = Material::Rope;
  bool unified = false;           // trained across materials
  int phi_dims = 1;

  std::vector<int> enc_v_widths() const { return {kVertexFeatWidth, hidden, hidden}; }
  std::vector<int> enc_e_widths() const {
    return {2 * kVertexFeatWidth + kEdgeFeatWidth, hidden, hidden};
  }
  std::vector<int> prop_e_widths() const {
    return {edge_state_in_prop ? 3 * hidden : 2 * hidden, hidden, hidden};
  }
  std::vector<int> prop_v_widths() const { return {2 * hidden, hidden, hidden}; }
  std::vector<int> dec_widths() const { return {hidden, hidden, kDim}; }
};

// Vertex/edge encoders, the two propagators, and the vertex decoder.
struct ModelParams {
  ModelConfig cfg;
  Mlp enc_v, enc_e, prop_e, prop_v, dec;

  static ModelParams make(const ModelConfig& cfg, std::uint64_t seed);
  void validate() const;
  int param_count() const;

  // Fixed flattening order used by the optimizer and checkpoints:
  // enc_v, enc_e, prop_e, prop_v, dec; per MLP: W0, b0, W1, b1, ...
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
};

// Per-object-particle displacement prediction for one step.
struct Prediction {
  Matrix displacement;  // n_obj x D, meters
  Matrix next_pos;      // n_obj x D
};

// One forward pass over an assembled graph. Only object particles receive
// predictions; end-effector motion is a kinematic input.
Prediction predict_step(const ModelParams& params, const DynGraph& g);

// Autoregressive K-step rollout. `window` holds the kHistory+1 most recent
// states (oldest first); `eef_future` supplies the commanded end-effector
// positions at t+1 .. t+K. Graph edges are rebuilt from predicted positions
// at every step. Returns predicted object positions for each of the K steps.
std::vector<Matrix> rollout(const ModelParams& params, const std::vector<ParticleState>& window,
                            const std::vector<Matrix>& eef_future, const PhysicalProperty& prop,
                            int steps);

// --- tape path (training/BPTT) ---

struct ModelVars {
  MlpVars enc_v, enc_e, prop_e, prop_v, dec;
};

ModelVars model_to_tape(Tape& tape, const ModelParams& params);
ModelVars model_to_tape_ref(Tape& tape, const ModelParams& params);

// Gradients of all parameters after tape.backward, in tensors() order.
std::vector<const Matrix*> model_grads(Tape& tape, const ModelVars& vars);

// One model step on the tape. `obj_window` holds kHistory+1 object-position
// vars (oldest first); `eef_window` the matching end-effector positions and
// `eef_next` the commanded position at t+1. Returns the next object
// positions (n_obj x D) as a tape var. Arithmetic matches predict_step bit
// for bit, so plain evaluation can serve as an oracle for the tape path.
Var model_step_tape(Tape& tape, const ModelVars& vars, const ModelConfig& cfg,
                    const std::vector<Var>& obj_window, const std::vector<Matrix>& eef_window,
                    const Matrix& eef_next, const PhysicalProperty& prop);

}  // namespace adgb
