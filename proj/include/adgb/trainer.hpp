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
#include <string>
#include <vector>

#include <json.hpp>

#include "adgb/model.hpp"
#include "adgb/sim.hpp"

namespace adgb {

struct TrainConfig {
  Material material = Material::Rope;
  int supervision_steps = 3;  // K: rollout depth the loss accumulates over
  double lr = 1e-3;
  int batch = 16;
  int epochs = 100;
  std::uint64_t seed = 0;
  double val_fraction = 0.1;  // split by episode, never by interaction
  bool condition_on_phi = true;
  bool unified_materials = false;  // combined data, no material one-hot
  bool two_property = false;       // rope stiffness + friction conditioning
  ModelConfig model;               // hidden width, rounds, graph radii
};

nlohmann::json train_config_to_json(const TrainConfig& cfg);

// One training window: predict frames t+1 .. t+K of one interaction.
struct WindowSample {
  int episode = 0;
  int interaction = 0;
  int t = 0;
};

std::vector<WindowSample> collect_windows(const std::vector<Episode>& episodes, int k_steps);

// History window (kHistory+1 states, left-padded with the first frame) for
// predicting frame t+1 of the given interaction.
std::vector<ParticleState> history_window(const InteractionData& rec, int t);

struct TrainResult {
  ModelParams params;
  std::vector<double> train_losses;  // per epoch, scaled-position MSE
  std::vector<double> val_losses;
  double val_one_step_mse = 0;  // meters^2, mean squared per-particle error
  double val_kstep_mse = 0;
  std::vector<int> val_episodes;
};

// Minimizes the accumulated K-step position error with Adam, backpropagating
// through the autoregressive rollout. Deterministic given (episodes, config).
TrainResult train(const std::vector<Episode>& episodes, TrainConfig cfg);

enum class PhiMode { GroundTruth, Mean, Estimated };
PhiMode phi_mode_from_name(const std::string& name);
const char* phi_mode_name(PhiMode mode);

struct EvalMetrics {
  double one_step_mse = 0;  // meters^2, mean squared per-particle error
  double kstep_mse = 0;     // error at the K-th predicted step
  struct PerEpisode {
    Vector phi;
    double one_step = 0;
    double kstep = 0;
  };
  std::vector<PerEpisode> per_episode;

  nlohmann::json to_json() const;
};

// Deterministic metrics over a test set. `estimated` supplies one property
// vector per episode when mode == Estimated.
EvalMetrics evaluate(const ModelParams& params, const std::vector<Episode>& episodes, PhiMode mode,
                     int k_steps = 3, const std::vector<Vector>* estimated = nullptr);

// Property vector an episode is conditioned on under the given mode.
PhysicalProperty conditioning_for(const Episode& ep, PhiMode mode, const Vector* estimated);

}  // namespace adgb
