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

#include <json.hpp>

#include "adgb/model.hpp"
#include "adgb/optim.hpp"
#include "adgb/sim.hpp"

namespace adgb {

// Task goal: a point set for rope straightening, a gather rectangle for
// granular piles, a corner-corresponded pose for the box.
struct Target {
  Material material = Material::Rope;
  Matrix rope_points;   // k x 2
  Rect granular_rect{};
  Matrix box_corners;   // 4 x 2, corresponded with object particles 0..3

  nlohmann::json to_json() const;
  static Target from_json(const nlohmann::json& j);
};

// rope: chamfer distance to the target set; granular: mean particle distance
// to the rectangle (zero inside); box: mean squared corner error.
double task_cost(const Matrix& object_particles, const Target& target);

// Appendix-style feasibility penalty: one unit if any predicted particle
// leaves the workspace, one unit if any initial end-effector point starts
// within d_min of any object particle, scaled to dominate task costs.
struct PenaltyContext {
  Rect workspace = default_workspace();
  double d_min = 0.02;
  double scale = 1e3;
};

double penalty(const std::vector<Matrix>& predicted_object, const Matrix& initial_eef,
               const Matrix& initial_object, const PenaltyContext& ctx);

// Push parameterization shared by task planning and curiosity-driven
// interaction: approach angle around the object, heading, and push length.
struct PushParam {
  double approach = 0;
  double heading = 0;
  double length = 0.05;
};

PushAction push_from_param(const Matrix& object_particles, const PushParam& p, double clearance);

// Model rollout of one candidate push from a settled state: the history
// window is the current state at rest with the end-effector at the push
// start. Returns predicted object positions per frame (frame count =
// length / frame_travel).
std::vector<Matrix> predict_push(const ModelParams& params, const Matrix& object_now,
                                 const SimWorld& world, const PushAction& action,
                                 double frame_travel, const PhysicalProperty& prop);

struct PlanConfig {
  MppiConfig mppi;          // defaults set in make_default()
  int max_steps = 10;
  double success_threshold = 1e-3;
  double push_min = 0.03;
  double push_max = 0.08;
  double approach_clearance = 0.035;
  double frame_travel = 0.005;
  PenaltyContext penalty;
  std::uint64_t seed = 0;

  static PlanConfig make_default(Material material);
};

double default_success_threshold(Material material);

// One MPPI plan for the next push. Throws if every candidate of the final
// iteration is infeasible.
struct PushPlan {
  PushAction action;
  PushParam param;
  double expected_cost = 0;
};

PushPlan mppi_plan(const ModelParams& params, const Matrix& object_now, const SimWorld& world,
                   const PhysicalProperty& prop, const Target& target, const PlanConfig& cfg,
                   std::uint64_t seed);

// Closed-loop control: plan, execute the push in the ground-truth world,
// observe, replan; stops at the success threshold or after max_steps pushes.
struct PlanStep {
  PushAction action;
  double cost_after = 0;
  std::vector<Matrix> predicted;  // model prediction for the executed push
  std::vector<Matrix> realized;   // ground-truth frames
};

struct PlanResult {
  Material material = Material::Rope;
  double initial_cost = 0;
  double threshold = 0;
  bool success = false;
  std::vector<PlanStep> steps;

  int steps_to_success() const;  // steps used, or max+1 when unsuccessful
  nlohmann::json to_json(bool include_trajectories = false) const;
};

PlanResult mpc_loop(SimWorld& world, const ModelParams& params,
                    const PhysicalProperty& conditioning, const Target& target,
                    const PlanConfig& cfg);

}  // namespace adgb
