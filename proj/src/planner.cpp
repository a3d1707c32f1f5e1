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

#include "adgb/planner.hpp"

#include <cmath>

#include "adgb/chamfer.hpp"
#include "adgb/rng.hpp"

namespace adgb {

using nlohmann::json;

json Target::to_json() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["material"] = material_name(material);
  switch (material) {
    case Material::Rope: {
      json pts = json::array();
      for (Eigen::Index i = 0; i < rope_points.rows(); ++i)
        pts.push_back({rope_points(i, 0), rope_points(i, 1)});
      j["points"] = pts;
      break;
    }
    case Material::Granular:
      j["rect"] = {granular_rect.xmin, granular_rect.ymin, granular_rect.xmax, granular_rect.ymax};
      break;
    case Material::RigidBox: {
      json pts = json::array();
      for (Eigen::Index i = 0; i < box_corners.rows(); ++i)
        pts.push_back({box_corners(i, 0), box_corners(i, 1)});
      j["corners"] = pts;
      break;
    }
  }
  return j;
}

Target Target::from_json(const json& j) {
  Target t;
  t.material = material_from_name(j.at("material").get<std::string>());
  switch (t.material) {
    case Material::Rope: {
      const auto& pts = j.at("points");
      t.rope_points.resize(pts.size(), 2);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        t.rope_points(i, 0) = pts[i][0].get<double>();
        t.rope_points(i, 1) = pts[i][1].get<double>();
      }
      break;
    }
    case Material::Granular: {
      const auto& r = j.at("rect");
      t.granular_rect = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                         r[3].get<double>()};
      break;
    }
    case Material::RigidBox: {
      const auto& pts = j.at("corners");
      if (pts.size() != 4) throw ConfigError("box target needs 4 corners");
      t.box_corners.resize(4, 2);
      for (std::size_t i = 0; i < 4; ++i) {
        t.box_corners(i, 0) = pts[i][0].get<double>();
        t.box_corners(i, 1) = pts[i][1].get<double>();
      }
      break;
    }
  }
  return t;
}

double task_cost(const Matrix& object_particles, const Target& target) {
  switch (target.material) {
    case Material::Rope:
      return chamfer(object_particles, target.rope_points);
    case Material::Granular: {
      const Rect& r = target.granular_rect;
      double total = 0;
      for (Eigen::Index i = 0; i < object_particles.rows(); ++i) {
        double x = object_particles(i, 0), y = object_particles(i, 1);
        double dx = std::max({r.xmin - x, 0.0, x - r.xmax});
        double dy = std::max({r.ymin - y, 0.0, y - r.ymax});
        total += std::hypot(dx, dy);
      }
      return total / static_cast<double>(object_particles.rows());
    }
    case Material::RigidBox: {
      if (object_particles.rows() < 4)
        throw ShapeError("task_cost: box state needs the 4 corner particles");
      double total = 0;
      for (int i = 0; i < 4; ++i)
        total += (object_particles.row(i) - target.box_corners.row(i)).squaredNorm();
      return total / 4.0;
    }
  }
  throw ConfigError("task_cost: unknown material");
}

double penalty(const std::vector<Matrix>& predicted_object, const Matrix& initial_eef,
               const Matrix& initial_object, const PenaltyContext& ctx) {
  double units = 0;
  bool outside = false;
  for (const Matrix& frame : predicted_object) {
    for (Eigen::Index i = 0; i < frame.rows() && !outside; ++i)
      if (!ctx.workspace.contains(frame.row(i).transpose())) outside = true;
    if (outside) break;
  }
  if (outside) units += 1.0;
  bool too_close = false;
  for (Eigen::Index e = 0; e < initial_eef.rows() && !too_close; ++e)
    for (Eigen::Index i = 0; i < initial_object.rows() && !too_close; ++i)
      if ((initial_eef.row(e) - initial_object.row(i)).norm() < ctx.d_min) too_close = true;
  if (too_close) units += 1.0;
  return units * ctx.scale;
}

PushAction push_from_param(const Matrix& object_particles, const PushParam& p, double clearance) {
  Vector2 centroid = object_particles.colwise().mean();
  double extent = 0;
  for (Eigen::Index i = 0; i < object_particles.rows(); ++i)
    extent = std::max(extent, (object_particles.row(i).transpose() - centroid).norm());
  PushAction a;
  a.start = centroid + Vector2(std::cos(p.approach), std::sin(p.approach)) * (extent + clearance);
  a.direction = {std::cos(p.heading), std::sin(p.heading)};
  a.length = p.length;
  return a;
}

std::vector<Matrix> predict_push(const ModelParams& params, const Matrix& object_now,
                                 const SimWorld& world, const PushAction& action,
                                 double frame_travel, const PhysicalProperty& prop) {
  action.validate();
  int steps = std::max(1, static_cast<int>(std::round(action.length / frame_travel)));
  Matrix eef0 = world.eef_particles_at(action.start, action.direction);
  std::vector<ParticleState> window(kHistory + 1, ParticleState{object_now, eef0, 0});
  std::vector<Matrix> eef_future;
  for (int k = 1; k <= steps; ++k)
    eef_future.push_back(
        world.eef_particles_at(action.start + action.direction * (k * frame_travel),
                               action.direction));
  return rollout(params, window, eef_future, prop, steps);
}

double default_success_threshold(Material material) {
  switch (material) {
    case Material::RigidBox: return 4e-4;  // pose MSE, m^2
    case Material::Rope: return 2e-3;      // chamfer distance, m^2
    case Material::Granular: return 0.01;  // mean distance to rect, m
  }
  return 1e-3;
}

PlanConfig PlanConfig::make_default(Material material) {
  PlanConfig cfg;
  cfg.mppi.samples = 128;
  cfg.mppi.iterations = 4;
  cfg.mppi.lambda = 0.1;
  cfg.mppi.noise_scale = Vector(3);
  cfg.mppi.noise_scale << 0.8, 0.5, 0.015;
  cfg.success_threshold = default_success_threshold(material);
  return cfg;
}

PushPlan mppi_plan(const ModelParams& params, const Matrix& object_now, const SimWorld& world,
                   const PhysicalProperty& prop, const Target& target, const PlanConfig& cfg,
                   std::uint64_t seed) {
  // initialize the push behind the object relative to the target direction
  Vector2 centroid = object_now.colwise().mean();
  Vector2 goal;
  switch (target.material) {
    case Material::Rope: goal = target.rope_points.colwise().mean(); break;
    case Material::Granular: goal = target.granular_rect.center(); break;
    case Material::RigidBox: goal = target.box_corners.colwise().mean(); break;
    default: goal = centroid;
  }
  Vector2 away = centroid - goal;
  double base = away.norm() > 1e-9 ? std::atan2(away.y(), away.x()) : 0.0;

  Matrix nominal(1, 3);
  nominal << base, std::atan2(-away.y(), -away.x()), 0.5 * (cfg.push_min + cfg.push_max);
  Vector lo(3), hi(3);
  lo << -1e9, -1e9, cfg.push_min;
  hi << 1e9, 1e9, cfg.push_max;
  std::vector<bool> circular{true, true, false};

  auto cost_fn = [&](const Matrix& seq) -> double {
    PushParam p{seq(0, 0), seq(0, 1), seq(0, 2)};
    PushAction action = push_from_param(object_now, p, cfg.approach_clearance);
    std::vector<Matrix> predicted =
        predict_push(params, object_now, world, action, cfg.frame_travel, prop);
    Matrix eef0 = world.eef_particles_at(action.start, action.direction);
    return task_cost(predicted.back(), target) + penalty(predicted, eef0, object_now, cfg.penalty);
  };

  MppiConfig mppi_cfg = cfg.mppi;
  mppi_cfg.seed = seed;
  MppiResult res = mppi_optimize(nominal, lo, hi, circular, cost_fn, mppi_cfg);
  if (res.cost >= cfg.penalty.scale)
    throw NumericError("mppi_plan: no feasible action found within the sampling budget");

  PushPlan plan;
  plan.param = {res.sequence(0, 0), res.sequence(0, 1), res.sequence(0, 2)};
  plan.action = push_from_param(object_now, plan.param, cfg.approach_clearance);
  plan.expected_cost = res.cost;
  return plan;
}

int PlanResult::steps_to_success() const {
  if (!success) return static_cast<int>(steps.size()) + 1;
  return static_cast<int>(steps.size());
}

json PlanResult::to_json(bool include_trajectories) const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "plan_result";
  j["material"] = material_name(material);
  j["initial_cost"] = initial_cost;
  j["threshold"] = threshold;
  j["success"] = success;
  json steps_j = json::array();
  for (const PlanStep& s : steps) {
    json sj;
    sj["action"] = {{"start", {s.action.start.x(), s.action.start.y()}},
                    {"dir", {s.action.direction.x(), s.action.direction.y()}},
                    {"length", s.action.length}};
    sj["cost_after"] = s.cost_after;
    if (include_trajectories) {
      auto frames_to_json = [](const std::vector<Matrix>& frames) {
        json out = json::array();
        for (const Matrix& f : frames) {
          json fr = json::array();
          for (Eigen::Index i = 0; i < f.rows(); ++i) fr.push_back({f(i, 0), f(i, 1)});
          out.push_back(fr);
        }
        return out;
      };
      sj["predicted"] = frames_to_json(s.predicted);
      sj["realized"] = frames_to_json(s.realized);
    }
    steps_j.push_back(sj);
  }
  j["steps"] = steps_j;
  return j;
}

PlanResult mpc_loop(SimWorld& world, const ModelParams& params,
                    const PhysicalProperty& conditioning, const Target& target,
                    const PlanConfig& cfg) {
  if (world.material() != target.material || world.material() != params.cfg.material)
    throw ConfigError("mpc_loop: material mismatch between world, model, and target");

  PlanResult result;
  result.material = world.material();
  result.threshold = cfg.success_threshold;
  result.initial_cost = task_cost(world.object_particles(), target);
  double cost = result.initial_cost;
  if (cost < cfg.success_threshold) {
    result.success = true;
    return result;
  }

  for (int step = 0; step < cfg.max_steps; ++step) {
    Matrix object_now = world.object_particles();
    PushPlan plan = mppi_plan(params, object_now, world, conditioning, target, cfg,
                              derive_seed(cfg.seed, static_cast<std::uint64_t>(step)));
    PlanStep ps;
    ps.action = plan.action;
    ps.predicted = predict_push(params, object_now, world, plan.action, cfg.frame_travel,
                                conditioning);
    PushFrames frames = world.execute_push(plan.action, cfg.frame_travel);
    ps.realized = frames.object;
    cost = task_cost(world.object_particles(), target);
    ps.cost_after = cost;
    result.steps.push_back(std::move(ps));
    if (cost < cfg.success_threshold) {
      result.success = true;
      break;
    }
  }
  return result;
}

}  // namespace adgb
