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

#include <cmath>

#include "adgb/sim.hpp"

namespace adgb {

namespace {

// Rounds a push length to a whole number of recorded frames.
double quantize_length(double len, double frame_travel) {
  return std::max(1.0, std::round(len / frame_travel)) * frame_travel;
}

Matrix sample_rope_shape(int nodes, double seg, const Rect& ws, Rng& rng) {
  // random smooth heading walk from a start near the workspace center
  Matrix pts(nodes, 2);
  double extent = (nodes - 1) * seg;
  Vector2 start{ws.center().x() + rng.uniform(-0.08, 0.08) - extent / 2 * 0,
                ws.center().y() + rng.uniform(-0.06, 0.06)};
  double heading = rng.uniform(0, 2 * M_PI);
  // keep the chain inside the workspace by aiming the initial heading inward
  Vector2 to_center = ws.center() - start;
  if (to_center.norm() > 1e-9 && extent > 0.25)
    heading = std::atan2(to_center.y(), to_center.x()) + rng.uniform(-0.5, 0.5);
  pts.row(0) = start;
  for (int i = 1; i < nodes; ++i) {
    heading += rng.uniform(-0.35, 0.35);
    pts.row(i) = Vector2(pts(i - 1, 0) + seg * std::cos(heading), pts(i - 1, 1) + seg * std::sin(heading));
  }
  // recenter on the workspace center
  Vector2 mean = pts.colwise().mean();
  pts.rowwise() -= (mean - ws.center()).transpose();
  return pts;
}

Matrix sample_grain_centers(int count, double radius, const Rect& ws, Rng& rng) {
  // dart throwing inside a disc around the workspace center, bounded retries
  Matrix centers(count, 2);
  double region = std::max(0.05, radius * std::sqrt(static_cast<double>(count)) * 2.2);
  for (int i = 0; i < count; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < 400 && !ok; ++attempt) {
      double ang = rng.uniform(0, 2 * M_PI);
      double rad = region * std::sqrt(rng.uniform01());
      Vector2 c = ws.center() + Vector2(rad * std::cos(ang), rad * std::sin(ang));
      ok = true;
      for (int j = 0; j < i; ++j)
        if ((centers.row(j).transpose() - c).norm() < 2 * radius + 1e-4) {
          ok = false;
          break;
        }
      if (ok) centers.row(i) = c;
    }
    if (!ok) throw ConfigError("sample_grain_centers: could not place non-overlapping discs");
  }
  return centers;
}

}  // namespace

std::unique_ptr<SimWorld> make_world(Material material, const WorldGeometry& g,
                                     const PhysicalProperty& prop) {
  switch (material) {
    case Material::RigidBox: {
      BoxConfig cfg;
      cfg.length = g.box_length;
      cfg.width = g.box_width;
      cfg.center = g.box_center;
      cfg.theta = g.box_theta;
      cfg.particle_seed = g.particle_seed;
      cfg.cop_norm = {prop.phi[0], prop.phi[1]};
      return std::make_unique<BoxWorld>(cfg);
    }
    case Material::Rope: {
      RopeConfig cfg;
      cfg.nodes = g.rope_nodes;
      cfg.seg_len = g.rope_seg;
      cfg.initial_points = g.rope_points;
      return std::make_unique<RopeWorld>(cfg, prop);
    }
    case Material::Granular: {
      GranularConfig cfg;
      cfg.count = g.grain_count;
      cfg.phi = prop.phi[0];
      cfg.initial_centers = g.grain_centers;
      return std::make_unique<GranularWorld>(cfg);
    }
  }
  throw ConfigError("make_world: unknown material");
}

std::pair<WorldGeometry, PhysicalProperty> sample_world_config(const EpisodeConfig& cfg, Rng& rng) {
  WorldGeometry g;
  PhysicalProperty prop;
  const Rect& ws = cfg.workspace;
  switch (cfg.material) {
    case Material::RigidBox: {
      g.box_length = rng.uniform(0.15, 0.30);
      g.box_width = rng.uniform(0.05, 0.20);
      g.box_center = {ws.center().x() + rng.uniform(-0.05, 0.05),
                      ws.center().y() + rng.uniform(-0.04, 0.04)};
      g.box_theta = rng.uniform(0, 2 * M_PI);
      g.particle_seed = rng.bits();
      prop = PhysicalProperty::box(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
      break;
    }
    case Material::Rope: {
      g.rope_seg = 0.025;
      double length = rng.uniform(0.25, 0.45);
      g.rope_nodes = std::max(8, static_cast<int>(std::round(length / g.rope_seg)) + 1);
      g.rope_points = sample_rope_shape(g.rope_nodes, g.rope_seg, ws, rng);
      if (cfg.two_property)
        prop = PhysicalProperty::rope2(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
      else
        prop = PhysicalProperty::rope(rng.uniform(0.0, 1.0));
      break;
    }
    case Material::Granular: {
      double phi = rng.uniform(0.0, 1.0);
      prop = PhysicalProperty::granular(phi);
      double radius = granular_radius(phi);
      g.grain_count = 8 + static_cast<int>(rng.below(13));  // 8..20
      g.grain_centers = sample_grain_centers(g.grain_count, radius, ws, rng);
      break;
    }
  }
  return {g, prop};
}

PushAction sample_push(const SimWorld& world, const EpisodeConfig& cfg, Rng& rng) {
  Matrix obj = world.object_particles();
  Vector2 centroid = obj.colwise().mean();
  double extent = 0;
  for (Eigen::Index i = 0; i < obj.rows(); ++i)
    extent = std::max(extent, (obj.row(i).transpose() - centroid).norm());

  double approach = rng.uniform(0, 2 * M_PI);
  Vector2 u{std::cos(approach), std::sin(approach)};
  PushAction a;
  a.start = centroid + u * (extent + cfg.approach_clearance);
  // aim at a random object particle with angular jitter
  Vector2 target = obj.row(static_cast<Eigen::Index>(rng.below(obj.rows())));
  Vector2 dir = target - a.start;
  double ang = std::atan2(dir.y(), dir.x()) + rng.uniform(-0.25, 0.25);
  a.direction = {std::cos(ang), std::sin(ang)};
  a.length = quantize_length(rng.uniform(cfg.push_min, cfg.push_max), cfg.frame_travel);
  return a;
}

Episode sample_episode(const EpisodeConfig& cfg, Rng& rng) {
  if (cfg.interactions < 1) throw ConfigError("sample_episode: need at least one interaction");
  auto [geometry, prop] = sample_world_config(cfg, rng);
  auto world = make_world(cfg.material, geometry, prop);

  Episode ep;
  ep.material = cfg.material;
  ep.phi = prop;
  ep.geometry = geometry;
  for (int i = 0; i < cfg.interactions; ++i) {
    PushAction action = sample_push(*world, cfg, rng);
    InteractionData rec;
    rec.action = action;
    PushFrames frames = world->execute_push(action, cfg.frame_travel);
    rec.object_frames = std::move(frames.object);
    rec.eef_frames = std::move(frames.eef);
    ep.interactions.push_back(std::move(rec));
  }
  return ep;
}

}  // namespace adgb
