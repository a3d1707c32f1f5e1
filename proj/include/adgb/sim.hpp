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

#include <memory>
#include <vector>

#include "adgb/graph.hpp"
#include "adgb/rng.hpp"
#include "adgb/types.hpp"

namespace adgb {

// One straight-line push: the end-effector starts at `start` and travels
// `length` meters along the unit vector `direction`.
struct PushAction {
  Vector2 start{0, 0};
  Vector2 direction{1, 0};
  double length = 0;

  void validate() const;
};

// Aligned object/end-effector particle frames recorded during a push, one
// frame per `frame_travel` of end-effector motion. Frame 0 is the pre-push
// state with the end-effector at the start pose. Dynamic materials append
// settling frames at the equivalent time cadence after the push ends.
struct PushFrames {
  std::vector<Matrix> object;
  std::vector<Matrix> eef;

  int frames() const { return static_cast<int>(object.size()); }
};

// Ground-truth desk-scale world. Value-semantic state machines behind a
// polymorphic driver so episode generation, adaptation, and planning can
// treat materials uniformly.
class SimWorld {
 public:
  virtual ~SimWorld() = default;
  virtual Material material() const = 0;
  virtual const PhysicalProperty& property() const = 0;
  // Replaces the physical property (simulator-based adaptation baseline).
  virtual void set_phi(const Vector& phi) = 0;

  virtual Matrix object_particles() const = 0;
  virtual int eef_particle_count() const = 0;
  // End-effector particle representation for a given center and heading.
  virtual Matrix eef_particles_at(const Vector2& center, const Vector2& direction) const = 0;

  // Executes a push, recording frames every `frame_travel` of travel.
  virtual PushFrames execute_push(const PushAction& action, double frame_travel) = 0;

  // Opaque dynamic-state snapshot (restores object pose/velocities, not
  // configuration).
  virtual Matrix save_state() const = 0;
  virtual void load_state(const Matrix& state) = 0;

  virtual std::unique_ptr<SimWorld> clone() const = 0;
};

// --- rigid box: quasi-static pushing, ellipsoidal limit surface ----------

struct BoxConfig {
  double length = 0.20;  // x extent, meters
  double width = 0.10;   // y extent
  Vector2 cop_norm{0.0, 0.0};  // normalized CoP offset, each in (-0.5, 0.5)
  Vector2 center{0.0, 0.0};
  double theta = 0.0;
  double pusher_radius = 0.01;
  // Characteristic length of the limit surface as a multiple of the
  // rectangle's gyration radius; larger resists rotation more.
  double gyration_scale = 1.0;
  int extra_particles = 4;  // boundary particles beyond the 4 corners
  std::uint64_t particle_seed = 0;
};

class BoxWorld final : public SimWorld {
 public:
  explicit BoxWorld(const BoxConfig& cfg);

  Material material() const override { return Material::RigidBox; }
  const PhysicalProperty& property() const override { return prop_; }
  void set_phi(const Vector& phi) override;
  Matrix object_particles() const override;
  int eef_particle_count() const override { return 1; }
  Matrix eef_particles_at(const Vector2& center, const Vector2& direction) const override;
  PushFrames execute_push(const PushAction& action, double frame_travel) override;
  Matrix save_state() const override;
  void load_state(const Matrix& state) override;
  std::unique_ptr<SimWorld> clone() const override;

  // Single quasi-static substep: pusher center moves to `target` (at most
  // 2 mm away). Throws if the pusher starts inside the box.
  void step_to(const Vector2& target);
  void set_pusher(const Vector2& p) { pusher_ = p; }

  Vector2 center() const { return center_; }
  double theta() const { return theta_; }
  Vector2 cop_world() const;
  Matrix corners() const;  // 4 x 2, world frame
  const BoxConfig& config() const { return cfg_; }

 private:
  Vector2 to_world(const Vector2& body) const;
  Vector2 to_body(const Vector2& world) const;

  BoxConfig cfg_;
  PhysicalProperty prop_;
  Vector2 center_;
  double theta_;
  Vector2 pusher_{1e3, 1e3};
  double limit_c2_;        // characteristic length squared
  Matrix body_particles_;  // corners first, then sampled boundary points
};

// --- rope: damped mass-spring chain, stiffness-scaled bending ------------

struct RopeConfig {
  int nodes = 16;
  double seg_len = 0.025;
  double mass = 0.01;        // per node, kg
  double stretch_k = 800.0;    // N/m, fixed high
  double bend_k_min = 5e-4;    // N m/rad at stiffness 0
  double bend_k_max = 0.1;     // N m/rad at stiffness 1
  double viscous = 0.8;      // kg/s ground damping
  double mu_min = 0.05;      // Coulomb friction coefficient at friction 0
  double mu_max = 0.5;
  double dt = 1e-3;
  double pusher_radius = 0.01;
  double pusher_speed = 0.10;  // m/s
  double settle_speed = 2e-3;  // rest threshold, m/s
  double settle_max_time = 1.0;
  Matrix initial_points;  // nodes x 2; straight line if empty
};

class RopeWorld final : public SimWorld {
 public:
  RopeWorld(const RopeConfig& cfg, const PhysicalProperty& prop);

  Material material() const override { return Material::Rope; }
  const PhysicalProperty& property() const override { return prop_; }
  void set_phi(const Vector& phi) override;
  Matrix object_particles() const override { return pos_; }
  int eef_particle_count() const override { return 1; }
  Matrix eef_particles_at(const Vector2& center, const Vector2& direction) const override;
  PushFrames execute_push(const PushAction& action, double frame_travel) override;
  Matrix save_state() const override;
  void load_state(const Matrix& state) override;
  std::unique_ptr<SimWorld> clone() const override;

  // One symplectic Euler substep; the pusher center moves to `target`
  // (displacement at most 2 mm). Throws NumericError on instability.
  void step_to(const Vector2& target);
  void set_pusher(const Vector2& p) { pusher_ = p; }
  // Substeps with a stationary pusher until at rest; returns elapsed time.
  double settle();
  bool at_rest() const;

  // Elastic plus kinetic energy, joules.
  double energy() const;
  // Sum of absolute turning angles along the chain, radians.
  double curvature() const;
  double bend_stiffness() const { return bend_k_; }
  double friction_mu() const { return mu_; }
  const RopeConfig& config() const { return cfg_; }

 private:
  void apply_forces(Matrix& force) const;

  RopeConfig cfg_;
  PhysicalProperty prop_;
  double bend_k_ = 0;
  double mu_ = 0;
  Matrix pos_, vel_;  // nodes x 2
  Vector2 pusher_{1e3, 1e3};
};

// --- granular: position-based discs with overdamped contact flow ---------

struct GranularConfig {
  int count = 12;
  double phi = 0.5;            // radius = 0.01 + 0.02 * phi (meters)
  double pusher_len = 0.08;    // flat pusher length
  double pusher_halfwidth = 0.005;
  double carry = 0.3;          // fraction of last displacement carried over
  double contact_tol = 1e-4;   // max residual overlap per step
  Matrix initial_centers;      // count x 2; sampled ring if empty
};

double granular_radius(double phi);

class GranularWorld final : public SimWorld {
 public:
  explicit GranularWorld(const GranularConfig& cfg);

  Material material() const override { return Material::Granular; }
  const PhysicalProperty& property() const override { return prop_; }
  void set_phi(const Vector& phi) override;
  Matrix object_particles() const override { return centers_; }
  int eef_particle_count() const override { return 5; }
  Matrix eef_particles_at(const Vector2& center, const Vector2& direction) const override;
  PushFrames execute_push(const PushAction& action, double frame_travel) override;
  Matrix save_state() const override;
  void load_state(const Matrix& state) override;
  std::unique_ptr<SimWorld> clone() const override;

  // One quasi-static substep: pusher center moves to `target` (at most 2 mm),
  // then contacts are projected out to within contact_tol.
  void step_to(const Vector2& target);
  void set_pusher(const Vector2& center, const Vector2& direction);
  double radius() const { return radius_; }
  // Largest residual pairwise or pusher overlap, meters.
  double max_overlap() const;
  bool at_rest() const;
  const GranularConfig& config() const { return cfg_; }

 private:
  void project_contacts();

  GranularConfig cfg_;
  PhysicalProperty prop_;
  double radius_ = 0;
  Matrix centers_, prev_disp_;  // count x 2
  Vector2 pusher_center_{1e3, 1e3};
  Vector2 pusher_dir_{1, 0};
};

// --- episodes -------------------------------------------------------------

// Material-specific construction record, sufficient to rebuild the world.
struct WorldGeometry {
  // box
  double box_length = 0, box_width = 0;
  Vector2 box_center{0, 0};
  double box_theta = 0;
  std::uint64_t particle_seed = 0;
  // rope
  int rope_nodes = 0;
  double rope_seg = 0;
  Matrix rope_points;
  // granular
  int grain_count = 0;
  Matrix grain_centers;
};

struct InteractionData {
  PushAction action;
  std::vector<Matrix> object_frames;
  std::vector<Matrix> eef_frames;

  int frames() const { return static_cast<int>(object_frames.size()); }
};

struct Episode {
  Material material = Material::Rope;
  PhysicalProperty phi;
  WorldGeometry geometry;
  std::vector<InteractionData> interactions;
};

struct EpisodeConfig {
  Material material = Material::Rope;
  int interactions = 5;
  double frame_travel = 0.005;  // recorded frame per 5 mm of eef travel
  double push_min = 0.03;
  double push_max = 0.08;
  double approach_clearance = 0.035;  // start distance beyond object extent
  Rect workspace = default_workspace();
  bool two_property = false;  // rope: randomize stiffness and friction
};

std::unique_ptr<SimWorld> make_world(Material material, const WorldGeometry& geometry,
                                     const PhysicalProperty& prop);

// Draws the object configuration and property for one episode.
std::pair<WorldGeometry, PhysicalProperty> sample_world_config(const EpisodeConfig& cfg, Rng& rng);

// Random push aimed at the current object from outside, with start clearance.
PushAction sample_push(const SimWorld& world, const EpisodeConfig& cfg, Rng& rng);

// Full episode: sampled world plus `cfg.interactions` recorded pushes, with
// in-episode state continuity. Deterministic given the rng state.
Episode sample_episode(const EpisodeConfig& cfg, Rng& rng);

}  // namespace adgb
