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

#include <map>
#include <mutex>
#include <optional>

#include <json.hpp>

#include "adgb/optim.hpp"
#include "adgb/planner.hpp"
#include "adgb/sim.hpp"

namespace adgb {

// One executed interaction: the unit of adaptation data.
struct InteractionRecord {
  std::vector<ParticleState> pre_window;  // kHistory+1 settled pre-push states
  PushAction action;
  std::vector<Matrix> eef_frames;         // frame 0 .. F
  std::vector<Matrix> observed_object;    // frame 0 .. F, may carry sensor noise
  Matrix sim_state;                       // world snapshot for simulator replay (may be empty)

  int frames() const { return static_cast<int>(observed_object.size()); }
};

struct PropertyEstimate {
  Vector phi_hat;
  Vector lo, hi;  // search bounds (training range extended by 0.2 x range)
  std::vector<OptTracePoint> trace;
  bool flat_landscape = false;
};

struct AdaptOptConfig {
  BoConfig bo;      // 1-D properties
  CmaConfig cma;    // multi-dimensional properties
  double range_extension = 0.2;
};

// Final-state chamfer distance between the model rollout under `prop` and
// the record's observation.
double record_prediction_cost(const ModelParams& params, const InteractionRecord& record,
                              const PhysicalProperty& prop);

// Accumulated prediction cost over records with per-(record, phi) caching;
// evaluations for distinct candidates may run concurrently.
class AdaptObjective {
 public:
  AdaptObjective(const ModelParams& params, Material material, int phi_dims);
  void add_record(const InteractionRecord* record);
  int records() const { return static_cast<int>(records_.size()); }
  double cost(const Vector& phi) const;
  double record_cost(int index, const Vector& phi) const;

 private:
  const ModelParams& params_;
  Material material_;
  int phi_dims_;
  std::vector<const InteractionRecord*> records_;
  mutable std::map<std::pair<int, std::vector<double>>, double> cache_;
  mutable std::mutex mutex_;
};

// Inverse optimization over the accumulated records: Bayesian optimization
// for 1-D properties, CMA-ES otherwise, over the extended range.
PropertyEstimate estimate_property(const ModelParams& params,
                                   const std::vector<InteractionRecord>& records,
                                   Material material, const AdaptOptConfig& cfg);

// Same objective, but predictions come from the ground-truth simulator class
// instead of the learned model. Records must carry sim_state snapshots.
PropertyEstimate adapt_simulator_baseline(const std::vector<InteractionRecord>& records,
                                          const SimWorld& reference, double frame_travel,
                                          const AdaptOptConfig& cfg);

// Softmax-style density over a property grid from per-record prediction
// errors: mass(phi) proportional to mean_i exp(-CD_i(phi) / tau).
struct Belief {
  Matrix grid;  // points x dims
  Vector mass;  // sums to 1
  double tau = 0.05;

  int argmax() const;
  Vector mean() const;
  // Per-dimension variance of the grid distribution, summed.
  double variance() const;
  bool point_mass(double tol = 1e-9) const;
};

Matrix belief_grid(Material material, int phi_dims, int points_per_dim, double range_extension = 0.2);

Belief belief_density(const AdaptObjective& objective, const Matrix& grid, double tau);

// Interaction selection. Curiosity maximizes the model-predicted object
// displacement (chamfer between current and predicted state); uncertainty
// maximizes expected prediction disagreement between property samples drawn
// from the belief. Both respect the workspace/clearance penalty.
struct SelectConfig {
  MppiConfig mppi;
  double push_min = 0.03;
  double push_max = 0.08;
  double approach_clearance = 0.035;
  double frame_travel = 0.005;
  PenaltyContext penalty;
  int uncertainty_samples = 8;  // N property samples (paired estimator)

  static SelectConfig make_default();
};

PushAction select_curiosity_action(const ModelParams& params, const SimWorld& world,
                                   const PhysicalProperty& phi_current, const SelectConfig& cfg,
                                   std::uint64_t seed);

// Falls back to curiosity selection (flag set in *fell_back) for point-mass
// beliefs.
PushAction select_uncertainty_action(const ModelParams& params, const SimWorld& world,
                                     const Belief& belief, const SelectConfig& cfg,
                                     std::uint64_t seed, bool* fell_back = nullptr);

// Full few-shot adaptation session against a ground-truth world.
enum class Selection { Curiosity, Uncertainty };

struct AdaptConfig {
  int interactions = 10;
  Selection selection = Selection::Curiosity;
  AdaptOptConfig opt;
  SelectConfig select;
  double obs_noise_sigma = 0.001;  // meters, additive on observed object frames
  bool track_belief = false;
  int belief_points = 0;  // 0: 101 for 1-D, 41 per dim for 2-D
  double belief_tau = 0.05;
  bool simulator_baseline = false;
  std::uint64_t seed = 0;
};

struct InteractionLog {
  PushAction action;
  PropertyEstimate estimate;
  std::optional<Belief> belief;
  bool uncertainty_fallback = false;
  double observed_displacement = 0;  // chamfer(start, end) of the observation
};

struct AdaptSessionResult {
  Material material = Material::Rope;
  Vector gt_phi;  // ground truth of the simulated object
  std::vector<InteractionRecord> records;
  std::vector<InteractionLog> interactions;
  std::optional<PropertyEstimate> baseline_estimate;
  double elapsed_seconds = 0;

  const Vector& final_phi() const { return interactions.back().estimate.phi_hat; }
  nlohmann::json to_json() const;
};

AdaptSessionResult run_adaptation(SimWorld& world, const ModelParams& params,
                                  const AdaptConfig& cfg);

// Mean final-state chamfer error of the model conditioned on `phi` over
// held-out records (the adaptation-benefit metric).
double prediction_error(const ModelParams& params, const std::vector<InteractionRecord>& records,
                        const PhysicalProperty& prop);

}  // namespace adgb
