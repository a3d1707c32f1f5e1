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

#include "adgb/adapt.hpp"

#include <chrono>
#include <cmath>

#include "adgb/chamfer.hpp"
#include "adgb/rng.hpp"

namespace adgb {

using nlohmann::json;

double record_prediction_cost(const ModelParams& params, const InteractionRecord& record,
                              const PhysicalProperty& prop) {
  int steps = record.frames() - 1;
  if (steps < 1) return 0.0;
  std::vector<Matrix> eef_future(record.eef_frames.begin() + 1, record.eef_frames.end());
  Matrix final_pred = rollout(params, record.pre_window, eef_future, prop, steps).back();
  return chamfer(final_pred, record.observed_object.back());
}

AdaptObjective::AdaptObjective(const ModelParams& params, Material material, int phi_dims)
    : params_(params), material_(material), phi_dims_(phi_dims) {}

void AdaptObjective::add_record(const InteractionRecord* record) { records_.push_back(record); }

double AdaptObjective::record_cost(int index, const Vector& phi) const {
  std::vector<double> key(phi.data(), phi.data() + phi.size());
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find({index, key});
    if (it != cache_.end()) return it->second;
  }
  PhysicalProperty prop;
  prop.material = material_;
  prop.phi = phi;
  double cost = record_prediction_cost(params_, *records_[index], prop);
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(std::make_pair(index, std::move(key)), cost);
  return cost;
}

double AdaptObjective::cost(const Vector& phi) const {
  if (static_cast<int>(phi.size()) != phi_dims_)
    throw ShapeError("AdaptObjective: property dimension mismatch");
  double total = 0;
  for (int i = 0; i < records(); ++i) total += record_cost(i, phi);
  return total;
}

namespace {

PropertyEstimate run_estimator(const std::function<double(const Vector&)>& objective, int dims,
                               Material material, const AdaptOptConfig& cfg) {
  PropertyRange range = extended_range(material, dims, cfg.range_extension);
  PropertyEstimate est;
  est.lo = range.lo;
  est.hi = range.hi;
  OptResult res;
  if (dims == 1) {
    res = bayes_opt([&](double x) { return objective(Vector::Constant(1, x)); }, range.lo[0],
                    range.hi[0], cfg.bo);
  } else {
    res = cma_es(objective, range.lo, range.hi, cfg.cma);
  }
  est.phi_hat = res.best_x;
  est.trace = std::move(res.trace);
  double tmin = est.trace.front().cost, tmax = tmin;
  for (const auto& p : est.trace) {
    tmin = std::min(tmin, p.cost);
    tmax = std::max(tmax, p.cost);
  }
  est.flat_landscape = (tmax - tmin) < 1e-12;
  return est;
}

}  // namespace

PropertyEstimate estimate_property(const ModelParams& params,
                                   const std::vector<InteractionRecord>& records,
                                   Material material, const AdaptOptConfig& cfg) {
  if (records.empty()) throw ConfigError("estimate_property: need at least one record");
  int dims = params.cfg.phi_dims;
  AdaptObjective objective(params, material, dims);
  for (const auto& r : records) objective.add_record(&r);
  return run_estimator([&](const Vector& phi) { return objective.cost(phi); }, dims, material,
                       cfg);
}

PropertyEstimate adapt_simulator_baseline(const std::vector<InteractionRecord>& records,
                                          const SimWorld& reference, double frame_travel,
                                          const AdaptOptConfig& cfg) {
  if (records.empty()) throw ConfigError("adapt_simulator_baseline: need at least one record");
  for (const auto& r : records)
    if (r.sim_state.size() == 0)
      throw ConfigError("adapt_simulator_baseline: record lacks a simulator state snapshot");
  int dims = static_cast<int>(reference.property().phi.size());

  auto objective = [&](const Vector& phi) -> double {
    double total = 0;
    for (const auto& r : records) {
      auto world = reference.clone();
      world->set_phi(phi);
      world->load_state(r.sim_state);
      PushFrames frames = world->execute_push(r.action, frame_travel);
      total += chamfer(frames.object.back(), r.observed_object.back());
    }
    return total;
  };
  return run_estimator(objective, dims, reference.material(), cfg);
}

Matrix belief_grid(Material material, int phi_dims, int points_per_dim, double range_extension) {
  if (points_per_dim < 2) throw ConfigError("belief_grid: need at least 2 points per dimension");
  PropertyRange range = extended_range(material, phi_dims, range_extension);
  if (phi_dims == 1) {
    Matrix grid(points_per_dim, 1);
    for (int i = 0; i < points_per_dim; ++i)
      grid(i, 0) = range.lo[0] + (range.hi[0] - range.lo[0]) * i / (points_per_dim - 1);
    return grid;
  }
  if (phi_dims != 2) throw ConfigError("belief_grid: supports 1- or 2-dimensional properties");
  Matrix grid(points_per_dim * points_per_dim, 2);
  for (int i = 0; i < points_per_dim; ++i)
    for (int j = 0; j < points_per_dim; ++j) {
      grid(i * points_per_dim + j, 0) =
          range.lo[0] + (range.hi[0] - range.lo[0]) * i / (points_per_dim - 1);
      grid(i * points_per_dim + j, 1) =
          range.lo[1] + (range.hi[1] - range.lo[1]) * j / (points_per_dim - 1);
    }
  return grid;
}

Belief belief_density(const AdaptObjective& objective, const Matrix& grid, double tau) {
  if (grid.rows() == 0) throw ConfigError("belief_density: empty grid");
  if (!(tau > 0)) throw ConfigError("belief_density: tau must be positive");
  const int points = static_cast<int>(grid.rows());
  const int n_rec = objective.records();
  Belief b;
  b.grid = grid;
  b.tau = tau;
  b.mass = Vector::Zero(points);
  for (int g = 0; g < points; ++g) {
    double mean_lik = 0;
    for (int i = 0; i < n_rec; ++i)
      mean_lik += std::exp(-objective.record_cost(i, grid.row(g).transpose()) / tau);
    b.mass[g] = mean_lik / std::max(1, n_rec);
  }
  double z = b.mass.sum();
  if (!(z > 0)) throw NumericError("belief_density: all-zero unnormalized mass (degenerate tau)");
  b.mass /= z;
  return b;
}

int Belief::argmax() const {
  int best = 0;
  for (int i = 1; i < mass.size(); ++i)
    if (mass[i] > mass[best]) best = i;
  return best;
}

Vector Belief::mean() const {
  Vector m = Vector::Zero(grid.cols());
  for (int i = 0; i < mass.size(); ++i) m += mass[i] * grid.row(i).transpose();
  return m;
}

double Belief::variance() const {
  Vector m = mean();
  double var = 0;
  for (int i = 0; i < mass.size(); ++i) var += mass[i] * (grid.row(i).transpose() - m).squaredNorm();
  return var;
}

bool Belief::point_mass(double tol) const { return mass.maxCoeff() > 1.0 - tol; }

SelectConfig SelectConfig::make_default() {
  SelectConfig cfg;
  cfg.mppi.samples = 32;
  cfg.mppi.iterations = 2;
  cfg.mppi.lambda = 0.1;
  cfg.mppi.noise_scale = Vector(3);
  cfg.mppi.noise_scale << 1.2, 0.6, 0.02;
  return cfg;
}

namespace {

PushAction select_by_objective(const ModelParams& params, const SimWorld& world,
                               const std::function<double(const std::vector<Matrix>&)>& score,
                               const PhysicalProperty& rollout_prop, const SelectConfig& cfg,
                               std::uint64_t seed, bool maximize_over_beliefs,
                               const std::vector<PhysicalProperty>* belief_props) {
  Matrix object_now = world.object_particles();
  Matrix nominal(1, 3);
  Rng rng(derive_seed(seed, 7));
  nominal << rng.uniform(0, 2 * M_PI), 0.0, 0.5 * (cfg.push_min + cfg.push_max);
  nominal(0, 1) = nominal(0, 0) + M_PI;  // point roughly at the object
  Vector lo(3), hi(3);
  lo << -1e9, -1e9, cfg.push_min;
  hi << 1e9, 1e9, cfg.push_max;
  std::vector<bool> circular{true, true, false};

  auto cost_fn = [&](const Matrix& seq) -> double {
    PushParam p{seq(0, 0), seq(0, 1), seq(0, 2)};
    PushAction action = push_from_param(object_now, p, cfg.approach_clearance);
    Matrix eef0 = world.eef_particles_at(action.start, action.direction);
    double pen;
    double value;
    if (!maximize_over_beliefs) {
      std::vector<Matrix> predicted =
          predict_push(params, object_now, world, action, cfg.frame_travel, rollout_prop);
      pen = penalty(predicted, eef0, object_now, cfg.penalty);
      value = score(predicted);
    } else {
      // expected pairwise disagreement between belief samples
      double total = 0;
      int pairs = static_cast<int>(belief_props->size()) / 2;
      std::vector<Matrix> all_frames;
      for (int k = 0; k < pairs; ++k) {
        std::vector<Matrix> pa = predict_push(params, object_now, world, action, cfg.frame_travel,
                                              (*belief_props)[2 * k]);
        std::vector<Matrix> pb = predict_push(params, object_now, world, action, cfg.frame_travel,
                                              (*belief_props)[2 * k + 1]);
        total += chamfer(pa.back(), pb.back());
        all_frames.insert(all_frames.end(), pa.begin(), pa.end());
        all_frames.insert(all_frames.end(), pb.begin(), pb.end());
      }
      pen = penalty(all_frames, eef0, object_now, cfg.penalty);
      value = total / std::max(1, pairs);
    }
    return -value + pen;
  };

  MppiConfig mppi_cfg = cfg.mppi;
  mppi_cfg.seed = seed;
  MppiResult res = mppi_optimize(nominal, lo, hi, circular, cost_fn, mppi_cfg);
  if (res.cost >= cfg.penalty.scale)
    throw NumericError("action selection: no feasible action within the sampling budget");
  PushParam p{res.sequence(0, 0), res.sequence(0, 1), res.sequence(0, 2)};
  return push_from_param(object_now, p, cfg.approach_clearance);
}

}  // namespace

PushAction select_curiosity_action(const ModelParams& params, const SimWorld& world,
                                   const PhysicalProperty& phi_current, const SelectConfig& cfg,
                                   std::uint64_t seed) {
  Matrix object_now = world.object_particles();
  auto score = [&](const std::vector<Matrix>& predicted) {
    return chamfer(object_now, predicted.back());
  };
  return select_by_objective(params, world, score, phi_current, cfg, seed, false, nullptr);
}

PushAction select_uncertainty_action(const ModelParams& params, const SimWorld& world,
                                     const Belief& belief, const SelectConfig& cfg,
                                     std::uint64_t seed, bool* fell_back) {
  if (cfg.uncertainty_samples < 2)
    throw ConfigError("select_uncertainty_action: need at least 2 samples");
  if (belief.point_mass()) {
    if (fell_back) *fell_back = true;
    PhysicalProperty prop;
    prop.material = world.material();
    prop.phi = belief.grid.row(belief.argmax()).transpose();
    return select_curiosity_action(params, world, prop, cfg, seed);
  }
  if (fell_back) *fell_back = false;

  // sample N property vectors from the belief by inverse CDF
  Rng rng(derive_seed(seed, 11));
  std::vector<PhysicalProperty> props;
  Vector cdf(belief.mass.size());
  double acc = 0;
  for (int i = 0; i < belief.mass.size(); ++i) {
    acc += belief.mass[i];
    cdf[i] = acc;
  }
  int n = cfg.uncertainty_samples - (cfg.uncertainty_samples % 2);
  for (int k = 0; k < n; ++k) {
    double u = rng.uniform01() * acc;
    int idx = 0;
    while (idx + 1 < cdf.size() && cdf[idx] < u) ++idx;
    PhysicalProperty prop;
    prop.material = world.material();
    prop.phi = belief.grid.row(idx).transpose();
    props.push_back(prop);
  }
  PhysicalProperty unused;
  unused.material = world.material();
  unused.phi = belief.mean();
  auto score = [](const std::vector<Matrix>&) { return 0.0; };
  return select_by_objective(params, world, score, unused, cfg, seed, true, &props);
}

json AdaptSessionResult::to_json() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "adapt_session";
  j["material"] = material_name(material);
  j["gt_phi"] = std::vector<double>(gt_phi.data(), gt_phi.data() + gt_phi.size());
  j["elapsed_seconds"] = elapsed_seconds;
  json inter = json::array();
  for (const auto& it : interactions) {
    json ij;
    ij["action"] = {{"start", {it.action.start.x(), it.action.start.y()}},
                    {"dir", {it.action.direction.x(), it.action.direction.y()}},
                    {"length", it.action.length}};
    ij["phi_hat"] =
        std::vector<double>(it.estimate.phi_hat.data(),
                            it.estimate.phi_hat.data() + it.estimate.phi_hat.size());
    ij["flat_landscape"] = it.estimate.flat_landscape;
    ij["uncertainty_fallback"] = it.uncertainty_fallback;
    ij["observed_displacement"] = it.observed_displacement;
    json trace = json::array();
    for (const auto& tp : it.estimate.trace) {
      json t;
      t["phi"] = std::vector<double>(tp.x.data(), tp.x.data() + tp.x.size());
      t["cost"] = tp.cost;
      trace.push_back(t);
    }
    ij["trace"] = trace;
    if (it.belief) {
      json bj;
      bj["tau"] = it.belief->tau;
      bj["variance"] = it.belief->variance();
      json pts = json::array(), mass = json::array();
      for (int g = 0; g < it.belief->mass.size(); ++g) {
        json row = json::array();
        for (int c = 0; c < it.belief->grid.cols(); ++c) row.push_back(it.belief->grid(g, c));
        pts.push_back(row);
        mass.push_back(it.belief->mass[g]);
      }
      bj["grid"] = pts;
      bj["mass"] = mass;
      ij["belief"] = bj;
    }
    inter.push_back(ij);
  }
  j["interactions"] = inter;
  j["final_phi"] = inter.empty()
                       ? json::array()
                       : inter.back().at("phi_hat");
  if (baseline_estimate) {
    json bj;
    bj["phi_hat"] = std::vector<double>(
        baseline_estimate->phi_hat.data(),
        baseline_estimate->phi_hat.data() + baseline_estimate->phi_hat.size());
    bj["flat_landscape"] = baseline_estimate->flat_landscape;
    json trace = json::array();
    for (const auto& tp : baseline_estimate->trace) {
      json t;
      t["phi"] = std::vector<double>(tp.x.data(), tp.x.data() + tp.x.size());
      t["cost"] = tp.cost;
      trace.push_back(t);
    }
    bj["trace"] = trace;
    j["simulator_baseline"] = bj;
  }
  return j;
}

AdaptSessionResult run_adaptation(SimWorld& world, const ModelParams& params,
                                  const AdaptConfig& cfg) {
  if (cfg.interactions < 1) throw ConfigError("run_adaptation: need at least one interaction");
  auto t0 = std::chrono::steady_clock::now();
  const Material material = world.material();
  const int dims = params.cfg.phi_dims;
  Rng noise_rng(derive_seed(cfg.seed, 3));

  AdaptSessionResult result;
  result.material = material;
  result.gt_phi = world.property().phi;

  AdaptObjective objective(params, material, dims);
  PhysicalProperty phi_current = mean_property(material, dims);
  int belief_points = cfg.belief_points > 0 ? cfg.belief_points : (dims == 1 ? 101 : 41);
  Matrix grid;
  if (cfg.track_belief || cfg.selection == Selection::Uncertainty)
    grid = belief_grid(material, dims, belief_points, cfg.opt.range_extension);

  result.records.reserve(cfg.interactions);
  for (int i = 0; i < cfg.interactions; ++i) {
    std::uint64_t step_seed = derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(i));
    InteractionLog log;
    PushAction action;
    if (cfg.selection == Selection::Uncertainty && i > 0) {
      Belief belief = belief_density(objective, grid, cfg.belief_tau);
      action = select_uncertainty_action(params, world, belief, cfg.select, step_seed,
                                         &log.uncertainty_fallback);
    } else {
      action = select_curiosity_action(params, world, phi_current, cfg.select, step_seed);
    }

    InteractionRecord record;
    record.sim_state = world.save_state();
    record.action = action;
    PushFrames frames = world.execute_push(action, cfg.select.frame_travel);
    record.eef_frames = frames.eef;
    record.observed_object = frames.object;
    if (cfg.obs_noise_sigma > 0) {
      for (Matrix& f : record.observed_object)
        for (Eigen::Index r = 0; r < f.rows(); ++r)
          for (Eigen::Index c = 0; c < f.cols(); ++c)
            f(r, c) += noise_rng.normal(0.0, cfg.obs_noise_sigma);
    }
    record.pre_window.assign(kHistory + 1,
                             ParticleState{record.observed_object.front(),
                                           record.eef_frames.front(), 0});
    log.observed_displacement =
        chamfer(record.observed_object.front(), record.observed_object.back());
    result.records.push_back(std::move(record));
    objective.add_record(&result.records.back());

    log.action = action;
    log.estimate = run_estimator([&](const Vector& phi) { return objective.cost(phi); }, dims,
                                 material, cfg.opt);
    phi_current.material = material;
    phi_current.phi = log.estimate.phi_hat;
    if (cfg.track_belief) log.belief = belief_density(objective, grid, cfg.belief_tau);
    result.interactions.push_back(std::move(log));
  }

  if (cfg.simulator_baseline)
    result.baseline_estimate =
        adapt_simulator_baseline(result.records, world, cfg.select.frame_travel, cfg.opt);

  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

double prediction_error(const ModelParams& params, const std::vector<InteractionRecord>& records,
                        const PhysicalProperty& prop) {
  if (records.empty()) throw ConfigError("prediction_error: no records");
  double total = 0;
  for (const auto& r : records) total += record_prediction_cost(params, r, prop);
  return total / static_cast<double>(records.size());
}

}  // namespace adgb
