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

#include "adgb/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "adgb/parallel.hpp"
#include "adgb/rng.hpp"

namespace adgb {

using nlohmann::json;

json train_config_to_json(const TrainConfig& cfg) {
  json j;
  j["material"] = material_name(cfg.material);
  j["supervision_steps"] = cfg.supervision_steps;
  j["lr"] = cfg.lr;
  j["batch"] = cfg.batch;
  j["epochs"] = cfg.epochs;
  j["seed"] = cfg.seed;
  j["val_fraction"] = cfg.val_fraction;
  j["condition_on_phi"] = cfg.condition_on_phi;
  j["unified_materials"] = cfg.unified_materials;
  j["two_property"] = cfg.two_property;
  return j;
}

PhiMode phi_mode_from_name(const std::string& name) {
  if (name == "ground_truth") return PhiMode::GroundTruth;
  if (name == "mean") return PhiMode::Mean;
  if (name == "estimated") return PhiMode::Estimated;
  throw ConfigError("unknown phi mode '" + name + "'");
}

const char* phi_mode_name(PhiMode mode) {
  switch (mode) {
    case PhiMode::GroundTruth: return "ground_truth";
    case PhiMode::Mean: return "mean";
    case PhiMode::Estimated: return "estimated";
  }
  return "unknown";
}

std::vector<WindowSample> collect_windows(const std::vector<Episode>& episodes, int k_steps) {
  std::vector<WindowSample> out;
  for (std::size_t e = 0; e < episodes.size(); ++e)
    for (std::size_t i = 0; i < episodes[e].interactions.size(); ++i) {
      int frames = episodes[e].interactions[i].frames();
      for (int t = 0; t + k_steps < frames; ++t)
        out.push_back({static_cast<int>(e), static_cast<int>(i), t});
    }
  return out;
}

std::vector<ParticleState> history_window(const InteractionData& rec, int t) {
  std::vector<ParticleState> window;
  for (int j = t - kHistory; j <= t; ++j) {
    int idx = std::max(j, 0);
    window.push_back({rec.object_frames[idx], rec.eef_frames[idx], j});
  }
  return window;
}

PhysicalProperty conditioning_for(const Episode& ep, PhiMode mode, const Vector* estimated) {
  switch (mode) {
    case PhiMode::GroundTruth: return ep.phi;
    case PhiMode::Mean: return mean_property(ep.material, static_cast<int>(ep.phi.phi.size()));
    case PhiMode::Estimated: {
      if (estimated == nullptr) throw ConfigError("estimated phi mode requires estimates");
      PhysicalProperty p;
      p.material = ep.material;
      p.phi = *estimated;
      return p;
    }
  }
  throw ConfigError("bad phi mode");
}

namespace {

void fisher_yates(std::vector<int>& idx, Rng& rng) {
  for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i)
    std::swap(idx[i], idx[static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
}

// Squared scaled-position error terms of one window's K-step tape rollout.
// Returns the coordinate count supervised.
long window_loss_terms(Tape& tape, const ModelVars& vars, const ModelConfig& mcfg,
                       const Episode& ep, const WindowSample& w, int k_steps,
                       std::vector<Var>& terms) {
  const InteractionData& rec = ep.interactions[w.interaction];
  std::deque<Var> obj_win;
  std::deque<Matrix> eef_win;
  for (int j = w.t - kHistory; j <= w.t; ++j) {
    int idx = std::max(j, 0);
    obj_win.push_back(tape.leaf(rec.object_frames[idx]));
    eef_win.push_back(rec.eef_frames[idx]);
  }
  const double s = mcfg.graph.pos_scale;
  long coords = 0;
  for (int k = 1; k <= k_steps; ++k) {
    const Matrix& eef_next = rec.eef_frames[w.t + k];
    Var next = model_step_tape(tape, vars, mcfg,
                               std::vector<Var>(obj_win.begin(), obj_win.end()),
                               std::vector<Matrix>(eef_win.begin(), eef_win.end()), eef_next,
                               ep.phi);
    Var err = tape.scale(tape.sub(next, tape.leaf(rec.object_frames[w.t + k])), s);
    terms.push_back(tape.sum(tape.square(err)));
    coords += rec.object_frames[w.t + k].size();
    obj_win.pop_front();
    obj_win.push_back(next);
    eef_win.pop_front();
    eef_win.push_back(eef_next);
  }
  return coords;
}

// Plain-path equivalent used for validation-loss logging.
double window_loss_plain(const ModelParams& params, const Episode& ep, const WindowSample& w,
                         int k_steps, long& coords) {
  const InteractionData& rec = ep.interactions[w.interaction];
  std::vector<ParticleState> window = history_window(rec, w.t);
  std::vector<Matrix> eef_future;
  for (int k = 1; k <= k_steps; ++k) eef_future.push_back(rec.eef_frames[w.t + k]);
  std::vector<Matrix> preds = rollout(params, window, eef_future, ep.phi, k_steps);
  const double s = params.cfg.graph.pos_scale;
  double sq = 0;
  for (int k = 1; k <= k_steps; ++k) {
    Matrix err = (preds[k - 1] - rec.object_frames[w.t + k]) * s;
    sq += err.array().square().sum();
    coords += err.size();
  }
  return sq;
}

}  // namespace

TrainResult train(const std::vector<Episode>& episodes, TrainConfig cfg) {
  if (episodes.empty()) throw ConfigError("train: empty dataset");
  const int k_steps = cfg.supervision_steps;
  if (k_steps < 1) throw ConfigError("train: supervision_steps must be >= 1");
  for (const Episode& ep : episodes)
    if (!cfg.unified_materials && ep.material != cfg.material)
      throw ConfigError("train: dataset material does not match the config");

  ModelConfig mcfg = cfg.model;
  mcfg.material = cfg.material;
  mcfg.unified = cfg.unified_materials;
  mcfg.phi_dims = static_cast<int>(episodes.front().phi.phi.size());
  mcfg.graph.include_phi = cfg.condition_on_phi;
  if (cfg.unified_materials) mcfg.graph.include_material = false;

  ModelParams params = ModelParams::make(mcfg, derive_seed(cfg.seed, 1));

  // validation split by episode
  std::vector<int> order(episodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng split_rng(derive_seed(cfg.seed, 2));
  fisher_yates(order, split_rng);
  int val_count = static_cast<int>(std::floor(cfg.val_fraction * static_cast<double>(order.size())));
  std::vector<int> val_eps(order.begin(), order.begin() + val_count);
  std::vector<int> train_eps(order.begin() + val_count, order.end());
  std::sort(val_eps.begin(), val_eps.end());
  std::sort(train_eps.begin(), train_eps.end());

  std::vector<WindowSample> windows;
  for (int e : train_eps)
    for (std::size_t i = 0; i < episodes[e].interactions.size(); ++i) {
      int frames = episodes[e].interactions[i].frames();
      for (int t = 0; t + k_steps < frames; ++t)
        windows.push_back({e, static_cast<int>(i), t});
    }
  if (windows.empty()) throw ConfigError("train: no usable windows (interactions too short)");
  std::vector<WindowSample> val_windows;
  for (int e : val_eps)
    for (std::size_t i = 0; i < episodes[e].interactions.size(); ++i) {
      int frames = episodes[e].interactions[i].frames();
      for (int t = 0; t + k_steps < frames; ++t)
        val_windows.push_back({e, static_cast<int>(i), t});
    }

  TrainResult result;
  AdamState adam;
  adam.lr = cfg.lr;
  Tape tape;
  std::vector<int> widx(windows.size());
  for (std::size_t i = 0; i < widx.size(); ++i) widx[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng epoch_rng(derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(epoch)));
    fisher_yates(widx, epoch_rng);
    double epoch_sq = 0;
    long epoch_coords = 0;

    for (std::size_t at = 0; at < widx.size(); at += cfg.batch) {
      std::size_t end = std::min(widx.size(), at + cfg.batch);
      tape.reset();
      ModelVars vars = model_to_tape(tape, params);
      std::vector<Var> terms;
      long coords = 0;
      for (std::size_t b = at; b < end; ++b) {
        const WindowSample& w = windows[widx[b]];
        coords += window_loss_terms(tape, vars, mcfg, episodes[w.episode], w, k_steps, terms);
      }
      Var total = terms.front();
      for (std::size_t ti = 1; ti < terms.size(); ++ti) total = tape.add(total, terms[ti]);
      Var loss = tape.scale(total, 1.0 / static_cast<double>(coords));
      try {
        tape.backward(loss);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
      }
      epoch_sq += tape.value(total)(0, 0);
      epoch_coords += coords;
      adam_step(adam, params.tensors(), model_grads(tape, vars));
    }
    result.train_losses.push_back(epoch_sq / static_cast<double>(epoch_coords));

    if (!val_windows.empty()) {
      double sq = 0;
      long coords = 0;
      for (const WindowSample& w : val_windows)
        sq += window_loss_plain(params, episodes[w.episode], w, k_steps, coords);
      result.val_losses.push_back(sq / static_cast<double>(coords));
    } else {
      result.val_losses.push_back(result.train_losses.back());
    }
  }

  std::vector<Episode> val_set;
  for (int e : val_eps) val_set.push_back(episodes[e]);
  const std::vector<Episode>& metric_set = val_set.empty() ? episodes : val_set;
  EvalMetrics metrics = evaluate(params, metric_set, PhiMode::GroundTruth, k_steps);
  result.params = std::move(params);
  result.val_one_step_mse = metrics.one_step_mse;
  result.val_kstep_mse = metrics.kstep_mse;
  result.val_episodes = val_eps;
  return result;
}

json EvalMetrics::to_json() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["one_step_mse"] = one_step_mse;
  j["kstep_mse"] = kstep_mse;
  j["per_episode"] = json::array();
  for (const auto& pe : per_episode) {
    json e;
    e["phi"] = std::vector<double>(pe.phi.data(), pe.phi.data() + pe.phi.size());
    e["one_step"] = pe.one_step;
    e["kstep"] = pe.kstep;
    j["per_episode"].push_back(e);
  }
  return j;
}

EvalMetrics evaluate(const ModelParams& params, const std::vector<Episode>& episodes, PhiMode mode,
                     int k_steps, const std::vector<Vector>* estimated) {
  if (episodes.empty()) throw ConfigError("evaluate: empty test set");
  if (mode == PhiMode::Estimated &&
      (estimated == nullptr || estimated->size() != episodes.size()))
    throw ConfigError("evaluate: need one property estimate per episode");

  struct Acc {
    double one_sq = 0, k_sq = 0;
    long one_n = 0, k_n = 0;
  };
  std::vector<Acc> acc(episodes.size());

  parallel_for(static_cast<int>(episodes.size()), [&](int e) {
    const Episode& ep = episodes[e];
    PhysicalProperty prop = conditioning_for(ep, mode, estimated ? &(*estimated)[e] : nullptr);
    Acc& a = acc[e];
    for (const InteractionData& rec : ep.interactions) {
      int frames = rec.frames();
      for (int t = 0; t + 1 < frames; ++t) {
        std::vector<ParticleState> window = history_window(rec, t);
        std::vector<Matrix> eef_future = {rec.eef_frames[t + 1]};
        Matrix pred = rollout(params, window, eef_future, prop, 1)[0];
        a.one_sq += (pred - rec.object_frames[t + 1]).rowwise().squaredNorm().sum();
        a.one_n += pred.rows();
      }
      for (int t = 0; t + k_steps < frames; ++t) {
        std::vector<ParticleState> window = history_window(rec, t);
        std::vector<Matrix> eef_future;
        for (int k = 1; k <= k_steps; ++k) eef_future.push_back(rec.eef_frames[t + k]);
        Matrix pred = rollout(params, window, eef_future, prop, k_steps).back();
        a.k_sq += (pred - rec.object_frames[t + k_steps]).rowwise().squaredNorm().sum();
        a.k_n += pred.rows();
      }
    }
  });

  EvalMetrics out;
  double one_sq = 0, k_sq = 0;
  long one_n = 0, k_n = 0;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const Acc& a = acc[e];
    EvalMetrics::PerEpisode pe;
    pe.phi = episodes[e].phi.phi;
    pe.one_step = a.one_n ? a.one_sq / static_cast<double>(a.one_n) : 0.0;
    pe.kstep = a.k_n ? a.k_sq / static_cast<double>(a.k_n) : 0.0;
    out.per_episode.push_back(std::move(pe));
    one_sq += a.one_sq;
    k_sq += a.k_sq;
    one_n += a.one_n;
    k_n += a.k_n;
  }
  out.one_step_mse = one_n ? one_sq / static_cast<double>(one_n) : 0.0;
  out.kstep_mse = k_n ? k_sq / static_cast<double>(k_n) : 0.0;
  return out;
}

}  // namespace adgb
