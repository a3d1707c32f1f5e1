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

// Command-line entry point: data generation, training, adaptation sessions,
// MPC runs, evaluation, and SVG plot emission.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "adgb/adapt.hpp"
#include "adgb/checkpoint.hpp"
#include "adgb/dataset.hpp"
#include "adgb/planner.hpp"
#include "adgb/svg.hpp"
#include "adgb/trainer.hpp"

namespace {

using adgb::Episode;
using adgb::Material;
using adgb::Matrix;
using adgb::Vector;
using adgb::Vector2;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw adgb::IoError("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw adgb::IoError("malformed JSON in " + path);
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw adgb::IoError("cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw adgb::IoError("write failed for " + path);
}

Vector parse_phi(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    vals.push_back(std::stod(item));
  }
  if (vals.empty()) throw adgb::ConfigError("--gt-phi: empty value list");
  Vector v(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
  return v;
}

void emit_status(bool json_mode, const json& outputs) {
  if (json_mode) {
    json j;
    j["status"] = "ok";
    j["outputs"] = outputs;
    std::cout << j.dump() << std::endl;
  }
}

// Builds a fresh simulated object for adaptation/plan runs: geometry sampled
// from the seed, property forced to the requested ground truth.
std::unique_ptr<adgb::SimWorld> make_gt_world(Material material, const Vector& gt_phi,
                                              std::uint64_t seed, bool two_property) {
  adgb::EpisodeConfig ecfg;
  ecfg.material = material;
  ecfg.two_property = two_property;
  adgb::Rng rng(adgb::derive_seed(seed, 17));
  auto [geometry, prop] = adgb::sample_world_config(ecfg, rng);
  prop.phi = gt_phi;
  prop.validate(false);
  if (material == Material::Granular) {
    // grain radius depends on the property; re-sample a consistent packing
    geometry.grain_centers = Matrix();
    adgb::GranularConfig gcfg;
    gcfg.count = geometry.grain_count;
    gcfg.phi = gt_phi[0];
    return std::make_unique<adgb::GranularWorld>(gcfg);
  }
  return adgb::make_world(material, geometry, prop);
}

adgb::Target default_target(const adgb::SimWorld& world, std::uint64_t seed) {
  adgb::Target t;
  t.material = world.material();
  Matrix obj = world.object_particles();
  Vector2 centroid = obj.colwise().mean();
  adgb::Rng rng(adgb::derive_seed(seed, 23));
  switch (world.material()) {
    case Material::RigidBox: {
      const auto& box = dynamic_cast<const adgb::BoxWorld&>(world);
      Vector2 shift{rng.uniform(0.05, 0.10) * (centroid.x() > 0 ? -1 : 1),
                    rng.uniform(-0.04, 0.04)};
      t.box_corners = box.corners();
      t.box_corners.rowwise() += shift.transpose();
      break;
    }
    case Material::Rope: {
      int n = static_cast<int>(obj.rows());
      double seg = (obj.row(0) - obj.row(1)).norm();
      t.rope_points.resize(n, 2);
      for (int i = 0; i < n; ++i)
        t.rope_points.row(i) =
            Vector2(centroid.x() + (i - (n - 1) / 2.0) * seg, centroid.y());
      break;
    }
    case Material::Granular: {
      double half = 0.07;
      t.granular_rect = {centroid.x() - half, centroid.y() - half, centroid.x() + half,
                         centroid.y() + half};
      break;
    }
  }
  return t;
}

// --- plot helpers ----------------------------------------------------------

void plot_adapt_session(const json& j, const std::string& out, const std::string& what) {
  const auto& inter = j.at("interactions");
  if (inter.empty()) throw adgb::ConfigError("plot: session has no interactions");
  std::vector<double> steps;
  for (std::size_t i = 0; i < inter.size(); ++i) steps.push_back(static_cast<double>(i + 1));

  if (what == "trajectory" || what == "auto") {
    int dims = static_cast<int>(inter[0].at("phi_hat").size());
    adgb::SvgPlot plot(560, 360, "Property estimate per interaction");
    double lo = 0, hi = 1;
    std::vector<std::vector<double>> series(dims);
    for (const auto& it : inter)
      for (int d = 0; d < dims; ++d) series[d].push_back(it.at("phi_hat")[d].get<double>());
    for (int d = 0; d < dims; ++d)
      for (double v : series[d]) {
        lo = std::min(lo, v - 0.05);
        hi = std::max(hi, v + 0.05);
      }
    plot.set_axes(1, static_cast<double>(inter.size()), lo, hi, "interaction", "phi estimate");
    const char* colors[2] = {"#1f77b4", "#d62728"};
    std::vector<std::pair<std::string, std::string>> entries;
    for (int d = 0; d < dims; ++d) {
      plot.polyline(steps, series[d], colors[d % 2]);
      plot.scatter(steps, series[d], colors[d % 2]);
      entries.push_back({"phi[" + std::to_string(d) + "]", colors[d % 2]});
    }
    if (j.contains("gt_phi"))
      for (int d = 0; d < dims && d < static_cast<int>(j["gt_phi"].size()); ++d)
        plot.hline(j["gt_phi"][d].get<double>(), colors[d % 2]);
    plot.legend(entries);
    plot.write(out);
    return;
  }
  if (what == "cost") {
    std::vector<double> best;
    for (const auto& it : inter) {
      double b = std::numeric_limits<double>::infinity();
      for (const auto& tp : it.at("trace")) b = std::min(b, tp.at("cost").get<double>());
      best.push_back(b);
    }
    adgb::SvgPlot plot(560, 360, "Estimation cost per interaction");
    plot.set_axes(1, static_cast<double>(inter.size()), 0,
                  *std::max_element(best.begin(), best.end()) * 1.1 + 1e-12, "interaction",
                  "best chamfer cost (m^2)");
    plot.polyline(steps, best, "#1f77b4");
    plot.scatter(steps, best, "#1f77b4");
    plot.write(out);
    return;
  }
  if (what == "landscape") {
    const auto& trace = inter.back().at("trace");
    int dims = static_cast<int>(inter.back().at("phi_hat").size());
    if (dims == 1) {
      std::vector<double> xs, ys;
      for (const auto& tp : trace) {
        xs.push_back(tp.at("phi")[0].get<double>());
        ys.push_back(tp.at("cost").get<double>());
      }
      adgb::SvgPlot plot(560, 360, "Cost landscape (final interaction set)");
      plot.set_axes(*std::min_element(xs.begin(), xs.end()), *std::max_element(xs.begin(), xs.end()),
                    0, *std::max_element(ys.begin(), ys.end()) * 1.1 + 1e-12, "phi",
                    "chamfer cost (m^2)");
      plot.scatter(xs, ys, "#1f77b4");
      plot.write(out);
    } else {
      // 2-D: scatter of evaluated points colored by rank is approximated by
      // plotting cost-sorted traces; a dense heatmap needs the belief grid.
      if (!inter.back().contains("belief"))
        throw adgb::ConfigError("plot: 2-D landscape needs a session with --belief");
      const auto& bj = inter.back()["belief"];
      int side = static_cast<int>(std::lround(std::sqrt(bj.at("mass").size())));
      Matrix values(side, side);
      double xmin = 1e18, xmax = -1e18, ymin = 1e18, ymax = -1e18;
      for (int i = 0; i < side; ++i)
        for (int k = 0; k < side; ++k) {
          values(k, i) = bj["mass"][i * side + k].get<double>();
          xmin = std::min(xmin, bj["grid"][i * side + k][0].get<double>());
          xmax = std::max(xmax, bj["grid"][i * side + k][0].get<double>());
          ymin = std::min(ymin, bj["grid"][i * side + k][1].get<double>());
          ymax = std::max(ymax, bj["grid"][i * side + k][1].get<double>());
        }
      adgb::SvgPlot plot(560, 480, "Belief density");
      plot.set_axes(xmin, xmax, ymin, ymax, "phi[0]", "phi[1]");
      plot.heatmap(values, xmin, xmax, ymin, ymax);
      plot.write(out);
    }
    return;
  }
  throw adgb::ConfigError("plot: unknown --what '" + what + "' for an adaptation session");
}

void plot_plan_results(const std::vector<json>& results, const std::string& out,
                       const std::string& what) {
  if (results.empty()) throw adgb::ConfigError("plot: no plan results");
  std::size_t max_steps = 0;
  for (const auto& r : results) max_steps = std::max(max_steps, r.at("steps").size());
  if (max_steps == 0) throw adgb::ConfigError("plot: plan results contain no steps");

  // per-result cost curves, padded by holding the last value
  std::vector<std::vector<double>> curves;
  for (const auto& r : results) {
    std::vector<double> c;
    c.push_back(r.at("initial_cost").get<double>());
    for (const auto& s : r.at("steps")) c.push_back(s.at("cost_after").get<double>());
    while (c.size() < max_steps + 1) c.push_back(c.back());
    curves.push_back(std::move(c));
  }

  if (what == "error" || what == "auto") {
    std::vector<double> xs, med, q25, q75;
    for (std::size_t t = 0; t <= max_steps; ++t) {
      std::vector<double> vals;
      for (const auto& c : curves) vals.push_back(c[t]);
      std::sort(vals.begin(), vals.end());
      auto quant = [&](double q) {
        double pos = q * (vals.size() - 1);
        std::size_t i = static_cast<std::size_t>(pos);
        double frac = pos - i;
        return i + 1 < vals.size() ? vals[i] * (1 - frac) + vals[i + 1] * frac : vals[i];
      };
      xs.push_back(static_cast<double>(t));
      med.push_back(quant(0.5));
      q25.push_back(quant(0.25));
      q75.push_back(quant(0.75));
    }
    adgb::SvgPlot plot(560, 360, "Task error vs planning step");
    plot.set_axes(0, static_cast<double>(max_steps), 0,
                  *std::max_element(q75.begin(), q75.end()) * 1.1 + 1e-12, "planning step",
                  "task cost");
    plot.band(xs, q25, q75, "#1f77b4");
    plot.polyline(xs, med, "#1f77b4", 2.0);
    if (results[0].contains("threshold"))
      plot.hline(results[0]["threshold"].get<double>(), "#d62728");
    plot.write(out);
    return;
  }
  if (what == "success") {
    // success rate vs error threshold, evaluated at the final state
    std::vector<double> finals;
    for (const auto& c : curves) finals.push_back(c.back());
    double hi = *std::max_element(finals.begin(), finals.end()) * 1.2 + 1e-12;
    std::vector<double> xs, rate;
    for (int i = 0; i <= 60; ++i) {
      double thr = hi * i / 60;
      int ok = 0;
      for (double f : finals)
        if (f <= thr) ++ok;
      xs.push_back(thr);
      rate.push_back(static_cast<double>(ok) / finals.size());
    }
    adgb::SvgPlot plot(560, 360, "Success rate vs error threshold");
    plot.set_axes(0, hi, 0, 1.02, "error threshold", "success rate");
    plot.polyline(xs, rate, "#2ca02c", 2.0);
    plot.write(out);
    return;
  }
  throw adgb::ConfigError("plot: unknown --what '" + what + "' for plan results");
}

// --- subcommand implementations ---------------------------------------------

struct GenDataArgs {
  std::string out;
  std::string material = "rope";
  int episodes = 200;
  int interactions = 5;
  std::uint64_t seed = 0;
  double push_min = 0.03, push_max = 0.08, frame_travel = 0.005;
  bool two_property = false;
  bool json_out = false;
};

int run_gen_data(const GenDataArgs& a) {
  adgb::DatasetConfig cfg;
  cfg.episode.material = adgb::material_from_name(a.material);
  cfg.episode.interactions = a.interactions;
  cfg.episode.push_min = a.push_min;
  cfg.episode.push_max = a.push_max;
  cfg.episode.frame_travel = a.frame_travel;
  cfg.episode.two_property = a.two_property;
  cfg.episodes = a.episodes;
  cfg.seed = a.seed;
  adgb::write_dataset(a.out, cfg);
  emit_status(a.json_out, {{"dataset", a.out}, {"manifest", a.out + ".manifest.json"}});
  return kExitOk;
}

struct TrainArgs {
  std::string data, out;
  int epochs = 100, batch = 16, k = 3, hidden = 64, rounds = 3;
  double lr = 1e-3, val_fraction = 0.1;
  std::uint64_t seed = 0;
  bool condition_on_phi = true;
  bool unified = false;
  double d_obj = 0, d_robot = 0.03;  // d_obj 0: per-material default
  bool json_out = false;
};

double default_d_obj(Material m) {
  switch (m) {
    case Material::RigidBox: return 0.40;
    case Material::Rope: return 0.055;
    case Material::Granular: return 0.08;
  }
  return 0.06;
}

int run_train(const TrainArgs& a) {
  std::vector<Episode> episodes = adgb::read_dataset(a.data);
  adgb::TrainConfig cfg;
  cfg.material = episodes.front().material;
  for (const Episode& ep : episodes)
    if (ep.material != cfg.material) cfg.unified_materials = true;
  cfg.unified_materials = cfg.unified_materials || a.unified;
  cfg.supervision_steps = a.k;
  cfg.lr = a.lr;
  cfg.batch = a.batch;
  cfg.epochs = a.epochs;
  cfg.seed = a.seed;
  cfg.val_fraction = a.val_fraction;
  cfg.condition_on_phi = a.condition_on_phi;
  cfg.model.hidden = a.hidden;
  cfg.model.rounds = a.rounds;
  cfg.model.graph.d_obj = a.d_obj > 0 ? a.d_obj : default_d_obj(cfg.material);
  cfg.model.graph.d_robot = a.d_robot;

  adgb::TrainResult result = adgb::train(episodes, cfg);

  json meta;
  meta["train"] = adgb::train_config_to_json(cfg);
  meta["data"] = a.data;
  meta["metrics"] = {{"final_train_loss", result.train_losses.back()},
                     {"final_val_loss", result.val_losses.back()},
                     {"val_one_step_mse", result.val_one_step_mse},
                     {"val_kstep_mse", result.val_kstep_mse}};
  adgb::save_checkpoint(a.out, result.params, meta);

  json metrics;
  metrics["schema_version"] = adgb::kSchemaVersion;
  metrics["train_losses"] = result.train_losses;
  metrics["val_losses"] = result.val_losses;
  metrics["val_one_step_mse"] = result.val_one_step_mse;
  metrics["val_kstep_mse"] = result.val_kstep_mse;
  metrics["val_episodes"] = result.val_episodes;
  metrics["config"] = adgb::train_config_to_json(cfg);
  write_json_file(a.out + ".metrics.json", metrics);
  emit_status(a.json_out, {{"checkpoint", a.out},
                           {"metrics", a.out + ".metrics.json"},
                           {"final_train_loss", result.train_losses.back()}});
  return kExitOk;
}

struct AdaptArgs {
  std::string checkpoint, material = "rope", gt_phi, out;
  int interactions = 10;
  std::string selection = "curiosity";
  std::string baseline = "none";
  std::uint64_t seed = 0;
  double noise_sigma = 0.001;
  bool belief = false;
  int bo_evals = 50, cma_evals = 150;
  int mppi_samples = 32, mppi_iters = 2;
  bool json_out = false;
};

int run_adapt(const AdaptArgs& a) {
  adgb::Checkpoint cp = adgb::load_checkpoint(a.checkpoint);
  Material material = adgb::material_from_name(a.material);
  if (material != cp.params.cfg.material && !cp.params.cfg.unified)
    throw adgb::ConfigError("adapt: checkpoint was trained for a different material");
  Vector gt = parse_phi(a.gt_phi);
  if (gt.size() != cp.params.cfg.phi_dims)
    throw adgb::ConfigError("adapt: --gt-phi dimension does not match the checkpoint");

  auto world = make_gt_world(material, gt, a.seed, cp.params.cfg.phi_dims == 2 &&
                                                        material == Material::Rope);
  adgb::AdaptConfig cfg;
  cfg.interactions = a.interactions;
  cfg.selection = a.selection == "uncertainty" ? adgb::Selection::Uncertainty
                                               : adgb::Selection::Curiosity;
  if (a.selection != "uncertainty" && a.selection != "curiosity")
    throw adgb::ConfigError("adapt: --selection must be curiosity or uncertainty");
  if (a.baseline != "none" && a.baseline != "simulator")
    throw adgb::ConfigError("adapt: --baseline must be none or simulator");
  cfg.simulator_baseline = a.baseline == "simulator";
  cfg.obs_noise_sigma = a.noise_sigma;
  cfg.track_belief = a.belief;
  cfg.opt.bo.evaluations = a.bo_evals;
  cfg.opt.cma.max_evals = a.cma_evals;
  cfg.select = adgb::SelectConfig::make_default();
  cfg.select.mppi.samples = a.mppi_samples;
  cfg.select.mppi.iterations = a.mppi_iters;
  cfg.seed = a.seed;

  adgb::AdaptSessionResult session = adgb::run_adaptation(*world, cp.params, cfg);
  json j = session.to_json();
  j["seed"] = a.seed;
  j["checkpoint"] = a.checkpoint;
  j["config"] = {{"interactions", a.interactions}, {"selection", a.selection},
                 {"baseline", a.baseline}, {"noise_sigma", a.noise_sigma},
                 {"bo_evals", a.bo_evals}, {"cma_evals", a.cma_evals}};
  write_json_file(a.out, j);
  std::vector<double> phi_hat(session.final_phi().data(),
                              session.final_phi().data() + session.final_phi().size());
  emit_status(a.json_out, {{"session", a.out}, {"phi_hat", phi_hat}});
  return kExitOk;
}

struct PlanArgs {
  std::string checkpoint, material = "rope", gt_phi, target, out;
  std::string phi_mode = "estimated";
  std::uint64_t seed = 0;
  int max_steps = 10, interactions = 10;
  int mppi_samples = 128, mppi_iters = 4;
  bool trajectories = false;
  bool json_out = false;
};

int run_plan(const PlanArgs& a) {
  adgb::Checkpoint cp = adgb::load_checkpoint(a.checkpoint);
  Material material = adgb::material_from_name(a.material);
  Vector gt = parse_phi(a.gt_phi);
  auto world = make_gt_world(material, gt, a.seed, cp.params.cfg.phi_dims == 2 &&
                                                        material == Material::Rope);

  adgb::PhysicalProperty conditioning = adgb::mean_property(material, cp.params.cfg.phi_dims);
  json adapt_info;
  if (a.phi_mode == "estimated") {
    adgb::AdaptConfig acfg;
    acfg.interactions = a.interactions;
    acfg.seed = a.seed;
    acfg.select = adgb::SelectConfig::make_default();
    adgb::AdaptSessionResult session = adgb::run_adaptation(*world, cp.params, acfg);
    conditioning.phi = session.final_phi();
    adapt_info["phi_hat"] = std::vector<double>(conditioning.phi.data(),
                                                conditioning.phi.data() + conditioning.phi.size());
  } else if (a.phi_mode != "mean") {
    throw adgb::ConfigError("plan: --phi-mode must be estimated or mean");
  }

  adgb::Target target = a.target.empty() ? default_target(*world, a.seed)
                                          : adgb::Target::from_json(read_json_file(a.target));
  if (target.material != material) throw adgb::ConfigError("plan: target material mismatch");

  adgb::PlanConfig cfg = adgb::PlanConfig::make_default(material);
  cfg.max_steps = a.max_steps;
  cfg.mppi.samples = a.mppi_samples;
  cfg.mppi.iterations = a.mppi_iters;
  cfg.seed = a.seed;

  adgb::PlanResult result = adgb::mpc_loop(*world, cp.params, conditioning, target, cfg);
  json j = result.to_json(a.trajectories);
  j["phi_mode"] = a.phi_mode;
  j["seed"] = a.seed;
  j["gt_phi"] = std::vector<double>(gt.data(), gt.data() + gt.size());
  if (!adapt_info.empty()) j["adaptation"] = adapt_info;
  j["target"] = target.to_json();
  write_json_file(a.out, j);
  emit_status(a.json_out, {{"result", a.out},
                           {"success", result.success},
                           {"steps", result.steps.size()}});
  return kExitOk;
}

struct EvalArgs {
  std::string checkpoint, testset, out;
  std::string phi_mode = "ground_truth";
  std::string estimates;  // JSON array of phi vectors, for estimated mode
  std::string split = "all";
  int kstep = 3;
  bool json_out = false;
};

int run_eval(const EvalArgs& a) {
  adgb::Checkpoint cp = adgb::load_checkpoint(a.checkpoint);
  std::vector<Episode> episodes = adgb::read_dataset(a.testset);
  if (a.split == "val") {
    if (!cp.meta.contains("metrics"))
      throw adgb::ConfigError("eval: checkpoint carries no validation metadata");
    // the metrics file next to the checkpoint lists the validation episodes
    json metrics = read_json_file(a.checkpoint + ".metrics.json");
    std::vector<Episode> val;
    for (const auto& idx : metrics.at("val_episodes"))
      val.push_back(episodes.at(idx.get<std::size_t>()));
    episodes = std::move(val);
  } else if (a.split != "all") {
    throw adgb::ConfigError("eval: --split must be all or val");
  }

  adgb::PhiMode mode = adgb::phi_mode_from_name(a.phi_mode);
  std::vector<Vector> estimates;
  if (mode == adgb::PhiMode::Estimated) {
    if (a.estimates.empty()) throw adgb::ConfigError("eval: estimated mode needs --estimates");
    json ej = read_json_file(a.estimates);
    for (const auto& row : ej) {
      Vector v(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) v[i] = row[i].get<double>();
      estimates.push_back(v);
    }
  }
  adgb::EvalMetrics metrics =
      adgb::evaluate(cp.params, episodes, mode, a.kstep,
                     mode == adgb::PhiMode::Estimated ? &estimates : nullptr);
  json j = metrics.to_json();
  j["phi_mode"] = a.phi_mode;
  j["testset"] = a.testset;
  j["split"] = a.split;
  write_json_file(a.out, j);
  emit_status(a.json_out, {{"metrics", a.out},
                           {"one_step_mse", metrics.one_step_mse},
                           {"kstep_mse", metrics.kstep_mse}});
  return kExitOk;
}

struct PlotArgs {
  std::string input, out;
  std::string what = "auto";
  bool json_out = false;
};

int run_plot(const PlotArgs& a) {
  json j = read_json_file(a.input);
  if (j.is_array()) {
    std::vector<json> results(j.begin(), j.end());
    plot_plan_results(results, a.out, a.what);
  } else {
    std::string kind = j.value("kind", "");
    if (kind == "adapt_session") {
      plot_adapt_session(j, a.out, a.what);
    } else if (kind == "plan_result") {
      plot_plan_results({j}, a.out, a.what);
    } else if (kind == "plan_results") {
      std::vector<json> results(j.at("results").begin(), j.at("results").end());
      plot_plan_results(results, a.out, a.what);
    } else {
      throw adgb::ConfigError("plot: unrecognized input kind '" + kind + "'");
    }
  }
  emit_status(a.json_out, {{"svg", a.out}});
  return kExitOk;
}

struct GenTargetArgs {
  std::string material = "rope", out;
  std::uint64_t seed = 0;
  std::string gt_phi = "0.5";
  bool json_out = false;
};

int run_gen_target(const GenTargetArgs& a) {
  Material material = adgb::material_from_name(a.material);
  Vector gt = parse_phi(a.gt_phi);
  auto world = make_gt_world(material, gt, a.seed, false);
  adgb::Target t = default_target(*world, a.seed);
  write_json_file(a.out, t.to_json());
  emit_status(a.json_out, {{"target", a.out}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adgb: property-conditioned graph neural dynamics at desk scale"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file (keys mirror the long options)");
  app.allow_config_extras(false);

  GenDataArgs gd;
  auto* cmd_gd = app.add_subcommand("gen-data", "generate a simulated episode dataset");
  cmd_gd->add_option("--out", gd.out, "output JSONL path")->required();
  cmd_gd->add_option("--material", gd.material, "rigid_box | rope | granular");
  cmd_gd->add_option("--episodes", gd.episodes);
  cmd_gd->add_option("--interactions", gd.interactions);
  cmd_gd->add_option("--seed", gd.seed);
  cmd_gd->add_option("--push-min", gd.push_min);
  cmd_gd->add_option("--push-max", gd.push_max);
  cmd_gd->add_option("--frame-travel", gd.frame_travel);
  cmd_gd->add_flag("--two-property", gd.two_property, "rope: randomize stiffness and friction");
  cmd_gd->add_flag("--json", gd.json_out);

  TrainArgs tr;
  auto* cmd_tr = app.add_subcommand("train", "train the conditioned dynamics model");
  cmd_tr->add_option("--data", tr.data)->required();
  cmd_tr->add_option("--out", tr.out, "checkpoint path")->required();
  cmd_tr->add_option("--epochs", tr.epochs);
  cmd_tr->add_option("--batch", tr.batch);
  cmd_tr->add_option("--k", tr.k, "supervision rollout steps");
  cmd_tr->add_option("--hidden", tr.hidden);
  cmd_tr->add_option("--rounds", tr.rounds, "message passing steps");
  cmd_tr->add_option("--lr", tr.lr);
  cmd_tr->add_option("--val-fraction", tr.val_fraction);
  cmd_tr->add_option("--seed", tr.seed);
  cmd_tr->add_flag("--no-phi,!--phi", tr.condition_on_phi, "disable property conditioning");
  cmd_tr->add_flag("--unified", tr.unified, "combined-material training, no material one-hot");
  cmd_tr->add_option("--d-obj", tr.d_obj);
  cmd_tr->add_option("--d-robot", tr.d_robot);
  cmd_tr->add_flag("--json", tr.json_out);

  AdaptArgs ad;
  auto* cmd_ad = app.add_subcommand("adapt", "few-shot property estimation session");
  cmd_ad->add_option("--checkpoint", ad.checkpoint)->required();
  cmd_ad->add_option("--material", ad.material);
  cmd_ad->add_option("--gt-phi", ad.gt_phi, "ground-truth property, comma separated")->required();
  cmd_ad->add_option("--out", ad.out)->required();
  cmd_ad->add_option("--interactions", ad.interactions);
  cmd_ad->add_option("--selection", ad.selection, "curiosity | uncertainty");
  cmd_ad->add_option("--baseline", ad.baseline, "none | simulator");
  cmd_ad->add_option("--seed", ad.seed);
  cmd_ad->add_option("--noise-sigma", ad.noise_sigma, "observation noise, meters");
  cmd_ad->add_flag("--belief", ad.belief, "log the belief density per interaction");
  cmd_ad->add_option("--bo-evals", ad.bo_evals);
  cmd_ad->add_option("--cma-evals", ad.cma_evals);
  cmd_ad->add_option("--mppi-samples", ad.mppi_samples);
  cmd_ad->add_option("--mppi-iters", ad.mppi_iters);
  cmd_ad->add_flag("--json", ad.json_out);

  PlanArgs pl;
  auto* cmd_pl = app.add_subcommand("plan", "closed-loop MPC run in the ground-truth world");
  cmd_pl->add_option("--checkpoint", pl.checkpoint)->required();
  cmd_pl->add_option("--material", pl.material);
  cmd_pl->add_option("--gt-phi", pl.gt_phi)->required();
  cmd_pl->add_option("--target", pl.target, "target JSON (default: generated from the seed)");
  cmd_pl->add_option("--out", pl.out)->required();
  cmd_pl->add_option("--phi-mode", pl.phi_mode, "estimated | mean");
  cmd_pl->add_option("--seed", pl.seed);
  cmd_pl->add_option("--max-steps", pl.max_steps);
  cmd_pl->add_option("--interactions", pl.interactions, "adaptation interactions (estimated mode)");
  cmd_pl->add_option("--mppi-samples", pl.mppi_samples);
  cmd_pl->add_option("--mppi-iters", pl.mppi_iters);
  cmd_pl->add_flag("--trajectories", pl.trajectories, "embed full trajectories in the result");
  cmd_pl->add_flag("--json", pl.json_out);

  EvalArgs ev;
  auto* cmd_ev = app.add_subcommand("eval", "prediction metrics on a test set");
  cmd_ev->add_option("--checkpoint", ev.checkpoint)->required();
  cmd_ev->add_option("--testset", ev.testset)->required();
  cmd_ev->add_option("--out", ev.out)->required();
  cmd_ev->add_option("--phi-mode", ev.phi_mode, "ground_truth | mean | estimated");
  cmd_ev->add_option("--estimates", ev.estimates, "JSON array of phi vectors (estimated mode)");
  cmd_ev->add_option("--split", ev.split, "all | val");
  cmd_ev->add_option("--kstep", ev.kstep);
  cmd_ev->add_flag("--json", ev.json_out);

  PlotArgs po;
  auto* cmd_po = app.add_subcommand("plot", "emit an SVG plot from a session or plan result");
  cmd_po->add_option("--input", po.input)->required();
  cmd_po->add_option("--out", po.out)->required();
  cmd_po->add_option("--what", po.what,
                     "auto | trajectory | cost | landscape | error | success");
  cmd_po->add_flag("--json", po.json_out);

  GenTargetArgs gt;
  auto* cmd_gt = app.add_subcommand("gen-target", "write a default task target JSON");
  cmd_gt->add_option("--material", gt.material);
  cmd_gt->add_option("--out", gt.out)->required();
  cmd_gt->add_option("--seed", gt.seed);
  cmd_gt->add_option("--gt-phi", gt.gt_phi);
  cmd_gt->add_flag("--json", gt.json_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cmd_gd->parsed()) return run_gen_data(gd);
    if (cmd_tr->parsed()) return run_train(tr);
    if (cmd_ad->parsed()) return run_adapt(ad);
    if (cmd_pl->parsed()) return run_plan(pl);
    if (cmd_ev->parsed()) return run_eval(ev);
    if (cmd_po->parsed()) return run_plot(po);
    if (cmd_gt->parsed()) return run_gen_target(gt);
  } catch (const adgb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const adgb::ShapeError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const adgb::IoError& e) {
    std::cerr << "io error: " << e.what() << std::endl;
    return kExitIo;
  } catch (const adgb::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << std::endl;
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitNumeric;
  }
  return kExitConfig;
}
