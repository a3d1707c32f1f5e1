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

#include "adgb/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "adgb/parallel.hpp"

namespace adgb {

using nlohmann::json;

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

void append_matrix(std::string& out, const Matrix& m) {
  out += '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ',';
    out += '[';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += fmt9(m(i, j));
    }
    out += ']';
  }
  out += ']';
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.size(), j.empty() ? 0 : j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i)
    for (std::size_t c = 0; c < j[i].size(); ++c) m(i, c) = j[i][c].get<double>();
  return m;
}

}  // namespace

std::string episode_to_jsonl(const Episode& ep) {
  std::string out = "{\"schema_version\":" + std::to_string(kSchemaVersion);
  out += ",\"material\":\"";
  out += material_name(ep.material);
  out += "\",\"phi\":[";
  for (int i = 0; i < ep.phi.phi.size(); ++i) {
    if (i) out += ',';
    out += fmt9(ep.phi.phi[i]);
  }
  out += "],\"geometry\":{";
  const WorldGeometry& g = ep.geometry;
  switch (ep.material) {
    case Material::RigidBox:
      out += "\"length\":" + fmt9(g.box_length) + ",\"width\":" + fmt9(g.box_width) +
             ",\"center\":[" + fmt9(g.box_center.x()) + "," + fmt9(g.box_center.y()) +
             "],\"theta\":" + fmt9(g.box_theta) +
             ",\"particle_seed\":" + std::to_string(g.particle_seed);
      break;
    case Material::Rope:
      out += "\"nodes\":" + std::to_string(g.rope_nodes) + ",\"seg\":" + fmt9(g.rope_seg) +
             ",\"points\":";
      append_matrix(out, g.rope_points);
      break;
    case Material::Granular:
      out += "\"count\":" + std::to_string(g.grain_count) + ",\"centers\":";
      append_matrix(out, g.grain_centers);
      break;
  }
  out += "},\"interactions\":[";
  for (std::size_t i = 0; i < ep.interactions.size(); ++i) {
    const InteractionData& r = ep.interactions[i];
    if (i) out += ',';
    out += "{\"action\":{\"start\":[" + fmt9(r.action.start.x()) + "," + fmt9(r.action.start.y()) +
           "],\"dir\":[" + fmt9(r.action.direction.x()) + "," + fmt9(r.action.direction.y()) +
           "],\"length\":" + fmt9(r.action.length) + "},\"object_traj\":[";
    for (std::size_t f = 0; f < r.object_frames.size(); ++f) {
      if (f) out += ',';
      append_matrix(out, r.object_frames[f]);
    }
    out += "],\"eef_traj\":[";
    for (std::size_t f = 0; f < r.eef_frames.size(); ++f) {
      if (f) out += ',';
      append_matrix(out, r.eef_frames[f]);
    }
    out += "]}";
  }
  out += "]}";
  return out;
}

Episode episode_from_json(const json& j) {
  Episode ep;
  ep.material = material_from_name(j.at("material").get<std::string>());
  const auto& phi = j.at("phi");
  ep.phi.material = ep.material;
  ep.phi.phi = Vector(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) ep.phi.phi[i] = phi[i].get<double>();

  const auto& g = j.at("geometry");
  switch (ep.material) {
    case Material::RigidBox:
      ep.geometry.box_length = g.at("length").get<double>();
      ep.geometry.box_width = g.at("width").get<double>();
      ep.geometry.box_center = {g.at("center")[0].get<double>(), g.at("center")[1].get<double>()};
      ep.geometry.box_theta = g.at("theta").get<double>();
      ep.geometry.particle_seed = g.at("particle_seed").get<std::uint64_t>();
      break;
    case Material::Rope:
      ep.geometry.rope_nodes = g.at("nodes").get<int>();
      ep.geometry.rope_seg = g.at("seg").get<double>();
      ep.geometry.rope_points = matrix_from_json(g.at("points"));
      break;
    case Material::Granular:
      ep.geometry.grain_count = g.at("count").get<int>();
      ep.geometry.grain_centers = matrix_from_json(g.at("centers"));
      break;
  }
  for (const auto& ji : j.at("interactions")) {
    InteractionData r;
    r.action.start = {ji.at("action").at("start")[0].get<double>(),
                      ji.at("action").at("start")[1].get<double>()};
    r.action.direction = {ji.at("action").at("dir")[0].get<double>(),
                          ji.at("action").at("dir")[1].get<double>()};
    r.action.length = ji.at("action").at("length").get<double>();
    for (const auto& f : ji.at("object_traj")) r.object_frames.push_back(matrix_from_json(f));
    for (const auto& f : ji.at("eef_traj")) r.eef_frames.push_back(matrix_from_json(f));
    ep.interactions.push_back(std::move(r));
  }
  return ep;
}

json dataset_config_to_json(const DatasetConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["material"] = material_name(cfg.episode.material);
  j["episodes"] = cfg.episodes;
  j["interactions"] = cfg.episode.interactions;
  j["frame_travel"] = cfg.episode.frame_travel;
  j["push_min"] = cfg.episode.push_min;
  j["push_max"] = cfg.episode.push_max;
  j["two_property"] = cfg.episode.two_property;
  j["workspace"] = {cfg.episode.workspace.xmin, cfg.episode.workspace.ymin,
                    cfg.episode.workspace.xmax, cfg.episode.workspace.ymax};
  j["seed"] = cfg.seed;
  return j;
}

DatasetConfig dataset_config_from_json(const json& j) {
  DatasetConfig cfg;
  cfg.episode.material = material_from_name(j.at("material").get<std::string>());
  cfg.episodes = j.at("episodes").get<int>();
  cfg.episode.interactions = j.at("interactions").get<int>();
  if (j.contains("frame_travel")) cfg.episode.frame_travel = j["frame_travel"].get<double>();
  if (j.contains("push_min")) cfg.episode.push_min = j["push_min"].get<double>();
  if (j.contains("push_max")) cfg.episode.push_max = j["push_max"].get<double>();
  if (j.contains("two_property")) cfg.episode.two_property = j["two_property"].get<bool>();
  if (j.contains("workspace")) {
    const auto& w = j["workspace"];
    cfg.episode.workspace = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>(),
                             w[3].get<double>()};
  }
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

void write_dataset(const std::string& path, const DatasetConfig& cfg) {
  if (cfg.episodes < 1) throw ConfigError("write_dataset: need at least one episode");
  std::vector<std::string> lines(cfg.episodes);
  parallel_for(cfg.episodes, [&](int i) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    Episode ep = sample_episode(cfg.episode, rng);
    lines[i] = episode_to_jsonl(ep);
  });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_dataset: cannot open " + path);
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw IoError("write_dataset: write failed for " + path);
  out.close();

  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["seed"] = cfg.seed;
  manifest["config"] = dataset_config_to_json(cfg);
  manifest["config_hash"] = fnv1a_hash(manifest["config"].dump());
  manifest["episodes"] = cfg.episodes;
  std::ofstream mout(path + ".manifest.json", std::ios::binary);
  if (!mout) throw IoError("write_dataset: cannot open manifest for " + path);
  mout << manifest.dump(2) << '\n';
}

std::vector<Episode> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_dataset: cannot open " + path);
  std::vector<Episode> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw IoError("read_dataset: malformed JSON line in " + path);
    out.push_back(episode_from_json(j));
  }
  if (out.empty()) throw IoError("read_dataset: no episodes in " + path);
  return out;
}

}  // namespace adgb
