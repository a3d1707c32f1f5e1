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

#include "adgb/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace adgb {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

json model_config_to_json(const ModelConfig& cfg) {
  json j;
  j["hidden"] = cfg.hidden;
  j["rounds"] = cfg.rounds;
  j["edge_state_in_prop"] = cfg.edge_state_in_prop;
  j["residual_vertex"] = cfg.residual_vertex;
  j["material"] = material_name(cfg.material);
  j["unified"] = cfg.unified;
  j["phi_dims"] = cfg.phi_dims;
  j["graph"] = {{"d_obj", cfg.graph.d_obj},
                {"d_robot", cfg.graph.d_robot},
                {"pos_scale", cfg.graph.pos_scale},
                {"include_phi", cfg.graph.include_phi},
                {"include_material", cfg.graph.include_material}};
  return j;
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.hidden = j.at("hidden").get<int>();
  cfg.rounds = j.at("rounds").get<int>();
  cfg.edge_state_in_prop = j.at("edge_state_in_prop").get<bool>();
  cfg.residual_vertex = j.at("residual_vertex").get<bool>();
  cfg.material = material_from_name(j.at("material").get<std::string>());
  cfg.unified = j.at("unified").get<bool>();
  cfg.phi_dims = j.at("phi_dims").get<int>();
  const auto& g = j.at("graph");
  cfg.graph.d_obj = g.at("d_obj").get<double>();
  cfg.graph.d_robot = g.at("d_robot").get<double>();
  cfg.graph.pos_scale = g.at("pos_scale").get<double>();
  cfg.graph.include_phi = g.at("include_phi").get<bool>();
  cfg.graph.include_material = g.at("include_material").get<bool>();
  return cfg;
}

void save_checkpoint(const std::string& path, const ModelParams& params, const json& extra_meta) {
  params.validate();
  json meta = extra_meta;
  meta["schema_version"] = kSchemaVersion;
  meta["arch"] = model_config_to_json(params.cfg);
  meta["param_count"] = params.param_count();

  std::string meta_str = meta.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_checkpoint: cannot open " + path);
  out.write("ADGB", 4);
  std::uint32_t version = kCheckpointVersion;
  std::uint32_t len = static_cast<std::uint32_t>(meta_str.size());
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  for (const Matrix* t : params.tensors())
    out.write(reinterpret_cast<const char*>(t->data()),
              static_cast<std::streamsize>(sizeof(double) * t->size()));
  if (!out) throw IoError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "ADGB", 4) != 0)
    throw IoError("load_checkpoint: " + path + " is not a checkpoint (bad magic)");
  std::uint32_t version = 0, len = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&len), 4);
  if (!in || version != kCheckpointVersion)
    throw IoError("load_checkpoint: unsupported version " + std::to_string(version));
  std::string meta_str(len, '\0');
  in.read(meta_str.data(), len);
  if (!in) throw IoError("load_checkpoint: truncated metadata");
  json meta = json::parse(meta_str, nullptr, false);
  if (meta.is_discarded()) throw IoError("load_checkpoint: malformed metadata");

  Checkpoint cp;
  cp.meta = meta;
  ModelConfig cfg = model_config_from_json(meta.at("arch"));
  cp.params = ModelParams::make(cfg, 0);
  for (Matrix* t : cp.params.tensors()) {
    in.read(reinterpret_cast<char*>(t->data()),
            static_cast<std::streamsize>(sizeof(double) * t->size()));
    if (!in) throw IoError("load_checkpoint: truncated parameter block");
  }
  char extra;
  if (in.read(&extra, 1)) throw IoError("load_checkpoint: trailing bytes after parameters");
  cp.params.validate();
  return cp;
}

}  // namespace adgb
