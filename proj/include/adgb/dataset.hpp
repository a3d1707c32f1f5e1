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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "adgb/sim.hpp"

namespace adgb {

struct DatasetConfig {
  EpisodeConfig episode;
  int episodes = 200;
  std::uint64_t seed = 0;
};

// JSON-lines dataset: one episode per line, floats printed with 9
// significant digits. A manifest (path + ".manifest.json") records the seed
// and a hash of the canonical config.
void write_dataset(const std::string& path, const DatasetConfig& cfg);
std::vector<Episode> read_dataset(const std::string& path);

std::string episode_to_jsonl(const Episode& ep);
Episode episode_from_json(const nlohmann::json& j);

nlohmann::json dataset_config_to_json(const DatasetConfig& cfg);
DatasetConfig dataset_config_from_json(const nlohmann::json& j);

// FNV-1a over the canonical (sorted-key) JSON dump.
std::uint64_t fnv1a_hash(const std::string& text);

// Shortest fixed formatting used across artifact files: %.9g.
std::string fmt9(double v);

}  // namespace adgb
