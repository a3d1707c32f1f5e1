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

#include <string>

#include <json.hpp>

#include "adgb/model.hpp"

namespace adgb {

// Self-describing binary checkpoint:
//   magic "ADGB" | u32 version | u32 metadata length | metadata JSON |
//   little-endian f64 parameter block in ModelParams::tensors() order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelParams params;
  nlohmann::json meta;
};

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const nlohmann::json& extra_meta);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace adgb
