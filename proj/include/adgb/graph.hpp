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
#include <utility>
#include <vector>

#include "adgb/types.hpp"

namespace adgb {

// Object and end-effector particle positions at one timestep, meters in the
// workspace frame.
struct ParticleState {
  Matrix object;  // n x D
  Matrix eef;     // m x D
  int step = 0;

  void validate() const;
};

// Material tag plus normalized property vector:
//   rigid box  [c_x, c_y]            each in (-0.5, 0.5)
//   rope       [stiffness] or [stiffness, friction]  in (0, 1)
//   granular   [grain size]          in (0, 1)
// Adaptation-time estimates may exceed the training range by up to
// 0.2 x range per dimension.
struct PhysicalProperty {
  Material material = Material::Rope;
  Vector phi;

  static PhysicalProperty box(double cx, double cy);
  static PhysicalProperty rope(double stiffness);
  static PhysicalProperty rope2(double stiffness, double friction);
  static PhysicalProperty granular(double grain);

  // Throws ConfigError when phi leaves the training range (strict) or the
  // extended adaptation range (otherwise).
  void validate(bool training_range) const;
};

struct PropertyRange {
  Vector lo, hi;
  int dims() const { return static_cast<int>(lo.size()); }
};

PropertyRange training_range(Material m, int dims);
// Training range extended by ext x (hi - lo) on both sides.
PropertyRange extended_range(Material m, int dims, double ext = 0.2);
// Mid-range property used by the no-adaptation baseline.
PhysicalProperty mean_property(Material m, int dims);

// Feature geometry of the dynamics graph. Widths are fixed across materials
// so one architecture serves per-material and unified training.
inline constexpr int kHistory = 3;       // h: displacement steps per vertex
inline constexpr int kPhiWidth = 2;      // property slots (zero padded)
inline constexpr int kMaterialWidth = 3; // material one-hot
inline constexpr int kVertexAttrWidth = 2;
inline constexpr int kEdgeAttrWidth = 2;
inline constexpr int kVertexFeatWidth = kHistory * kDim + kVertexAttrWidth + kPhiWidth + kMaterialWidth;
inline constexpr int kEdgeFeatWidth = kDim + kEdgeAttrWidth;

struct GraphConfig {
  double d_obj = 0.06;        // object-object connectivity radius, meters
  double d_robot = 0.03;      // robot->object connectivity radius, meters
  double pos_scale = 100.0;   // displacement/offset feature scale (1/m)
  bool include_phi = true;    // false: property slots identically zero
  bool include_material = true;  // false: material one-hot identically zero
};

// One prediction step's graph: vertex rows are object particles followed by
// end-effector particles. All position content is relative (history
// displacements on vertices, sender-minus-receiver offsets on edges); no
// absolute coordinate enters any feature.
struct DynGraph {
  Matrix vertex_feats;        // (n_obj + n_eef) x kVertexFeatWidth
  Matrix edge_feats;          // n_edges x kEdgeFeatWidth
  std::vector<int> receivers; // vertex index per edge
  std::vector<int> senders;
  int n_obj = 0;
  int n_eef = 0;
  Matrix obj_pos;             // n_obj x D at time t
  Matrix eef_pos;             // n_eef x D at time t

  int n_vertices() const { return n_obj + n_eef; }
  int n_edges() const { return static_cast<int>(receivers.size()); }
};

// Greedy farthest point sampling over rows of `points`. The start index is
// seed % n; each following pick maximizes the minimum distance to the
// selected set, ties broken by lowest index.
std::vector<int> farthest_point_sample(const Matrix& points, int k, std::uint64_t seed);

// All directed pairs (receiver, sender) with receiver != sender and
// ||x_r - x_s|| <= d, ordered lexicographically.
std::vector<std::pair<int, int>> build_radius_edges(const Matrix& positions, double d);

// Edge lists of the dynamics graph: object-object pairs within d_obj (both
// directions) followed by robot->object edges within d_robot (object
// receives, end-effector sends). Vertex ids: objects first, then eef.
void build_graph_edges(const Matrix& obj_pos, const Matrix& eef_pos, const GraphConfig& cfg,
                       std::vector<int>& receivers, std::vector<int>& senders);

// Builds the graph for predicting the step after `window.back()`.
// `window` holds kHistory + 1 time-aligned states (oldest first).
// `eef_next` is the commanded end-effector position at t+1; end-effector
// vertices carry their history shifted one step forward so the commanded
// motion is visible to the model.
DynGraph assemble_graph(const std::vector<ParticleState>& window, const Matrix& eef_next,
                        const PhysicalProperty& prop, const GraphConfig& cfg);

// Constant per-vertex block [attr one-hot | phi padded | material one-hot]
// for one vertex class; shared by the plain and tape assembly paths.
RowVector vertex_static_block(bool is_object, const PhysicalProperty& prop, const GraphConfig& cfg);

}  // namespace adgb
