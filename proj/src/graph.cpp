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

#include "adgb/graph.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace adgb {

Material material_from_name(const std::string& name) {
  if (name == "rigid_box" || name == "box") return Material::RigidBox;
  if (name == "rope") return Material::Rope;
  if (name == "granular") return Material::Granular;
  throw ConfigError("unknown material '" + name + "'");
}

void ParticleState::validate() const {
  if (object.rows() < 1 || eef.rows() < 1)
    throw ShapeError("ParticleState: need at least one object and one end-effector particle");
  if (object.cols() != kDim || eef.cols() != kDim)
    throw ShapeError("ParticleState: positions must be n x " + std::to_string(kDim));
  require_finite(object, "ParticleState.object");
  require_finite(eef, "ParticleState.eef");
}

PhysicalProperty PhysicalProperty::box(double cx, double cy) {
  PhysicalProperty p;
  p.material = Material::RigidBox;
  p.phi = Vector(2);
  p.phi << cx, cy;
  return p;
}

PhysicalProperty PhysicalProperty::rope(double stiffness) {
  PhysicalProperty p;
  p.material = Material::Rope;
  p.phi = Vector(1);
  p.phi << stiffness;
  return p;
}

PhysicalProperty PhysicalProperty::rope2(double stiffness, double friction) {
  PhysicalProperty p;
  p.material = Material::Rope;
  p.phi = Vector(2);
  p.phi << stiffness, friction;
  return p;
}

PhysicalProperty PhysicalProperty::granular(double grain) {
  PhysicalProperty p;
  p.material = Material::Granular;
  p.phi = Vector(1);
  p.phi << grain;
  return p;
}

PropertyRange training_range(Material m, int dims) {
  PropertyRange r;
  r.lo = Vector(dims);
  r.hi = Vector(dims);
  if (m == Material::RigidBox) {
    if (dims != 2) throw ConfigError("rigid box property is 2-dimensional");
    r.lo.setConstant(-0.5);
    r.hi.setConstant(0.5);
  } else {
    if (dims < 1 || dims > 2) throw ConfigError("property dimension must be 1 or 2");
    r.lo.setConstant(0.0);
    r.hi.setConstant(1.0);
  }
  return r;
}

PropertyRange extended_range(Material m, int dims, double ext) {
  PropertyRange r = training_range(m, dims);
  Vector span = r.hi - r.lo;
  r.lo -= ext * span;
  r.hi += ext * span;
  return r;
}

PhysicalProperty mean_property(Material m, int dims) {
  PropertyRange r = training_range(m, dims);
  PhysicalProperty p;
  p.material = m;
  p.phi = 0.5 * (r.lo + r.hi);
  return p;
}

void PhysicalProperty::validate(bool training) const {
  int dims = static_cast<int>(phi.size());
  PropertyRange r = training ? training_range(material, dims) : extended_range(material, dims);
  for (int i = 0; i < dims; ++i) {
    // training range is open; the extended adaptation range includes its
    // endpoints (optimizer grids evaluate them)
    bool ok = training ? (phi[i] > r.lo[i] && phi[i] < r.hi[i])
                       : (phi[i] >= r.lo[i] - 1e-12 && phi[i] <= r.hi[i] + 1e-12);
    if (!ok)
      throw ConfigError("property component " + std::to_string(i) + " = " + std::to_string(phi[i]) +
                        " outside " + (training ? std::string("training") : std::string("extended")) +
                        " range (" + std::to_string(r.lo[i]) + ", " + std::to_string(r.hi[i]) + ")");
  }
}

std::vector<int> farthest_point_sample(const Matrix& points, int k, std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw ConfigError("farthest_point_sample: empty input");
  if (k < 1 || k > n) throw ConfigError("farthest_point_sample: k must be in [1, n]");

  std::vector<int> picked;
  picked.reserve(k);
  int start = static_cast<int>(seed % static_cast<std::uint64_t>(n));
  picked.push_back(start);

  Vector min_d2 = (points.rowwise() - points.row(start)).rowwise().squaredNorm();
  for (int s = 1; s < k; ++s) {
    int best = -1;
    double best_d2 = -1.0;
    for (int i = 0; i < n; ++i) {
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = i;
      }
    }
    picked.push_back(best);
    Vector d2 = (points.rowwise() - points.row(best)).rowwise().squaredNorm();
    min_d2 = min_d2.cwiseMin(d2);
  }
  return picked;
}

std::vector<std::pair<int, int>> build_radius_edges(const Matrix& positions, double d) {
  if (!(d > 0.0)) throw ConfigError("build_radius_edges: threshold must be positive");
  const int n = static_cast<int>(positions.rows());
  const double d2 = d * d;
  std::vector<std::pair<int, int>> edges;
  for (int w = 0; w < n; ++w)
    for (int u = 0; u < n; ++u) {
      if (w == u) continue;
      if ((positions.row(w) - positions.row(u)).squaredNorm() <= d2) edges.emplace_back(w, u);
    }
  return edges;
}

void build_graph_edges(const Matrix& obj_pos, const Matrix& eef_pos, const GraphConfig& cfg,
                       std::vector<int>& receivers, std::vector<int>& senders) {
  if (!(cfg.d_robot > 0.0)) throw ConfigError("build_graph_edges: d_robot must be positive");
  const int n_obj = static_cast<int>(obj_pos.rows());
  const int n_eef = static_cast<int>(eef_pos.rows());
  for (auto [w, u] : build_radius_edges(obj_pos, cfg.d_obj)) {
    receivers.push_back(w);
    senders.push_back(u);
  }
  // Robot->object only: the end-effector is a kinematic input and never
  // receives messages.
  const double dr2 = cfg.d_robot * cfg.d_robot;
  for (int w = 0; w < n_obj; ++w)
    for (int u = 0; u < n_eef; ++u)
      if ((obj_pos.row(w) - eef_pos.row(u)).squaredNorm() <= dr2) {
        receivers.push_back(w);
        senders.push_back(n_obj + u);
      }
}

RowVector vertex_static_block(bool is_object, const PhysicalProperty& prop, const GraphConfig& cfg) {
  RowVector block = RowVector::Zero(kVertexAttrWidth + kPhiWidth + kMaterialWidth);
  block[is_object ? 0 : 1] = 1.0;
  if (is_object) {
    if (cfg.include_phi) {
      for (int i = 0; i < std::min<int>(kPhiWidth, static_cast<int>(prop.phi.size())); ++i)
        block[kVertexAttrWidth + i] = prop.phi[i];
    }
    if (cfg.include_material)
      block[kVertexAttrWidth + kPhiWidth + static_cast<int>(prop.material)] = 1.0;
  }
  return block;
}

DynGraph assemble_graph(const std::vector<ParticleState>& window, const Matrix& eef_next,
                        const PhysicalProperty& prop, const GraphConfig& cfg) {
  if (static_cast<int>(window.size()) != kHistory + 1)
    throw ShapeError("assemble_graph: window must hold " + std::to_string(kHistory + 1) + " states");
  for (const auto& s : window) s.validate();
  const int n_obj = static_cast<int>(window[0].object.rows());
  const int n_eef = static_cast<int>(window[0].eef.rows());
  for (const auto& s : window)
    if (s.object.rows() != n_obj || s.eef.rows() != n_eef)
      throw ShapeError("assemble_graph: particle counts differ across the window");
  if (eef_next.rows() != n_eef || eef_next.cols() != kDim)
    throw ShapeError("assemble_graph: eef_next must match end-effector particle count");
  require_finite(eef_next, "assemble_graph eef_next");

  DynGraph g;
  g.n_obj = n_obj;
  g.n_eef = n_eef;
  g.obj_pos = window.back().object;
  g.eef_pos = window.back().eef;

  const double s = cfg.pos_scale;
  g.vertex_feats.resize(n_obj + n_eef, kVertexFeatWidth);
  RowVector obj_block = vertex_static_block(true, prop, cfg);
  RowVector eef_block = vertex_static_block(false, prop, cfg);
  for (int j = 0; j < kHistory; ++j) {
    // Object: displacements over (t-h .. t). End-effector: shifted one step
    // forward, ending with the commanded move to t+1 (the action).
    Matrix obj_d = (window[j + 1].object - window[j].object) * s;
    const Matrix& eef_new = (j + 2 <= kHistory) ? window[j + 2].eef : eef_next;
    Matrix eef_d = (eef_new - window[j + 1].eef) * s;
    g.vertex_feats.block(0, j * kDim, n_obj, kDim) = obj_d;
    g.vertex_feats.block(n_obj, j * kDim, n_eef, kDim) = eef_d;
  }
  for (int i = 0; i < n_obj; ++i) g.vertex_feats.row(i).tail(obj_block.size()) = obj_block;
  for (int i = 0; i < n_eef; ++i) g.vertex_feats.row(n_obj + i).tail(eef_block.size()) = eef_block;

  build_graph_edges(g.obj_pos, g.eef_pos, cfg, g.receivers, g.senders);

  const int m = g.n_edges();
  g.edge_feats.resize(m, kEdgeFeatWidth);
  Matrix all_pos(n_obj + n_eef, kDim);
  all_pos.topRows(n_obj) = g.obj_pos;
  all_pos.bottomRows(n_eef) = g.eef_pos;
  for (int e = 0; e < m; ++e) {
    g.edge_feats.row(e).head(kDim) = (all_pos.row(g.senders[e]) - all_pos.row(g.receivers[e])) * s;
    bool robot_edge = g.senders[e] >= n_obj;
    g.edge_feats(e, kDim) = robot_edge ? 0.0 : 1.0;
    g.edge_feats(e, kDim + 1) = robot_edge ? 1.0 : 0.0;
  }
  return g;
}

}  // namespace adgb
