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

#include <doctest.h>

#include <algorithm>

#include "adgb/graph.hpp"
#include "adgb/rng.hpp"
#include "oracles.hpp"

using namespace adgb;

namespace {

Matrix random_points(Rng& rng, int n, double scale = 1.0) {
  Matrix m(n, 2);
  for (int i = 0; i < n; ++i) {
    m(i, 0) = rng.uniform(-scale, scale);
    m(i, 1) = rng.uniform(-scale, scale);
  }
  return m;
}

// dyadic rationals: closed under addition/subtraction in double precision
Matrix dyadic_points(Rng& rng, int n, double unit = 1.0 / 1024.0) {
  Matrix m(n, 2);
  for (int i = 0; i < n; ++i) {
    m(i, 0) = static_cast<double>(static_cast<int>(rng.below(2049)) - 1024) * unit;
    m(i, 1) = static_cast<double>(static_cast<int>(rng.below(2049)) - 1024) * unit;
  }
  return m;
}

std::vector<ParticleState> make_window(const Matrix& obj, const Matrix& eef) {
  return std::vector<ParticleState>(kHistory + 1, ParticleState{obj, eef, 0});
}

}  // namespace

TEST_CASE("fps: k = n returns every index") {
  Rng rng(1);
  Matrix pts = random_points(rng, 12);
  auto idx = farthest_point_sample(pts, 12, 5);
  std::sort(idx.begin(), idx.end());
  for (int i = 0; i < 12; ++i) CHECK(idx[i] == i);
}

TEST_CASE("fps: k = 1 returns the seeded start alone") {
  Rng rng(2);
  Matrix pts = random_points(rng, 9);
  auto idx = farthest_point_sample(pts, 1, 4);
  REQUIRE(idx.size() == 1);
  CHECK(idx[0] == 4);  // start index is seed mod n
}

TEST_CASE("fps: collinear 0..10 starting at 0 picks {0, 10, 5}") {
  Matrix pts(11, 2);
  for (int i = 0; i < 11; ++i) pts.row(i) = Vector2(static_cast<double>(i), 0.0);
  auto idx = farthest_point_sample(pts, 3, 0);
  CHECK(idx == std::vector<int>{0, 10, 5});
  CHECK(idx == oracle::fps_bruteforce(pts, 3, 0));
}

TEST_CASE("fps matches the exhaustive oracle on random sets") {
  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 3 + static_cast<int>(rng.below(40));
    int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    std::uint64_t seed = rng.bits();
    Matrix pts = random_points(rng, n);
    auto got = farthest_point_sample(pts, k, seed);
    auto want = oracle::fps_bruteforce(pts, k, static_cast<int>(seed % n));
    CHECK(got == want);
  }
}

TEST_CASE("fps is permutation-covariant") {
  Rng rng(44);
  Matrix pts = random_points(rng, 20);
  int start = 3, k = 6;
  auto base = farthest_point_sample(pts, k, start);

  std::vector<int> perm(20);
  for (int i = 0; i < 20; ++i) perm[i] = i;
  for (int i = 19; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  Matrix permuted(20, 2);
  for (int i = 0; i < 20; ++i) permuted.row(i) = pts.row(perm[i]);
  // inverse: permuted.row(inv[j]) == pts.row(j)
  std::vector<int> inv(20);
  for (int i = 0; i < 20; ++i) inv[perm[i]] = i;

  auto mapped = farthest_point_sample(permuted, k, inv[start]);
  for (int i = 0; i < k; ++i) CHECK(perm[mapped[i]] == base[i]);
}

TEST_CASE("fps rejects bad k and empty input") {
  Matrix pts(3, 2);
  pts.setZero();
  CHECK_THROWS_AS(farthest_point_sample(pts, 4, 0), ConfigError);
  CHECK_THROWS_AS(farthest_point_sample(pts, 0, 0), ConfigError);
  CHECK_THROWS_AS(farthest_point_sample(Matrix(0, 2), 1, 0), ConfigError);
}

TEST_CASE("radius edges: two points at half the threshold connect both ways") {
  Matrix pts(2, 2);
  pts << 0, 0, 0.5, 0;
  auto edges = build_radius_edges(pts, 1.0);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0] == std::make_pair(0, 1));
  CHECK(edges[1] == std::make_pair(1, 0));
}

TEST_CASE("radius edges: two points beyond the threshold stay disconnected") {
  Matrix pts(2, 2);
  pts << 0, 0, 2.0, 0;
  CHECK(build_radius_edges(pts, 1.0).empty());
}

TEST_CASE("radius edges: L-shaped triple has exactly 4 directed edges") {
  Matrix pts(3, 2);
  pts << 0, 0, 1, 0, 0, 1;  // the (1,0)-(0,1) pair is sqrt(2) apart
  auto edges = build_radius_edges(pts, 1.0);
  auto want = oracle::edges_bruteforce(pts, 1.0);
  CHECK(edges.size() == 4);
  CHECK(edges == want);
}

TEST_CASE("radius edges equal the brute-force oracle on random instances up to n = 200") {
  Rng rng(55);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng.below(199));
    Matrix pts = random_points(rng, n);
    double d = rng.uniform(0.1, 1.2);
    CHECK(build_radius_edges(pts, d) == oracle::edges_bruteforce(pts, d));
  }
  CHECK_THROWS_AS(build_radius_edges(Matrix(2, 2), 0.0), ConfigError);
}

TEST_CASE("assemble_graph: feature layout and translation invariance") {
  Rng rng(66);
  GraphConfig cfg;
  cfg.d_obj = 0.8;
  cfg.d_robot = 0.6;

  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(rng.below(8));
    std::vector<ParticleState> window;
    Matrix obj = dyadic_points(rng, n);
    Matrix eef = dyadic_points(rng, 1);
    for (int t = 0; t <= kHistory; ++t) {
      window.push_back({obj, eef, t});
      obj = obj + dyadic_points(rng, n, 1.0 / 4096.0);
      eef = eef + dyadic_points(rng, 1, 1.0 / 4096.0);
    }
    window.resize(kHistory + 1);
    Matrix eef_next = window.back().eef + dyadic_points(rng, 1, 1.0 / 4096.0);
    PhysicalProperty prop = PhysicalProperty::rope(0.3);
    DynGraph g = assemble_graph(window, eef_next, prop, cfg);

    // dyadic translation: features must be identical bit for bit
    Vector2 shift{5.0 + 1.0 / 256.0, -3.0 + 1.0 / 512.0};
    std::vector<ParticleState> shifted = window;
    for (auto& s : shifted) {
      s.object.rowwise() += shift.transpose();
      s.eef.rowwise() += shift.transpose();
    }
    Matrix eef_next_shifted = eef_next.rowwise() + shift.transpose();
    DynGraph g2 = assemble_graph(shifted, eef_next_shifted, prop, cfg);
    CHECK((g.vertex_feats.array() == g2.vertex_feats.array()).all());
    CHECK(g.receivers == g2.receivers);
    CHECK(g.senders == g2.senders);
    if (g.n_edges() > 0) CHECK((g.edge_feats.array() == g2.edge_feats.array()).all());
  }
}

TEST_CASE("assemble_graph: arbitrary real translation changes features by < 1e-12") {
  Rng rng(67);
  GraphConfig cfg;
  cfg.d_obj = 0.8;
  cfg.d_robot = 0.6;
  std::vector<ParticleState> window;
  Matrix obj = random_points(rng, 5, 0.3);
  Matrix eef = random_points(rng, 1, 0.3);
  for (int t = 0; t <= kHistory; ++t) {
    window.push_back({obj, eef, t});
    obj = obj + random_points(rng, 5, 0.004);
    eef = eef + random_points(rng, 1, 0.004);
  }
  window.resize(kHistory + 1);
  Matrix eef_next = window.back().eef;
  PhysicalProperty prop = PhysicalProperty::granular(0.7);
  DynGraph g = assemble_graph(window, eef_next, prop, cfg);

  Vector2 shift{0.1234567, -0.7654321};
  for (auto& s : window) {
    s.object.rowwise() += shift.transpose();
    s.eef.rowwise() += shift.transpose();
  }
  DynGraph g2 = assemble_graph(window, Matrix(eef_next.rowwise() + shift.transpose()), prop, cfg);
  CHECK((g.vertex_feats - g2.vertex_feats).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assemble_graph: zero-motion window has all-zero displacement features") {
  Matrix obj(3, 2);
  obj << 0, 0, 0.02, 0, 0, 0.02;
  Matrix eef(1, 2);
  eef << 0.1, 0.1;
  GraphConfig cfg;
  DynGraph g = assemble_graph(make_window(obj, eef), eef, PhysicalProperty::rope(0.5), cfg);
  CHECK(g.vertex_feats.leftCols(kHistory * kDim).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assemble_graph: robot edge only to the particle within reach") {
  Matrix obj(3, 2);
  obj << 0, 0, 0.2, 0, 0.4, 0;
  Matrix eef(1, 2);
  eef << -0.02, 0;  // within d_robot of particle 0 only
  GraphConfig cfg;
  cfg.d_obj = 0.25;
  cfg.d_robot = 0.03;
  DynGraph g = assemble_graph(make_window(obj, eef), eef, PhysicalProperty::rope(0.5), cfg);
  int robot_edges = 0;
  for (int e = 0; e < g.n_edges(); ++e)
    if (g.senders[e] >= g.n_obj) {
      ++robot_edges;
      CHECK(g.receivers[e] == 0);
      CHECK(g.edge_feats(e, kDim + 1) == 1.0);
    }
  CHECK(robot_edges == 1);
  // robot vertices never receive
  for (int e = 0; e < g.n_edges(); ++e) CHECK(g.receivers[e] < g.n_obj);
}

TEST_CASE("assemble_graph: property and material slots") {
  Matrix obj(2, 2);
  obj << 0, 0, 0.01, 0;
  Matrix eef(1, 2);
  eef << 1, 1;
  GraphConfig cfg;

  PhysicalProperty prop = PhysicalProperty::box(0.25, -0.1);
  DynGraph g = assemble_graph(make_window(obj, eef), eef, prop, cfg);
  int base = kHistory * kDim;
  CHECK(g.vertex_feats(0, base + 0) == 1.0);  // object attr
  CHECK(g.vertex_feats(0, base + 2) == 0.25);
  CHECK(g.vertex_feats(0, base + 3) == -0.1);
  CHECK(g.vertex_feats(0, base + 4) == 1.0);  // rigid box one-hot
  CHECK(g.vertex_feats(2, base + 1) == 1.0);  // eef attr
  CHECK(g.vertex_feats(2, base + 2) == 0.0);  // eef carries no property

  cfg.include_phi = false;
  DynGraph g2 = assemble_graph(make_window(obj, eef), eef, prop, cfg);
  CHECK(g2.vertex_feats(0, base + 2) == 0.0);
  CHECK(g2.vertex_feats(0, base + 3) == 0.0);

  cfg.include_material = false;
  DynGraph g3 = assemble_graph(make_window(obj, eef), eef, prop, cfg);
  CHECK(g3.vertex_feats(0, base + 4) == 0.0);
}

TEST_CASE("assemble_graph rejects inconsistent particle counts") {
  Matrix obj(2, 2), obj2(3, 2), eef(1, 2);
  obj.setZero();
  obj2.setZero();
  eef.setOnes();
  std::vector<ParticleState> window = {{obj, eef, 0}, {obj, eef, 1}, {obj2, eef, 2}, {obj, eef, 3}};
  CHECK_THROWS_AS(assemble_graph(window, eef, PhysicalProperty::rope(0.5), GraphConfig{}),
                  ShapeError);
}

TEST_CASE("property ranges and validation") {
  CHECK_NOTHROW(PhysicalProperty::rope(0.5).validate(true));
  CHECK_THROWS_AS(PhysicalProperty::rope(1.1).validate(true), ConfigError);
  CHECK_NOTHROW(PhysicalProperty::rope(1.1).validate(false));
  CHECK_THROWS_AS(PhysicalProperty::rope(1.3).validate(false), ConfigError);
  CHECK_NOTHROW(PhysicalProperty::box(0.45, -0.45).validate(true));
  CHECK_THROWS_AS(PhysicalProperty::box(0.6, 0).validate(true), ConfigError);

  PropertyRange ext = extended_range(Material::Rope, 1);
  CHECK(ext.lo[0] == doctest::Approx(-0.2));
  CHECK(ext.hi[0] == doctest::Approx(1.2));
  PropertyRange extb = extended_range(Material::RigidBox, 2);
  CHECK(extb.lo[0] == doctest::Approx(-0.7));
  CHECK(extb.hi[1] == doctest::Approx(0.7));
}
