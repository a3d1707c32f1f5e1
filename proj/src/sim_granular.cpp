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

#include <cmath>

#include "adgb/sim.hpp"

namespace adgb {

namespace {
constexpr double kSubstep = 1e-3;

// Closest point on segment [a, b] to p.
Vector2 closest_on_segment(const Vector2& p, const Vector2& a, const Vector2& b) {
  Vector2 ab = b - a;
  double len2 = ab.squaredNorm();
  if (len2 < 1e-18) return a;
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}
}  // namespace

double granular_radius(double phi) { return 0.01 + 0.02 * phi; }

GranularWorld::GranularWorld(const GranularConfig& cfg)
    : cfg_(cfg), prop_(PhysicalProperty::granular(cfg.phi)), radius_(granular_radius(cfg.phi)) {
  if (cfg.count < 1) throw ConfigError("GranularWorld: need at least one grain");
  prop_.validate(false);
  if (cfg.initial_centers.rows() == 0) {
    // concentric ring packing around the origin, non-overlapping
    centers_.resize(cfg.count, 2);
    int placed = 0, ring = 0;
    double spacing = 2.05 * radius_;
    while (placed < cfg.count) {
      if (ring == 0) {
        centers_.row(placed++) = Vector2(0, 0);
        ++ring;
        continue;
      }
      int per_ring = std::max(1, static_cast<int>(std::floor(2 * M_PI * ring)));
      for (int k = 0; k < per_ring && placed < cfg.count; ++k) {
        double ang = 2 * M_PI * k / per_ring;
        centers_.row(placed++) = Vector2(ring * spacing * std::cos(ang), ring * spacing * std::sin(ang));
      }
      ++ring;
    }
  } else {
    if (cfg.initial_centers.rows() != cfg.count || cfg.initial_centers.cols() != 2)
      throw ShapeError("GranularWorld: initial_centers must be count x 2");
    centers_ = cfg.initial_centers;
  }
  prev_disp_ = Matrix::Zero(cfg.count, 2);
  for (int i = 0; i < cfg.count; ++i)
    for (int j = i + 1; j < cfg.count; ++j)
      if ((centers_.row(i) - centers_.row(j)).norm() < 2 * radius_ - cfg.contact_tol)
        throw ConfigError("GranularWorld: initial discs overlap");
}

void GranularWorld::set_phi(const Vector& phi) {
  if (phi.size() != 1) throw ConfigError("GranularWorld: property is 1-dimensional");
  prop_ = PhysicalProperty::granular(phi[0]);
  prop_.validate(false);
  cfg_.phi = phi[0];
  radius_ = granular_radius(phi[0]);
}

Matrix GranularWorld::eef_particles_at(const Vector2& center, const Vector2& direction) const {
  // flat pusher: 5 sample points along a segment perpendicular to the motion
  Vector2 lateral(-direction.y(), direction.x());
  Matrix out(5, 2);
  for (int i = 0; i < 5; ++i) {
    double t = (i - 2) / 2.0;  // -1, -0.5, 0, 0.5, 1
    out.row(i) = center + lateral * (t * cfg_.pusher_len / 2);
  }
  return out;
}

void GranularWorld::set_pusher(const Vector2& center, const Vector2& direction) {
  pusher_center_ = center;
  pusher_dir_ = direction.normalized();
}

double GranularWorld::max_overlap() const {
  double worst = 0;
  const int n = cfg_.count;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      worst = std::max(worst, 2 * radius_ - (centers_.row(i) - centers_.row(j)).norm());
  Vector2 lateral(-pusher_dir_.y(), pusher_dir_.x());
  Vector2 a = pusher_center_ - lateral * (cfg_.pusher_len / 2);
  Vector2 b = pusher_center_ + lateral * (cfg_.pusher_len / 2);
  for (int i = 0; i < n; ++i) {
    Vector2 p = centers_.row(i);
    double d = (p - closest_on_segment(p, a, b)).norm();
    worst = std::max(worst, radius_ + cfg_.pusher_halfwidth - d);
  }
  return std::max(0.0, worst);
}

void GranularWorld::project_contacts() {
  const int n = cfg_.count;
  Vector2 lateral(-pusher_dir_.y(), pusher_dir_.x());
  Vector2 a = pusher_center_ - lateral * (cfg_.pusher_len / 2);
  Vector2 b = pusher_center_ + lateral * (cfg_.pusher_len / 2);
  const double reach = radius_ + cfg_.pusher_halfwidth;

  for (int sweep = 0; sweep < 80; ++sweep) {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      Vector2 p = centers_.row(i);
      Vector2 cp = closest_on_segment(p, a, b);
      Vector2 d = p - cp;
      double dist = d.norm();
      if (dist < reach) {
        Vector2 nrm = dist > 1e-12 ? Vector2(d / dist) : Vector2(pusher_dir_);
        centers_.row(i) = cp + nrm * reach;
        worst = std::max(worst, reach - dist);
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vector2 d = centers_.row(j) - centers_.row(i);
        double dist = d.norm();
        double overlap = 2 * radius_ - dist;
        if (overlap > 0) {
          Vector2 nrm = dist > 1e-12 ? Vector2(d / dist) : Vector2(1, 0);
          centers_.row(i) -= (0.5 * overlap) * nrm.transpose();
          centers_.row(j) += (0.5 * overlap) * nrm.transpose();
          worst = std::max(worst, overlap);
        }
      }
    if (worst <= cfg_.contact_tol) return;
  }
  if (max_overlap() > 10 * cfg_.contact_tol)
    throw NumericError("GranularWorld: contact projection failed to converge");
}

void GranularWorld::step_to(const Vector2& target) {
  if ((target - pusher_center_).norm() > 2e-3 + 1e-12)
    throw ConfigError("GranularWorld::step_to: substep displacement exceeds 2 mm");
  Matrix before = centers_;
  // carried-over motion (overdamped flow), then pusher advance and projection
  centers_ += cfg_.carry * prev_disp_;
  pusher_center_ = target;
  project_contacts();
  prev_disp_ = centers_ - before;
  require_finite(centers_, "GranularWorld centers");
}

bool GranularWorld::at_rest() const { return prev_disp_.rowwise().norm().maxCoeff() < 1e-7; }

PushFrames GranularWorld::execute_push(const PushAction& action, double frame_travel) {
  action.validate();
  if (!(frame_travel > 0)) throw ConfigError("execute_push: frame_travel must be positive");
  set_pusher(action.start, action.direction);
  prev_disp_.setZero();
  project_contacts();  // initial placement must not trap overlaps
  PushFrames out;
  out.object.push_back(centers_);
  out.eef.push_back(eef_particles_at(pusher_center_, pusher_dir_));

  double traveled = 0, since_frame = 0;
  while (traveled < action.length - 1e-12) {
    double step = std::min(kSubstep, action.length - traveled);
    step_to(pusher_center_ + pusher_dir_ * step);
    traveled += step;
    since_frame += step;
    if (since_frame >= frame_travel - 1e-12) {
      out.object.push_back(centers_);
      out.eef.push_back(eef_particles_at(pusher_center_, pusher_dir_));
      since_frame = 0;
    }
  }
  if (since_frame > 1e-12) {
    out.object.push_back(centers_);
    out.eef.push_back(eef_particles_at(pusher_center_, pusher_dir_));
  }
  // residual flow dies off geometrically once the pusher stops
  int guard = 0;
  while (!at_rest() && guard++ < 200) step_to(pusher_center_);
  return out;
}

Matrix GranularWorld::save_state() const {
  Matrix s(cfg_.count + 2, 4);
  s.topLeftCorner(cfg_.count, 2) = centers_;
  s.topRightCorner(cfg_.count, 2) = prev_disp_;
  s.row(cfg_.count) << pusher_center_.x(), pusher_center_.y(), 0, 0;
  s.row(cfg_.count + 1) << pusher_dir_.x(), pusher_dir_.y(), 0, 0;
  return s;
}

void GranularWorld::load_state(const Matrix& s) {
  if (s.rows() != cfg_.count + 2 || s.cols() != 4)
    throw ShapeError("GranularWorld::load_state: bad shape");
  centers_ = s.topLeftCorner(cfg_.count, 2);
  prev_disp_ = s.topRightCorner(cfg_.count, 2);
  pusher_center_ = {s(cfg_.count, 0), s(cfg_.count, 1)};
  pusher_dir_ = {s(cfg_.count + 1, 0), s(cfg_.count + 1, 1)};
}

std::unique_ptr<SimWorld> GranularWorld::clone() const {
  return std::make_unique<GranularWorld>(*this);
}

}  // namespace adgb
