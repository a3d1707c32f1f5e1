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

#include <algorithm>
#include <cmath>

#include "adgb/sim.hpp"

namespace adgb {

namespace {
constexpr double kMaxSubstep = 2e-3;
constexpr double kSubstep = 1e-3;

double cross2(const Vector2& a, const Vector2& b) { return a.x() * b.y() - a.y() * b.x(); }
Vector2 perp(const Vector2& v) { return {-v.y(), v.x()}; }
}  // namespace

void PushAction::validate() const {
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw ConfigError("PushAction: direction must be a unit vector");
  if (!(length >= 0.0) || !std::isfinite(length))
    throw ConfigError("PushAction: length must be non-negative and finite");
  if (!start.allFinite()) throw ConfigError("PushAction: start must be finite");
}

BoxWorld::BoxWorld(const BoxConfig& cfg)
    : cfg_(cfg), prop_(PhysicalProperty::box(cfg.cop_norm.x(), cfg.cop_norm.y())),
      center_(cfg.center), theta_(cfg.theta) {
  if (cfg.length <= 0 || cfg.width <= 0) throw ConfigError("BoxWorld: extents must be positive");
  prop_.validate(false);
  limit_c2_ = cfg.gyration_scale * cfg.gyration_scale * (cfg.length * cfg.length + cfg.width * cfg.width) / 12.0;

  // Body-frame particles: the 4 corners (counter-clockwise from the negative
  // quadrant), then farthest-point-sampled boundary points.
  const double hl = cfg.length / 2, hw = cfg.width / 2;
  Matrix corners(4, 2);
  corners << -hl, -hw, hl, -hw, hl, hw, -hl, hw;
  int extra = std::max(0, cfg.extra_particles);
  body_particles_.resize(4 + extra, 2);
  body_particles_.topRows(4) = corners;
  if (extra > 0) {
    const int dense = 48;
    Matrix boundary(dense, 2);
    double perimeter = 2 * (cfg.length + cfg.width);
    for (int i = 0; i < dense; ++i) {
      double t = (i + 0.5) / dense * perimeter;
      Vector2 p;
      if (t < cfg.length) p = {-hl + t, -hw};
      else if (t < cfg.length + cfg.width) p = {hl, -hw + (t - cfg.length)};
      else if (t < 2 * cfg.length + cfg.width) p = {hl - (t - cfg.length - cfg.width), hw};
      else p = {-hl, hw - (t - 2 * cfg.length - cfg.width)};
      boundary.row(i) = p;
    }
    auto idx = farthest_point_sample(boundary, extra, cfg.particle_seed);
    for (int i = 0; i < extra; ++i) body_particles_.row(4 + i) = boundary.row(idx[i]);
  }
}

void BoxWorld::set_phi(const Vector& phi) {
  if (phi.size() != 2) throw ConfigError("BoxWorld: property is 2-dimensional");
  prop_ = PhysicalProperty::box(phi[0], phi[1]);
  prop_.validate(false);
  cfg_.cop_norm = {phi[0], phi[1]};
}

Vector2 BoxWorld::to_world(const Vector2& body) const {
  double c = std::cos(theta_), s = std::sin(theta_);
  return {center_.x() + c * body.x() - s * body.y(), center_.y() + s * body.x() + c * body.y()};
}

Vector2 BoxWorld::to_body(const Vector2& world) const {
  double c = std::cos(theta_), s = std::sin(theta_);
  Vector2 d = world - center_;
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y()};
}

Vector2 BoxWorld::cop_world() const {
  return to_world({cfg_.cop_norm.x() * cfg_.length, cfg_.cop_norm.y() * cfg_.width});
}

Matrix BoxWorld::corners() const {
  Matrix out(4, 2);
  for (int i = 0; i < 4; ++i) out.row(i) = to_world(body_particles_.row(i));
  return out;
}

Matrix BoxWorld::object_particles() const {
  Matrix out(body_particles_.rows(), 2);
  for (Eigen::Index i = 0; i < body_particles_.rows(); ++i)
    out.row(i) = to_world(body_particles_.row(i));
  return out;
}

Matrix BoxWorld::eef_particles_at(const Vector2& center, const Vector2&) const {
  Matrix out(1, 2);
  out.row(0) = center;
  return out;
}

void BoxWorld::step_to(const Vector2& target) {
  Vector2 delta = target - pusher_;
  if (delta.norm() > kMaxSubstep + 1e-12)
    throw ConfigError("BoxWorld::step_to: substep displacement exceeds 2 mm");

  const double hl = cfg_.length / 2, hw = cfg_.width / 2;
  auto closest_on_rect = [&](const Vector2& body, double& sdf) -> Vector2 {
    double qx = std::clamp(body.x(), -hl, hl);
    double qy = std::clamp(body.y(), -hw, hw);
    if (qx != body.x() || qy != body.y()) {
      sdf = (body - Vector2(qx, qy)).norm();
      return {qx, qy};
    }
    // inside: closest boundary point
    double dx = hl - std::abs(body.x()), dy = hw - std::abs(body.y());
    sdf = -std::min(dx, dy);
    Vector2 q = body;
    if (dx < dy) q.x() = body.x() > 0 ? hl : -hl;
    else q.y() = body.y() > 0 ? hw : -hw;
    return q;
  };

  {
    double sdf;
    closest_on_rect(to_body(pusher_), sdf);
    if (sdf < -1e-9) throw ConfigError("BoxWorld: pusher starts inside the box");
  }

  pusher_ = target;
  for (int iter = 0; iter < 12; ++iter) {
    double sdf;
    Vector2 cp_body = closest_on_rect(to_body(pusher_), sdf);
    double pen = cfg_.pusher_radius - sdf;
    if (pen <= 1e-12) break;
    if (sdf < 0) throw NumericError("BoxWorld: pusher penetrated the box");
    Vector2 cp = to_world(cp_body);
    Vector2 n = pusher_ - cp;
    double nn = n.norm();
    if (nn < 1e-12) throw NumericError("BoxWorld: degenerate contact");
    n /= nn;
    // Contact point displacement that restores clearance; sticking contact
    // and ellipsoidal limit surface give the quasi-static twist.
    Vector2 u = -pen * n;
    Vector2 cop = cop_world();
    Vector2 r = cp - cop;
    double denom = limit_c2_ + r.squaredNorm();
    double omega = cross2(r, u) / denom;
    Vector2 g = u - perp(r) * (cross2(r, u) / denom);
    // rotate the body about the CoP by omega, then translate the CoP by g
    double c = std::cos(omega), s = std::sin(omega);
    Vector2 rel = center_ - cop;
    center_ = cop + Vector2(c * rel.x() - s * rel.y(), s * rel.x() + c * rel.y()) + g;
    theta_ += omega;
  }
  if (!center_.allFinite() || !std::isfinite(theta_)) throw NumericError("BoxWorld: non-finite pose");
}

PushFrames BoxWorld::execute_push(const PushAction& action, double frame_travel) {
  action.validate();
  if (!(frame_travel > 0)) throw ConfigError("execute_push: frame_travel must be positive");
  set_pusher(action.start);
  PushFrames out;
  out.object.push_back(object_particles());
  out.eef.push_back(eef_particles_at(pusher_, action.direction));

  double traveled = 0, since_frame = 0;
  while (traveled < action.length - 1e-12) {
    double step = std::min(kSubstep, action.length - traveled);
    step_to(pusher_ + action.direction * step);
    traveled += step;
    since_frame += step;
    if (since_frame >= frame_travel - 1e-12) {
      out.object.push_back(object_particles());
      out.eef.push_back(eef_particles_at(pusher_, action.direction));
      since_frame = 0;
    }
  }
  if (since_frame > 1e-12) {
    out.object.push_back(object_particles());
    out.eef.push_back(eef_particles_at(pusher_, action.direction));
  }
  return out;
}

Matrix BoxWorld::save_state() const {
  Matrix s(1, 5);
  s << center_.x(), center_.y(), theta_, pusher_.x(), pusher_.y();
  return s;
}

void BoxWorld::load_state(const Matrix& s) {
  if (s.rows() != 1 || s.cols() != 5) throw ShapeError("BoxWorld::load_state: expected 1 x 5");
  center_ = {s(0, 0), s(0, 1)};
  theta_ = s(0, 2);
  pusher_ = {s(0, 3), s(0, 4)};
}

std::unique_ptr<SimWorld> BoxWorld::clone() const { return std::make_unique<BoxWorld>(*this); }

}  // namespace adgb
