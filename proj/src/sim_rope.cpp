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
constexpr double kGravity = 9.81;
constexpr double kStopSpeed = 1e-3;  // below this, stiction can freeze a node
}  // namespace

RopeWorld::RopeWorld(const RopeConfig& cfg, const PhysicalProperty& prop) : cfg_(cfg), prop_(prop) {
  if (cfg.nodes < 8) throw ConfigError("RopeWorld: need at least 8 nodes");
  if (prop.material != Material::Rope) throw ConfigError("RopeWorld: property material mismatch");
  prop_.validate(false);
  set_phi(prop.phi);
  if (cfg.initial_points.rows() == 0) {
    pos_.resize(cfg.nodes, 2);
    for (int i = 0; i < cfg.nodes; ++i)
      pos_.row(i) = Vector2(-0.5 * (cfg.nodes - 1) * cfg.seg_len + i * cfg.seg_len, 0.0);
  } else {
    if (cfg.initial_points.rows() != cfg.nodes || cfg.initial_points.cols() != 2)
      throw ShapeError("RopeWorld: initial_points must be nodes x 2");
    pos_ = cfg.initial_points;
  }
  vel_ = Matrix::Zero(cfg.nodes, 2);
}

void RopeWorld::set_phi(const Vector& phi) {
  if (phi.size() < 1 || phi.size() > 2) throw ConfigError("RopeWorld: property must be 1- or 2-dimensional");
  prop_.material = Material::Rope;
  prop_.phi = phi;
  prop_.validate(false);
  // Geometric interpolation keeps both quantities positive over the extended
  // estimation range [-0.2, 1.2].
  bend_k_ = cfg_.bend_k_min * std::pow(cfg_.bend_k_max / cfg_.bend_k_min, phi[0]);
  double phi_f = phi.size() > 1 ? phi[1] : 0.5;
  mu_ = cfg_.mu_min * std::pow(cfg_.mu_max / cfg_.mu_min, phi_f);
}

Matrix RopeWorld::eef_particles_at(const Vector2& center, const Vector2&) const {
  Matrix out(1, 2);
  out.row(0) = center;
  return out;
}

void RopeWorld::apply_forces(Matrix& force) const {
  const int n = cfg_.nodes;
  force.setZero(n, 2);
  // stretch springs between neighbors
  for (int i = 0; i + 1 < n; ++i) {
    Vector2 d = pos_.row(i + 1) - pos_.row(i);
    double len = d.norm();
    if (len < 1e-12) continue;
    Vector2 f = cfg_.stretch_k * (len - cfg_.seg_len) * (d / len);
    force.row(i) += f.transpose();
    force.row(i + 1) -= f.transpose();
  }
  // angular bending springs: energy (1/2) k theta^2 at each interior joint,
  // forces from the exact turning-angle gradient (restoring torque linear in
  // the angle)
  auto perp = [](const Vector2& v) { return Vector2(-v.y(), v.x()); };
  for (int i = 1; i + 1 < n; ++i) {
    Vector2 e1 = pos_.row(i) - pos_.row(i - 1);
    Vector2 e2 = pos_.row(i + 1) - pos_.row(i);
    double l1 = e1.squaredNorm(), l2 = e2.squaredNorm();
    if (l1 < 1e-16 || l2 < 1e-16) continue;
    double theta = std::atan2(e1.x() * e2.y() - e1.y() * e2.x(), e1.dot(e2));
    Vector2 g1 = perp(e1) / l1;
    Vector2 g2 = perp(e2) / l2;
    double m = -bend_k_ * theta;
    force.row(i - 1) += (m * g1).transpose();
    force.row(i) += (m * (-g1 - g2)).transpose();
    force.row(i + 1) += (m * g2).transpose();
  }
}

void RopeWorld::step_to(const Vector2& target) {
  if ((target - pusher_).norm() > 2e-3 + 1e-12)
    throw ConfigError("RopeWorld::step_to: substep displacement exceeds 2 mm");
  pusher_ = target;

  const int n = cfg_.nodes;
  Matrix force(n, 2);
  apply_forces(force);

  const double f_coulomb = mu_ * cfg_.mass * kGravity;
  for (int i = 0; i < n; ++i) {
    Vector2 f = force.row(i);
    Vector2 v = vel_.row(i);
    double speed = v.norm();
    if (speed > kStopSpeed) {
      f -= f_coulomb * (v / speed);
    } else if (f.norm() <= f_coulomb) {
      // static friction holds the node
      vel_.row(i).setZero();
      continue;
    } else {
      f -= f_coulomb * f.normalized();
    }
    f -= cfg_.viscous * v;
    vel_.row(i) += (cfg_.dt / cfg_.mass) * f.transpose();
  }

  // pusher contact against rope segments: the disc cannot pass between
  // nodes. A penetrated segment pushes its endpoints out along the contact
  // normal, split by the barycentric weight of the closest point.
  for (int i = 0; i + 1 < n; ++i) {
    Vector2 a = pos_.row(i) + vel_.row(i) * cfg_.dt;
    Vector2 b = pos_.row(i + 1) + vel_.row(i + 1) * cfg_.dt;
    Vector2 ab = b - a;
    double len2 = ab.squaredNorm();
    double t = len2 > 1e-16 ? std::clamp((pusher_ - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    Vector2 closest = a + t * ab;
    Vector2 d = closest - pusher_;
    double dist = d.norm();
    if (dist < cfg_.pusher_radius) {
      Vector2 nrm = dist > 1e-12 ? Vector2(d / dist) : Vector2(1, 0);
      Vector2 push = (cfg_.pusher_radius - dist) * nrm;
      vel_.row(i) += ((1.0 - t) * push / cfg_.dt).transpose();
      vel_.row(i + 1) += (t * push / cfg_.dt).transpose();
    }
  }

  double max_step = (vel_ * cfg_.dt).rowwise().norm().maxCoeff();
  if (!std::isfinite(max_step) || max_step >= cfg_.seg_len)
    throw NumericError("RopeWorld: unstable step (displacement " + std::to_string(max_step) + " m)");
  pos_ += vel_ * cfg_.dt;
  require_finite(pos_, "RopeWorld positions");
}

bool RopeWorld::at_rest() const { return vel_.rowwise().norm().maxCoeff() < cfg_.settle_speed; }

double RopeWorld::settle() {
  // always integrate a little first: a statically held state can still carry
  // unbalanced spring forces
  double t = 0;
  int warmup = 50;
  while (t < cfg_.settle_max_time && (warmup-- > 0 || !at_rest())) {
    step_to(pusher_);
    t += cfg_.dt;
  }
  return t;
}

PushFrames RopeWorld::execute_push(const PushAction& action, double frame_travel) {
  action.validate();
  if (!(frame_travel > 0)) throw ConfigError("execute_push: frame_travel must be positive");
  set_pusher(action.start);
  PushFrames out;
  out.object.push_back(pos_);
  out.eef.push_back(eef_particles_at(pusher_, action.direction));

  const double step_len = cfg_.pusher_speed * cfg_.dt;
  double traveled = 0, since_frame = 0;
  while (traveled < action.length - 1e-12) {
    double step = std::min(step_len, action.length - traveled);
    step_to(pusher_ + action.direction * step);
    traveled += step;
    since_frame += step;
    if (since_frame >= frame_travel - 1e-12) {
      out.object.push_back(pos_);
      out.eef.push_back(eef_particles_at(pusher_, action.direction));
      since_frame = 0;
    }
  }
  if (since_frame > 1e-12) {
    out.object.push_back(pos_);
    out.eef.push_back(eef_particles_at(pusher_, action.direction));
  }

  // settling frames at the time cadence matching frame_travel at push speed
  const double frame_dt = frame_travel / cfg_.pusher_speed;
  double t = 0;
  while (t < cfg_.settle_max_time && !at_rest()) {
    double frame_end = t + frame_dt;
    while (t < frame_end && !at_rest()) {
      step_to(pusher_);
      t += cfg_.dt;
    }
    out.object.push_back(pos_);
    out.eef.push_back(eef_particles_at(pusher_, action.direction));
  }
  return out;
}

double RopeWorld::energy() const {
  double e = 0;
  for (int i = 0; i + 1 < cfg_.nodes; ++i) {
    double stretch = (pos_.row(i + 1) - pos_.row(i)).norm() - cfg_.seg_len;
    e += 0.5 * cfg_.stretch_k * stretch * stretch;
  }
  for (int i = 1; i + 1 < cfg_.nodes; ++i) {
    Vector2 e1 = pos_.row(i) - pos_.row(i - 1);
    Vector2 e2 = pos_.row(i + 1) - pos_.row(i);
    double theta = std::atan2(e1.x() * e2.y() - e1.y() * e2.x(), e1.dot(e2));
    e += 0.5 * bend_k_ * theta * theta;
  }
  e += 0.5 * cfg_.mass * vel_.rowwise().squaredNorm().sum();
  return e;
}

double RopeWorld::curvature() const {
  double total = 0;
  for (int i = 0; i + 2 < cfg_.nodes; ++i) {
    Vector2 a = pos_.row(i + 1) - pos_.row(i);
    Vector2 b = pos_.row(i + 2) - pos_.row(i + 1);
    double angle = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
    total += std::abs(angle);
  }
  return total;
}

Matrix RopeWorld::save_state() const {
  Matrix s(cfg_.nodes + 1, 4);
  s.topLeftCorner(cfg_.nodes, 2) = pos_;
  s.topRightCorner(cfg_.nodes, 2) = vel_;
  s.row(cfg_.nodes) << pusher_.x(), pusher_.y(), 0, 0;
  return s;
}

void RopeWorld::load_state(const Matrix& s) {
  if (s.rows() != cfg_.nodes + 1 || s.cols() != 4)
    throw ShapeError("RopeWorld::load_state: bad shape");
  pos_ = s.topLeftCorner(cfg_.nodes, 2);
  vel_ = s.topRightCorner(cfg_.nodes, 2);
  pusher_ = {s(cfg_.nodes, 0), s(cfg_.nodes, 1)};
}

std::unique_ptr<SimWorld> RopeWorld::clone() const { return std::make_unique<RopeWorld>(*this); }

}  // namespace adgb
