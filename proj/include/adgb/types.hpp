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

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace adgb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Vector2 = Eigen::Vector2d;

// Planar worlds throughout; feature layouts are written D-generically.
inline constexpr int kDim = 2;

// Embedded in every JSON artifact this project writes.
inline constexpr int kSchemaVersion = 1;

// Error taxonomy; the CLI maps these onto distinct exit codes.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

inline void require_finite(const Matrix& m, const char* where) {
  if (!m.allFinite()) throw NumericError(std::string("non-finite values in ") + where);
}

struct Rect {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  bool contains(const Vector2& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  Vector2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
};

// Default planar workspace, 70 cm x 45 cm centered at the origin.
inline Rect default_workspace() { return Rect{-0.35, -0.225, 0.35, 0.225}; }

enum class Material { RigidBox = 0, Rope = 1, Granular = 2 };

inline const char* material_name(Material m) {
  switch (m) {
    case Material::RigidBox: return "rigid_box";
    case Material::Rope: return "rope";
    case Material::Granular: return "granular";
  }
  return "unknown";
}

Material material_from_name(const std::string& name);

}  // namespace adgb
