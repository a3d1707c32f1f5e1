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

// Independent oracles used by the tests: brute-force enumerations and
// central finite differences. Deliberately written without reusing the
// library's implementation paths.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "adgb/types.hpp"

namespace oracle {

using adgb::Matrix;
using adgb::Vector;

// Central finite-difference gradient of scalar fn around x.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& fn, const Matrix& x,
                          double step = 1e-5) {
  Matrix g(x.rows(), x.cols());
  Matrix xp = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double orig = xp(i, j);
      xp(i, j) = orig + step;
      double up = fn(xp);
      xp(i, j) = orig - step;
      double down = fn(xp);
      xp(i, j) = orig;
      g(i, j) = (up - down) / (2 * step);
    }
  return g;
}

// Max relative error between an analytic and a finite-difference gradient,
// guarded against tiny denominators.
inline double grad_rel_error(const Matrix& analytic, const Matrix& fd, double floor = 1e-6) {
  double worst = 0;
  for (Eigen::Index i = 0; i < analytic.rows(); ++i)
    for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
      double denom = std::max({std::abs(analytic(i, j)), std::abs(fd(i, j)), floor});
      worst = std::max(worst, std::abs(analytic(i, j) - fd(i, j)) / denom);
    }
  return worst;
}

// Exhaustive nearest-neighbor chamfer (summed squared distances).
inline double chamfer_bruteforce(const Matrix& a, const Matrix& b) {
  double total = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double d = 0;
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        double diff = a(i, c) - b(j, c);
        d += diff * diff;
      }
      best = std::min(best, d);
    }
    total += best;
  }
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      double d = 0;
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        double diff = a(i, c) - b(j, c);
        d += diff * diff;
      }
      best = std::min(best, d);
    }
    total += best;
  }
  return total;
}

// Greedy farthest point sampling by exhaustive enumeration from a given
// start index; ties broken by lowest index.
inline std::vector<int> fps_bruteforce(const Matrix& points, int k, int start) {
  std::vector<int> picked{start};
  while (static_cast<int>(picked.size()) < k) {
    int best = -1;
    double best_min = -1;
    for (int i = 0; i < points.rows(); ++i) {
      double min_d = std::numeric_limits<double>::infinity();
      for (int p : picked) min_d = std::min(min_d, (points.row(i) - points.row(p)).squaredNorm());
      if (min_d > best_min) {
        best_min = min_d;
        best = i;
      }
    }
    picked.push_back(best);
  }
  return picked;
}

// All-pairs radius edge enumeration (receiver, sender), lexicographic.
inline std::vector<std::pair<int, int>> edges_bruteforce(const Matrix& pos, double d) {
  std::vector<std::pair<int, int>> out;
  for (int w = 0; w < pos.rows(); ++w)
    for (int u = 0; u < pos.rows(); ++u) {
      if (w == u) continue;
      double dist = std::sqrt((pos.row(w) - pos.row(u)).squaredNorm());
      if (dist <= d) out.emplace_back(w, u);
    }
  return out;
}

}  // namespace oracle
