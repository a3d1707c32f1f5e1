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

#include "adgb/chamfer.hpp"

#include <limits>

namespace adgb {

double chamfer(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0 || b.rows() == 0) throw ShapeError("chamfer: empty point set");
  if (a.cols() != b.cols()) throw ShapeError("chamfer: dimension mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      best = std::min(best, (a.row(i) - b.row(j)).squaredNorm());
    total += best;
  }
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      best = std::min(best, (a.row(i) - b.row(j)).squaredNorm());
    total += best;
  }
  return total;
}

}  // namespace adgb
