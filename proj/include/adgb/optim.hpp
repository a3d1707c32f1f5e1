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
#include <functional>
#include <vector>

#include "adgb/types.hpp"

namespace adgb {

struct OptTracePoint {
  Vector x;
  double cost = 0;
};

struct OptResult {
  Vector best_x;
  double best_cost = 0;
  std::vector<OptTracePoint> trace;
};

// Gaussian-process Bayesian optimization for 1-D minimization: squared
// exponential kernel with a fixed length scale, expected improvement
// maximized on a uniform grid.
struct BoConfig {
  int evaluations = 50;
  int init_samples = 5;
  int grid = 201;
  double lengthscale_frac = 0.2;  // of the domain width
  double noise = 1e-4;
  std::uint64_t seed = 0;
};

OptResult bayes_opt(const std::function<double(double)>& fn, double lo, double hi,
                    const BoConfig& cfg);

// Standard (mu/lambda) CMA-ES with box constraints handled by resampling.
struct CmaConfig {
  int max_evals = 500;
  int lambda = 0;            // 0: 4 + floor(3 ln n)
  double sigma0_frac = 0.3;  // of the mean domain width
  std::uint64_t seed = 0;
};

OptResult cma_es(const std::function<double(const Vector&)>& fn, const Vector& lo,
                 const Vector& hi, const CmaConfig& cfg);

// Model-predictive path integral update over an action sequence (rows are
// steps). Dimensions flagged circular are averaged on the circle and never
// clipped. The returned sequence never costs more than the evaluated initial
// nominal (the nominal is always candidate 0 and the best candidate wins).
struct MppiConfig {
  int samples = 128;
  int iterations = 4;
  double lambda = 0.1;
  Vector noise_scale;  // per action dimension
  std::uint64_t seed = 0;
};

struct MppiResult {
  Matrix sequence;
  double cost = 0;
  std::vector<double> iteration_best;  // best sampled cost per iteration
};

MppiResult mppi_optimize(const Matrix& nominal, const Vector& lo, const Vector& hi,
                         const std::vector<bool>& circular,
                         const std::function<double(const Matrix&)>& cost_fn,
                         const MppiConfig& cfg);

}  // namespace adgb
