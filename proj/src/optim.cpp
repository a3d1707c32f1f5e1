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

#include "adgb/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "adgb/parallel.hpp"
#include "adgb/rng.hpp"

namespace adgb {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

}  // namespace

OptResult bayes_opt(const std::function<double(double)>& fn, double lo, double hi,
                    const BoConfig& cfg) {
  if (!(hi > lo)) throw ConfigError("bayes_opt: empty domain");
  if (cfg.evaluations < 2 || cfg.init_samples < 1 || cfg.init_samples >= cfg.evaluations)
    throw ConfigError("bayes_opt: bad budget");
  const double width = hi - lo;
  const double ls = cfg.lengthscale_frac * width;

  Rng rng(cfg.seed);
  OptResult result;
  std::vector<double> xs, ys;
  auto eval = [&](double x) {
    double y = fn(x);
    if (!std::isfinite(y)) throw NumericError("bayes_opt: non-finite objective");
    xs.push_back(x);
    ys.push_back(y);
    Vector vx(1);
    vx << x;
    result.trace.push_back({vx, y});
  };

  for (int i = 0; i < cfg.init_samples; ++i) eval(rng.uniform(lo, hi));

  Vector grid(cfg.grid);
  for (int i = 0; i < cfg.grid; ++i) grid[i] = lo + width * i / (cfg.grid - 1);

  while (static_cast<int>(xs.size()) < cfg.evaluations) {
    const int n = static_cast<int>(xs.size());
    double ym = 0, ysd = 0;
    for (double y : ys) ym += y;
    ym /= n;
    for (double y : ys) ysd += (y - ym) * (y - ym);
    ysd = std::sqrt(ysd / n);
    if (ysd < 1e-12) ysd = 1.0;  // flat objective so far

    Matrix k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double d = (xs[i] - xs[j]) / ls;
        k(i, j) = std::exp(-0.5 * d * d);
      }
    k.diagonal().array() += cfg.noise;
    Eigen::LLT<Matrix> llt(k);
    for (double jitter = 1e-10; llt.info() != Eigen::Success && jitter < 1e-2; jitter *= 10) {
      Matrix kj = k;
      kj.diagonal().array() += jitter;
      llt.compute(kj);
    }
    if (llt.info() != Eigen::Success) throw NumericError("bayes_opt: kernel factorization failed");

    Vector yn(n);
    for (int i = 0; i < n; ++i) yn[i] = (ys[i] - ym) / ysd;
    Vector alpha = llt.solve(yn);

    double f_best = *std::min_element(ys.begin(), ys.end());
    std::set<double> seen(xs.begin(), xs.end());
    double best_ei = -1;
    double best_x = grid[0];
    Vector kstar(n);
    for (int gi = 0; gi < cfg.grid; ++gi) {
      double x = grid[gi];
      if (seen.count(x)) continue;
      for (int i = 0; i < n; ++i) {
        double d = (x - xs[i]) / ls;
        kstar[i] = std::exp(-0.5 * d * d);
      }
      double mu = ym + ysd * kstar.dot(alpha);
      Vector v = llt.matrixL().solve(kstar);
      double var = std::max(0.0, 1.0 - v.squaredNorm()) * ysd * ysd;
      double sigma = std::sqrt(var);
      double ei;
      if (sigma < 1e-12) {
        ei = std::max(0.0, f_best - mu);
      } else {
        double imp = f_best - mu;
        double z = imp / sigma;
        ei = imp * normal_cdf(z) + sigma * normal_pdf(z);
      }
      if (ei > best_ei) {
        best_ei = ei;
        best_x = x;
      }
    }
    eval(best_x);
  }

  std::size_t arg = 0;
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (ys[i] < ys[arg]) arg = i;
  result.best_x = Vector(1);
  result.best_x << xs[arg];
  result.best_cost = ys[arg];
  return result;
}

OptResult cma_es(const std::function<double(const Vector&)>& fn, const Vector& lo,
                 const Vector& hi, const CmaConfig& cfg) {
  const int n = static_cast<int>(lo.size());
  if (n < 1 || hi.size() != n) throw ConfigError("cma_es: bad bounds");
  for (int i = 0; i < n; ++i)
    if (!(hi[i] > lo[i])) throw ConfigError("cma_es: empty domain");

  const int lambda = cfg.lambda > 0 ? cfg.lambda : 4 + static_cast<int>(std::floor(3 * std::log(n)));
  const int mu = lambda / 2;
  Vector weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();
  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                              ((n + 2.0) * (n + 2.0) + mu_eff));
  const double chi_n = std::sqrt(static_cast<double>(n)) *
                       (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  Rng rng(cfg.seed);
  Vector mean = 0.5 * (lo + hi);
  double sigma = cfg.sigma0_frac * (hi - lo).mean();
  Matrix cov = Matrix::Identity(n, n);
  Vector p_sigma = Vector::Zero(n), p_c = Vector::Zero(n);

  OptResult result;
  result.best_cost = std::numeric_limits<double>::infinity();
  int evals = 0, gen = 0;

  while (evals < cfg.max_evals) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericError("cma_es: covariance eigensolve failed");
    Vector d = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
    Matrix b = eig.eigenvectors();
    Matrix inv_sqrt = b * d.cwiseInverse().asDiagonal() * b.transpose();

    std::vector<Vector> xs(lambda), ys(lambda);
    std::vector<double> costs(lambda);
    for (int i = 0; i < lambda; ++i) {
      Vector x(n), y(n);
      bool inside = false;
      for (int attempt = 0; attempt < 100 && !inside; ++attempt) {
        Vector z(n);
        for (int j = 0; j < n; ++j) z[j] = rng.normal();
        y = b * (d.asDiagonal() * z);
        x = mean + sigma * y;
        inside = true;
        for (int j = 0; j < n; ++j)
          if (x[j] < lo[j] || x[j] > hi[j]) inside = false;
      }
      if (!inside) {
        for (int j = 0; j < n; ++j) x[j] = std::clamp(x[j], lo[j], hi[j]);
        y = (x - mean) / sigma;
      }
      xs[i] = x;
      ys[i] = y;
      costs[i] = fn(x);
      if (!std::isfinite(costs[i])) throw NumericError("cma_es: non-finite objective");
      result.trace.push_back({x, costs[i]});
      if (costs[i] < result.best_cost) {
        result.best_cost = costs[i];
        result.best_x = x;
      }
      if (++evals >= cfg.max_evals && i + 1 < lambda) {
        // truncate the final generation
        xs.resize(i + 1);
        ys.resize(i + 1);
        costs.resize(i + 1);
        break;
      }
    }
    if (static_cast<int>(xs.size()) < mu) break;  // not enough samples to update

    std::vector<int> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int bb) { return costs[a] < costs[bb]; });

    Vector y_w = Vector::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys[order[i]];
    Vector mean_new = mean + sigma * y_w;

    ++gen;
    p_sigma = (1.0 - c_sigma) * p_sigma +
              std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * (inv_sqrt * y_w);
    double h_sigma_test = p_sigma.norm() /
                          std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * gen)) / chi_n;
    double h_sigma = h_sigma_test < 1.4 + 2.0 / (n + 1.0) ? 1.0 : 0.0;
    p_c = (1.0 - c_c) * p_c + h_sigma * std::sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w;

    Matrix rank_mu = Matrix::Zero(n, n);
    for (int i = 0; i < mu; ++i) rank_mu += weights[i] * ys[order[i]] * ys[order[i]].transpose();
    cov = (1.0 - c_1 - c_mu) * cov +
          c_1 * (p_c * p_c.transpose() + (1.0 - h_sigma) * c_c * (2.0 - c_c) * cov) +
          c_mu * rank_mu;
    sigma *= std::exp((c_sigma / d_sigma) * (p_sigma.norm() / chi_n - 1.0));
    sigma = std::min(sigma, (hi - lo).mean());  // keep proposals near the box
    mean = mean_new;
    for (int j = 0; j < n; ++j) mean[j] = std::clamp(mean[j], lo[j], hi[j]);
  }
  return result;
}

MppiResult mppi_optimize(const Matrix& nominal, const Vector& lo, const Vector& hi,
                         const std::vector<bool>& circular,
                         const std::function<double(const Matrix&)>& cost_fn,
                         const MppiConfig& cfg) {
  const int horizon = static_cast<int>(nominal.rows());
  const int dim = static_cast<int>(nominal.cols());
  if (cfg.samples < 1 || cfg.iterations < 1) throw ConfigError("mppi: bad sample/iteration budget");
  if (cfg.noise_scale.size() != dim || lo.size() != dim || hi.size() != dim ||
      static_cast<int>(circular.size()) != dim)
    throw ConfigError("mppi: dimension mismatch");

  Rng rng(cfg.seed);
  Matrix nom = nominal;
  MppiResult result;
  result.cost = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const int count = cfg.samples;
    std::vector<Matrix> cand(count);
    cand[0] = nom;  // the nominal itself always competes
    for (int i = 1; i < count; ++i) {
      Matrix c = nom;
      for (int t = 0; t < horizon; ++t)
        for (int j = 0; j < dim; ++j) {
          c(t, j) += cfg.noise_scale[j] * rng.normal();
          if (!circular[j]) c(t, j) = std::clamp(c(t, j), lo[j], hi[j]);
        }
      cand[i] = std::move(c);
    }

    std::vector<double> costs(count);
    parallel_for(count, [&](int i) { costs[i] = cost_fn(cand[i]); });

    double c_min = *std::min_element(costs.begin(), costs.end());
    result.iteration_best.push_back(c_min);
    for (int i = 0; i < count; ++i)
      if (costs[i] < result.cost) {
        result.cost = costs[i];
        result.sequence = cand[i];
      }

    Vector w(count);
    for (int i = 0; i < count; ++i) w[i] = std::exp(-(costs[i] - c_min) / cfg.lambda);
    double w_sum = w.sum();
    if (!(w_sum > 0) || !std::isfinite(w_sum)) {
      w.setOnes();
      w_sum = count;
    }
    Matrix updated(horizon, dim);
    for (int t = 0; t < horizon; ++t)
      for (int j = 0; j < dim; ++j) {
        if (circular[j]) {
          double sx = 0, sy = 0;
          for (int i = 0; i < count; ++i) {
            sx += w[i] * std::cos(cand[i](t, j));
            sy += w[i] * std::sin(cand[i](t, j));
          }
          updated(t, j) = std::atan2(sy, sx);
        } else {
          double acc = 0;
          for (int i = 0; i < count; ++i) acc += w[i] * cand[i](t, j);
          updated(t, j) = std::clamp(acc / w_sum, lo[j], hi[j]);
        }
      }
    nom = std::move(updated);
  }

  double nom_cost = cost_fn(nom);
  if (nom_cost <= result.cost) {
    result.cost = nom_cost;
    result.sequence = nom;
  }
  return result;
}

}  // namespace adgb
