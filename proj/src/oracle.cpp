/* Copyright 2026 The banz Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "banz/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/normal_distribution.hpp>

#include "banz/error.hpp"

namespace banz::oracle {

void TinyProblem::validate() const {
  if (dim == 0 || dim > 6) throw ConfigError("tiny problem dimension must be 1..6");
  if (!(range > 0.0) || !(step > 0.0)) {
    throw ConfigError("grid range and step must be positive");
  }
  const double intervals = 2.0 * range / step;
  const double rounded = std::round(intervals);
  if (std::abs(intervals - rounded) > 1e-9 * rounded ||
      static_cast<long long>(rounded) % 2 != 0) {
    throw ConfigError("2 * range / step must be an even integer");
  }
  if (!test_loss) throw ConfigError("tiny problem needs a test loss");
  if (rho.size() != train_losses.size()) {
    throw ConfigError("need one importance factor per training loss");
  }
}

namespace {

// Sums over the grid for several importance vectors at once. Moments are
// collected for the first one only. The normalizer sums use extended
// precision; in double the rho difference quotient loses about five digits.
struct GridSums {
  std::vector<long double> norm;  // sum of posterior weights
  std::vector<long double> num;   // sum of posterior weights times e^{-l}
  std::vector<double> train_mean;
  std::vector<double> train_test;
  double test_mean = 0.0;
  std::vector<double> w_mean;
  std::vector<double> w_sq;
};

GridSums integrate(const TinyProblem& p, double step,
                   std::span<const std::vector<double>> rhos) {
  const auto intervals = static_cast<std::size_t>(std::llround(2.0 * p.range / step));
  const std::size_t per_dim = intervals + 1;
  std::vector<double> coord(per_dim);
  std::vector<double> log_simpson(per_dim);
  for (std::size_t k = 0; k < per_dim; ++k) {
    coord[k] = -p.range + step * static_cast<double>(k);
    const double wk = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    log_simpson[k] = std::log(wk * step / 3.0);
  }

  const std::size_t n_train = p.train_losses.size();
  GridSums s;
  s.norm.assign(rhos.size(), 0.0);
  s.num.assign(rhos.size(), 0.0);
  s.train_mean.assign(n_train, 0.0);
  s.train_test.assign(n_train, 0.0);
  s.w_mean.assign(p.dim, 0.0);
  s.w_sq.assign(p.dim, 0.0);

  std::vector<std::size_t> idx(p.dim, 0);
  std::vector<double> w(p.dim);
  std::vector<double> losses(n_train);
  for (;;) {
    double log_base = 0.0;
    for (std::size_t j = 0; j < p.dim; ++j) {
      w[j] = coord[idx[j]];
      log_base += log_simpson[idx[j]] - 0.5 * w[j] * w[j];
    }
    for (std::size_t i = 0; i < n_train; ++i) losses[i] = p.train_losses[i](w);
    const double test = p.test_loss(w);
    const long double e_test = std::exp(-static_cast<long double>(test));
    for (std::size_t r = 0; r < rhos.size(); ++r) {
      double lw = log_base;
      for (std::size_t i = 0; i < n_train; ++i) lw -= rhos[r][i] * losses[i];
      const long double lweight = std::exp(static_cast<long double>(lw));
      const double weight = static_cast<double>(lweight);
      s.norm[r] += lweight;
      s.num[r] += lweight * e_test;
      if (r == 0) {
        for (std::size_t i = 0; i < n_train; ++i) {
          s.train_mean[i] += weight * losses[i];
          s.train_test[i] += weight * losses[i] * test;
        }
        s.test_mean += weight * test;
        for (std::size_t j = 0; j < p.dim; ++j) {
          s.w_mean[j] += weight * w[j];
          s.w_sq[j] += weight * w[j] * w[j];
        }
      }
    }
    std::size_t j = 0;
    while (j < p.dim && ++idx[j] == per_dim) idx[j++] = 0;
    if (j == p.dim) break;
  }

  for (long double z : s.norm) {
    if (!(z > 0.0) || !std::isfinite(z)) {
      throw NumericError("posterior normalizer underflowed or overflowed");
    }
  }
  const double z0 = static_cast<double>(s.norm[0]);
  for (std::size_t i = 0; i < n_train; ++i) {
    s.train_mean[i] /= z0;
    s.train_test[i] /= z0;
  }
  s.test_mean /= z0;
  for (std::size_t j = 0; j < p.dim; ++j) {
    s.w_mean[j] /= z0;
    s.w_sq[j] /= z0;
  }
  return s;
}

double relative_change(double coarse, double fine) {
  const double scale = std::max(std::abs(coarse), std::abs(fine));
  return scale == 0.0 ? 0.0 : std::abs(fine - coarse) / scale;
}

void check_quadrature(const TinyProblem& p) {
  p.validate();
  if (p.dim > 3) throw ConfigError("grid quadrature supports at most 3 dimensions");
}

}  // namespace

PredictiveResult exact_predictive(const TinyProblem& problem) {
  check_quadrature(problem);
  const std::vector<std::vector<double>> rhos{problem.rho};
  const GridSums coarse = integrate(problem, problem.step, rhos);
  const GridSums fine = integrate(problem, problem.step / 2.0, rhos);
  PredictiveResult r;
  r.coarse = static_cast<double>(coarse.num[0] / coarse.norm[0]);
  r.value = static_cast<double>(fine.num[0] / fine.norm[0]);
  r.relative_change = relative_change(r.coarse, r.value);
  r.converged = r.relative_change < kGridTolerance;
  return r;
}

namespace {

constexpr double kRhoStep = 1e-4;

struct FdPoint {
  double fd;
  GridSums sums;
};

FdPoint fd_at(const TinyProblem& p, std::size_t i, double step) {
  std::vector<std::vector<double>> rhos(3, p.rho);
  rhos[1][i] += kRhoStep;
  rhos[2][i] -= kRhoStep;
  GridSums sums = integrate(p, step, rhos);
  const long double up = std::log(sums.num[1] / sums.norm[1]);
  const long double down = std::log(sums.num[2] / sums.norm[2]);
  return {static_cast<double>((up - down) / (2.0L * kRhoStep)), std::move(sums)};
}

double partial(const LossFn& f, std::vector<double> w, std::size_t j) {
  constexpr double h = 1e-5;
  const double x = w[j];
  w[j] = x + h;
  const double up = f(w);
  w[j] = x - h;
  const double down = f(w);
  return (up - down) / (2.0 * h);
}

}  // namespace

DerivativeResult drho_derivative(const TinyProblem& problem, std::size_t i) {
  check_quadrature(problem);
  if (i >= problem.train_losses.size()) throw ConfigError("training index out of range");
  const FdPoint coarse = fd_at(problem, i, problem.step);
  const FdPoint fine = fd_at(problem, i, problem.step / 2.0);
  const GridSums& s = fine.sums;

  DerivativeResult r;
  r.exact_fd = fine.fd;
  r.covariance = s.train_test[i] - s.train_mean[i] * s.test_mean;

  for (std::size_t j = 0; j < problem.dim; ++j) {
    const double var = s.w_sq[j] - s.w_mean[j] * s.w_mean[j];
    r.linearized += var * partial(problem.train_losses[i], s.w_mean, j) *
                    partial(problem.test_loss, s.w_mean, j);
  }

  // Absolute floor for derivatives that vanish, e.g. a constant loss.
  const double tol = kGridTolerance * std::max(std::abs(fine.fd), std::abs(r.covariance)) + 1e-12;
  r.relative_change = relative_change(coarse.fd, fine.fd);
  r.converged = std::abs(fine.fd - coarse.fd) <= tol;
  return r;
}

std::vector<double> loss_covariances(const TinyProblem& problem) {
  check_quadrature(problem);
  const std::vector<std::vector<double>> rhos{problem.rho};
  const GridSums s = integrate(problem, problem.step, rhos);
  std::vector<double> cov(problem.train_losses.size());
  for (std::size_t i = 0; i < cov.size(); ++i) {
    cov[i] = s.train_test[i] - s.train_mean[i] * s.test_mean;
  }
  return cov;
}

double mc_predictive(const TinyProblem& problem, std::size_t draws,
                     std::uint64_t seed) {
  problem.validate();
  std::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> normal;
  std::vector<double> w(problem.dim);
  double norm = 0.0;
  double num = 0.0;
  for (std::size_t n = 0; n < draws; ++n) {
    for (double& x : w) x = normal(rng);
    double lw = 0.0;
    for (std::size_t i = 0; i < problem.train_losses.size(); ++i) {
      lw -= problem.rho[i] * problem.train_losses[i](w);
    }
    const double weight = std::exp(lw);
    norm += weight;
    num += weight * std::exp(-problem.test_loss(w));
  }
  return num / norm;
}

LossFn softplus_loss(std::vector<double> a, double b, double scale) {
  return [a = std::move(a), b, scale](std::span<const double> w) {
    double x = b;
    for (std::size_t j = 0; j < a.size(); ++j) x += a[j] * w[j];
    // log(1 + e^x) without overflow
    const double sp = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return scale * sp;
  };
}

LossFn quadratic_loss(double center, double curvature, double scale) {
  return [=](std::span<const double> w) {
    const double r = w[0] - center;
    return scale * 0.5 * curvature * r * r;
  };
}

LossFn constant_loss(double value) {
  return [value](std::span<const double>) { return value; };
}

TinyProblem random_problem(std::mt19937_64& rng, std::size_t dim,
                           std::size_t n_train, double scale) {
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  std::uniform_real_distribution<double> offset(-1.0, 1.0);
  auto make = [&] {
    std::vector<double> a(dim);
    for (double& x : a) x = coef(rng);
    const double b = offset(rng);
    return softplus_loss(std::move(a), b, scale);
  };
  TinyProblem p;
  p.dim = dim;
  for (std::size_t i = 0; i < n_train; ++i) p.train_losses.push_back(make());
  p.test_loss = make();
  p.rho.assign(n_train, 1.0);
  return p;
}

void GaussianMixture::validate() const {
  if (weights.empty() || weights.size() != means.size() ||
      weights.size() != variances.size()) {
    throw ConfigError("mixture needs matching, non-empty component lists");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0)) throw ConfigError("mixture weights must be >= 0");
    if (!(variances[k] > 0.0)) throw ConfigError("mixture variances must be > 0");
    total += weights[k];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("mixture weights must sum to 1");
}

JensenGap jensen_gap(const GaussianMixture& m) {
  m.validate();
  double lhs = 0.0;
  double mean = 0.0;
  double within = 0.0;
  for (std::size_t k = 0; k < m.weights.size(); ++k) {
    lhs += m.weights[k] * std::exp(m.means[k] + 0.5 * m.variances[k]);
    mean += m.weights[k] * m.means[k];
    within += m.weights[k] * m.variances[k];
  }
  double between = 0.0;
  for (std::size_t k = 0; k < m.weights.size(); ++k) {
    const double r = m.means[k] - mean;
    between += m.weights[k] * r * r;
  }
  return {lhs, std::exp(mean + 0.5 * within),
          std::exp(mean + 0.5 * (within + between))};
}

GaussianMixture random_mixture(std::mt19937_64& rng, std::size_t max_components) {
  const std::size_t k =
      std::uniform_int_distribution<std::size_t>(1, max_components)(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> mu(-2.0, 2.0);
  std::uniform_real_distribution<double> var(0.1, 2.0);
  GaussianMixture m;
  for (std::size_t c = 0; c < k; ++c) {
    m.weights.push_back(unit(rng) + 1e-3);
    m.means.push_back(mu(rng));
    m.variances.push_back(var(rng));
  }
  const double total = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
  for (double& a : m.weights) a /= total;
  // Last weight absorbs the rounding of the division.
  m.weights.back() = 1.0 - std::accumulate(m.weights.begin(), m.weights.end() - 1, 0.0);
  return m;
}

}  // namespace banz::oracle
