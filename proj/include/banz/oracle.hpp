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

#ifndef BANZ_ORACLE_HPP_
#define BANZ_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace banz::oracle {

// Loss l(w) of one sample as an explicit function of a small weight vector.
using LossFn = std::function<double(std::span<const double>)>;

// Importance-weighted Bayesian prediction over a low-dimensional weight
// space with a standard normal prior:
//   <P> = int e^{-l(w)} prod_i e^{-rho_i l_i(w)} P0(w) dw
//         / int prod_i e^{-rho_i l_i(w)} P0(w) dw
// integrated on [-range, range]^dim.
struct TinyProblem {
  std::size_t dim = 1;  // at most 3 for quadrature
  double range = 3.0;
  double step = 0.05;   // grid spacing h; 2 * range / h must be an even integer
  std::vector<LossFn> train_losses;
  LossFn test_loss;
  std::vector<double> rho;  // one per training loss

  // Throws ConfigError.
  void validate() const;
};

// Relative change allowed when the grid spacing is halved.
inline constexpr double kGridTolerance = 1e-6;

struct PredictiveResult {
  double value = 0.0;     // at spacing h / 2
  double coarse = 0.0;    // at spacing h
  double relative_change = 0.0;
  bool converged = false;
};

// Ratio of two composite-Simpson grid quadratures, with the grid-convergence
// gate (halve h, compare).
PredictiveResult exact_predictive(const TinyProblem& problem);

struct DerivativeResult {
  // Central difference of ln <P> with respect to rho_i (step 1e-4).
  double exact_fd = 0.0;
  // Posterior covariance of l_i and l under prod_j e^{-rho_j l_j} P0.
  double covariance = 0.0;
  // Second-order expansion around the posterior mean:
  // sum_j var_j * dl_i/dw_j * dl/dw_j with posterior marginal variances.
  double linearized = 0.0;
  double relative_change = 0.0;  // of exact_fd under grid refinement
  bool converged = false;
};

DerivativeResult drho_derivative(const TinyProblem& problem, std::size_t i);

// Posterior covariance of each training loss with the test loss.
std::vector<double> loss_covariances(const TinyProblem& problem);

// Monte-Carlo estimate of the same predictive with `draws` samples from the
// prior; for sanity runs in 4 to 6 dimensions where grids are too large.
double mc_predictive(const TinyProblem& problem, std::size_t draws,
                     std::uint64_t seed);

// scale * softplus(a . w + b).
LossFn softplus_loss(std::vector<double> a, double b, double scale);
// scale * curvature * (w - center)^2 / 2, one dimension.
LossFn quadratic_loss(double center, double curvature, double scale = 1.0);
LossFn constant_loss(double value);

// Random problem with softplus losses: a ~ U[-1.5, 1.5]^dim, b ~ U[-1, 1],
// losses multiplied by `scale`, rho = 1 for every training sample.
TinyProblem random_problem(std::mt19937_64& rng, std::size_t dim,
                           std::size_t n_train, double scale);

struct GaussianMixture {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  // Throws ConfigError unless weights are >= 0 and sum to 1 and variances
  // are positive.
  void validate() const;
};

struct JensenGap {
  double lhs = 0.0;  // sum_k A_k exp(mu_k + var_k / 2)
  double rhs = 0.0;  // exp(mean + within-component variance / 2)
  // exp(mean + total mixture variance / 2); reported, not asserted.
  double rhs_full_variance = 0.0;
};

JensenGap jensen_gap(const GaussianMixture& mixture);

GaussianMixture random_mixture(std::mt19937_64& rng, std::size_t max_components);

}  // namespace banz::oracle

#endif  // BANZ_ORACLE_HPP_
