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

#include "banz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>

#include "banz/attention.hpp"
#include "banz/gaussnet.hpp"
#include "banz/oracle.hpp"
#include "banz/trainer.hpp"

namespace banz {

namespace {

using oracle::TinyProblem;

std::string printf_string(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

CheckResult jensen_single(std::mt19937_64& rng, int count) {
  double worst = 0.0;
  for (int n = 0; n < count; ++n) {
    oracle::GaussianMixture m = oracle::random_mixture(rng, 1);
    const oracle::JensenGap g = oracle::jensen_gap(m);
    worst = std::max(worst, std::abs(g.lhs - g.rhs) / g.rhs);
  }
  return {"jensen.single_component", printf_string("max |lhs-rhs|/rhs = %.3g over %d", worst, count),
          "<= 1e-12", worst <= 1e-12};
}

CheckResult jensen_example() {
  const oracle::JensenGap g = oracle::jensen_gap({{0.5, 0.5}, {0.0, 1.0}, {1.0, 1.0}});
  const double lhs = 0.5 * std::exp(0.5) + 0.5 * std::exp(1.5);
  const bool ok = std::abs(g.lhs - lhs) < 1e-12 && std::abs(g.rhs - std::exp(1.0)) < 1e-12 &&
                  g.lhs > g.rhs;
  return {"jensen.two_component_example",
          printf_string("lhs = %.6f rhs = %.6f", g.lhs, g.rhs), "lhs > rhs, closed form 1e-12",
          ok};
}

std::vector<CheckResult> jensen_sweep(std::mt19937_64& rng, int count) {
  int violations = 0;
  int full_holds = 0;
  double min_gap = 1e300;
  for (int n = 0; n < count; ++n) {
    const oracle::JensenGap g = oracle::jensen_gap(oracle::random_mixture(rng, 5));
    min_gap = std::min(min_gap, g.lhs - g.rhs);
    if (g.lhs < g.rhs - 1e-12) ++violations;
    if (g.lhs >= g.rhs_full_variance - 1e-12) ++full_holds;
  }
  CheckResult sweep{"jensen.random_mixtures",
                    printf_string("%d/%d hold, min lhs-rhs = %.3g", count - violations, count, min_gap),
                    "lhs >= rhs - 1e-12", violations == 0};
  CheckResult full{"jensen.full_variance_variant",
                   printf_string("%d/%d hold with total mixture variance", full_holds, count),
                   "not asserted", true, true};
  return {sweep, full};
}

CheckResult prior_limit() {
  // rho = 0: the predictive is the prior average of e^{-l} on the grid
  // interval, which has an erf closed form for a quadratic l.
  const double a = 1.7, c = 0.4, range = 3.0;
  TinyProblem p;
  p.dim = 1;
  p.train_losses = {oracle::quadratic_loss(-1.0, 2.0)};
  p.rho = {0.0};
  p.test_loss = oracle::quadratic_loss(c, a);
  const oracle::PredictiveResult r = oracle::exact_predictive(p);
  const double m = a * c / (1.0 + a);
  const double s = std::sqrt(1.0 + a);
  const double num = std::exp(-a * c * c / (2.0 * (1.0 + a))) / s *
                     (normal_cdf((range - m) * s) - normal_cdf((-range - m) * s));
  const double den = normal_cdf(range) - normal_cdf(-range);
  const double expected = num / den;
  const double err = std::abs(r.value - expected) / expected;
  return {"predictive.prior_limit",
          printf_string("quadrature %.10f closed form %.10f", r.value, expected),
          "1e-8 relative, grid gate", err <= 1e-8 && r.converged};
}

CheckResult constant_test_loss(std::mt19937_64& rng) {
  TinyProblem p = oracle::random_problem(rng, 2, 4, 0.5);
  std::uniform_real_distribution<double> unit(0.0, 2.0);
  for (double& r : p.rho) r = unit(rng);
  const double c = 0.37;
  p.test_loss = oracle::constant_loss(c);
  const oracle::PredictiveResult r = oracle::exact_predictive(p);
  const double err = std::abs(r.value - std::exp(-c));
  return {"predictive.constant_test_loss",
          printf_string("quadrature %.12f e^-c %.12f", r.value, std::exp(-c)), "1e-12",
          err <= 1e-12 && r.converged};
}

CheckResult gaussian_closed_form() {
  // Conjugate case: quadratic losses make the posterior Gaussian with
  // precision 1 + sum rho_i a_i.
  const std::vector<double> centers{0.3, 0.5, 0.1};
  const std::vector<double> curv{12.0, 9.0, 15.0};
  const std::vector<double> rho{1.2, 0.8, 1.0};
  const double at = 3.0, ct = 0.6;
  TinyProblem p;
  p.dim = 1;
  double prec = 1.0, lin = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    p.train_losses.push_back(oracle::quadratic_loss(centers[i], curv[i]));
    prec += rho[i] * curv[i];
    lin += rho[i] * curv[i] * centers[i];
  }
  p.rho = rho;
  p.test_loss = oracle::quadratic_loss(ct, at);
  const double mean = lin / prec;
  const double expected = std::sqrt(prec / (prec + at)) *
                          std::exp(-0.5 * prec * at * (mean - ct) * (mean - ct) / (prec + at));
  const oracle::PredictiveResult r = oracle::exact_predictive(p);
  const double err = std::abs(r.value - expected) / expected;
  return {"predictive.gaussian_closed_form",
          printf_string("quadrature %.12f closed form %.12f", r.value, expected),
          "1e-8 relative", err <= 1e-8 && r.converged};
}

CheckResult grid_gate(std::mt19937_64& rng) {
  bool ok = true;
  double worst = 0.0;
  for (std::size_t dim : {1, 2, 3}) {
    const oracle::PredictiveResult r =
        oracle::exact_predictive(oracle::random_problem(rng, dim, 3, 0.5));
    ok = ok && r.converged && r.value > 0.0 && r.value <= 1.0;
    worst = std::max(worst, r.relative_change);
  }
  return {"predictive.grid_convergence", printf_string("max change on halving h = %.3g", worst),
          "< 1e-6, value in (0, 1]", ok};
}

std::size_t argmax_abs(const std::vector<double>& xs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (std::abs(xs[i]) > std::abs(xs[best])) best = i;
  }
  return best;
}

CheckResult small_loss_agreement(std::mt19937_64& rng, int count) {
  double worst = 0.0;
  double grid = 0.0;
  bool gated = true;
  for (int n = 0; n < count; ++n) {
    const TinyProblem p = oracle::random_problem(rng, 2, 4, 0.01);
    const std::size_t i = argmax_abs(oracle::loss_covariances(p));
    const oracle::DerivativeResult d = oracle::drho_derivative(p, i);
    gated = gated && d.converged;
    grid = std::max(grid, d.relative_change);
    worst = std::max(worst, std::abs(d.exact_fd - d.covariance) / std::abs(d.covariance));
  }
  return {"derivative.small_loss_covariance",
          printf_string("max |fd-cov|/|cov| = %.4f over %d (scale 0.01), grid change %.2g",
                        worst, count, grid),
          "<= 0.05", worst <= 0.05 && gated};
}

CheckResult sign_agreement(std::mt19937_64& rng, int count) {
  int agree = 0;
  for (int n = 0; n < count; ++n) {
    const TinyProblem p = oracle::random_problem(rng, 2, 4, 0.1);
    std::uniform_int_distribution<std::size_t> pick(0, p.train_losses.size() - 1);
    const oracle::DerivativeResult d = oracle::drho_derivative(p, pick(rng));
    if ((d.exact_fd > 0) == (d.covariance > 0)) ++agree;
  }
  return {"derivative.sign_agreement",
          printf_string("%d/%d signs agree (scale 0.1)", agree, count), ">= 95%",
          agree * 100 >= 95 * count};
}

CheckResult constant_train_loss(std::mt19937_64& rng) {
  TinyProblem p = oracle::random_problem(rng, 2, 3, 0.5);
  p.train_losses[1] = oracle::constant_loss(0.8);
  const oracle::DerivativeResult d = oracle::drho_derivative(p, 1);
  const bool ok = std::abs(d.exact_fd) <= 1e-9 && std::abs(d.covariance) <= 1e-12;
  return {"derivative.constant_train_loss",
          printf_string("fd = %.3g cov = %.3g", d.exact_fd, d.covariance), "both 0", ok};
}

CheckResult antisymmetry(std::mt19937_64& rng) {
  TinyProblem p = oracle::random_problem(rng, 2, 4, 0.01);
  const std::size_t i = argmax_abs(oracle::loss_covariances(p));
  const oracle::DerivativeResult d = oracle::drho_derivative(p, i);
  // Reflecting l about its posterior mean is -l up to a constant, and a
  // constant test loss offset leaves d ln<P>/d rho_i unchanged.
  const oracle::LossFn original = p.test_loss;
  p.test_loss = [original](std::span<const double> w) { return -original(w); };
  const oracle::DerivativeResult flipped = oracle::drho_derivative(p, i);
  const bool ok = (d.exact_fd > 0) != (flipped.exact_fd > 0) &&
                  std::abs(d.covariance + flipped.covariance) <= 1e-12;
  return {"derivative.antisymmetry",
          printf_string("fd = %.4g, reflected fd = %.4g", d.exact_fd, flipped.exact_fd),
          "opposite signs", ok};
}

// Picks the training sample with the largest positive loss covariance; when
// none is positive, makes the test loss a copy of training loss 0.
std::size_t positively_correlated(TinyProblem& p) {
  std::vector<double> cov = oracle::loss_covariances(p);
  const auto best = std::max_element(cov.begin(), cov.end());
  if (*best > 0.0) return static_cast<std::size_t>(best - cov.begin());
  p.test_loss = p.train_losses[0];
  return 0;
}

CheckResult monotonicity(std::mt19937_64& rng, int count) {
  int increased = 0;
  for (int n = 0; n < count; ++n) {
    TinyProblem p = oracle::random_problem(rng, 2, 4, 0.01);
    const std::size_t i = positively_correlated(p);
    if (oracle::drho_derivative(p, i).exact_fd > 0.0) ++increased;
  }
  return {"attention.monotonicity",
          printf_string("%d/%d predictive increases with rho_i", increased, count),
          "all", increased == count};
}

CheckResult update_direction(std::mt19937_64& rng) {
  // Move rho_i by -/+ eta * c, where c is the loss covariance, and compare
  // the exact predictive before and after.
  TinyProblem p = oracle::random_problem(rng, 2, 4, 0.05);
  const std::size_t i = positively_correlated(p);
  const double c = oracle::loss_covariances(p)[i];
  const double eta = 0.5 / c;
  const double base = oracle::exact_predictive(p).value;
  TinyProblem descent = p;
  descent.rho[i] -= eta * c;
  TinyProblem ascent = p;
  ascent.rho[i] += eta * c;
  const double down = oracle::exact_predictive(descent).value;
  const double up = oracle::exact_predictive(ascent).value;
  return {"attention.update_direction",
          printf_string("base %.9f, descent step %.9f, ascent step %.9f; "
                        "ascent raises the predictive",
                        base, down, up),
          "descent lowers, ascent raises", down < base && up > base};
}

CheckResult linearized_expansion(std::mt19937_64& rng, int count) {
  double worst = 0.0;
  for (int n = 0; n < count; ++n) {
    const TinyProblem p = oracle::random_problem(rng, 2, 4, 0.01);
    const std::size_t i = argmax_abs(oracle::loss_covariances(p));
    const oracle::DerivativeResult d = oracle::drho_derivative(p, i);
    worst = std::max(worst, std::abs(d.linearized - d.covariance) / std::abs(d.covariance));
  }
  return {"derivative.linearized_expansion",
          printf_string("max |sum var dl_i dl - cov|/|cov| = %.3f over %d", worst, count),
          "not asserted", true, true};
}

CheckResult mc_crosscheck(std::mt19937_64& rng, std::size_t draws) {
  TinyProblem p = oracle::random_problem(rng, 2, 4, 0.1);
  const double quad = oracle::exact_predictive(p).value;
  const double mc = oracle::mc_predictive(p, draws, rng());
  const double err = std::abs(mc - quad) / quad;
  return {"predictive.monte_carlo_2d",
          printf_string("quadrature %.6f MC %.6f (%zu draws)", quad, mc, draws),
          "5e-3 relative", err <= 5e-3};
}

CheckResult mc_high_dim(std::mt19937_64& rng, std::size_t draws) {
  TinyProblem p = oracle::random_problem(rng, 5, 4, 0.1);
  const double a = oracle::mc_predictive(p, draws, rng());
  const double b = oracle::mc_predictive(p, draws, rng());
  const bool ok = a > 0.0 && a <= 1.0 && std::abs(a - b) <= 1e-2 * a;
  return {"predictive.monte_carlo_5d",
          printf_string("two seeds: %.6f %.6f (%zu draws)", a, b, draws),
          "in (0, 1], seeds within 1e-2", ok};
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

CheckResult step_gradient_fd(std::mt19937_64& rng, int instances) {
  Architecture arch{2, 2, 2, 3};
  double worst = 0.0;
  for (int n = 0; n < instances; ++n) {
    ModelParams params = ModelParams::random(arch, rng());
    for (double& m : params.v.map.mean) m *= 10.0;
    for (double& m : params.u.embed.mean) m *= 10.0;
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<Symbol> seq(6);
    for (Symbol& s : seq) s = static_cast<Symbol>(byte(rng));
    const std::vector<Sample> samples = make_samples(seq, arch.context_length);
    const std::vector<Sample> batch(samples.begin() + 2, samples.end());
    const StepDraw draw = draw_step(arch, batch.size(), rng);
    const StepGradients g = step_gradients(params, batch, draw);
    std::uniform_int_distribution<std::size_t> pick_map(0, g.map.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_enc(0, g.encoder.size() - 1);
    const double h = 1e-5;
    auto probe = [&](std::vector<double>& means, std::size_t j, double analytic) {
      const double x = means[j];
      means[j] = x + h;
      const double up = step_objective(params, batch, draw);
      means[j] = x - h;
      const double down = step_objective(params, batch, draw);
      means[j] = x;
      worst = std::max(worst, relative_error((up - down) / (2 * h), analytic));
    };
    for (int k = 0; k < 10; ++k) {
      const std::size_t j = pick_map(rng);
      probe(params.v.map.mean, j, g.map[j]);
    }
    const EncoderLayout layout(arch);
    for (std::size_t k = 0; k < arch.latent_dim; ++k) {
      probe(params.v.encoder.mean, layout.bias() + k, g.encoder[layout.bias() + k]);
      probe(params.v.encoder.mean, layout.log_variance() + k,
            g.encoder[layout.log_variance() + k]);
    }
    const std::size_t e = pick_enc(rng);
    probe(params.v.encoder.mean, e, g.encoder[e]);
  }
  return {"gradients.step_objective_fd",
          printf_string("max relative error %.3g over %d instances", worst, instances),
          "<= 1e-4", worst <= 1e-4};
}

}  // namespace

std::vector<CheckResult> run_oracle_suite(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed);
  const int mixtures = options.quick ? 200 : 1000;
  const int problems = options.quick ? 20 : 100;
  const std::size_t draws = options.quick ? 100000 : 1000000;

  std::vector<CheckResult> out;
  out.push_back(jensen_single(rng, 100));
  out.push_back(jensen_example());
  for (CheckResult& r : jensen_sweep(rng, mixtures)) out.push_back(std::move(r));
  out.push_back(prior_limit());
  out.push_back(constant_test_loss(rng));
  out.push_back(gaussian_closed_form());
  out.push_back(grid_gate(rng));
  out.push_back(mc_crosscheck(rng, draws));
  out.push_back(mc_high_dim(rng, draws));
  out.push_back(small_loss_agreement(rng, problems));
  out.push_back(sign_agreement(rng, problems));
  out.push_back(constant_train_loss(rng));
  out.push_back(antisymmetry(rng));
  out.push_back(linearized_expansion(rng, options.quick ? 5 : 20));
  out.push_back(monotonicity(rng, problems));
  out.push_back(update_direction(rng));
  out.push_back(step_gradient_fd(rng, options.quick ? 5 : 20));
  return out;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::string out;
  for (const CheckResult& r : results) {
    const char* verdict = r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL");
    out += printf_string("[%s] %-36s %s  (tolerance: %s)\n", verdict, r.name.c_str(),
                         r.values.c_str(), r.tolerance.c_str());
  }
  out += all_passed(results) ? "all checks passed\n" : "some checks FAILED\n";
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) {
    return r.informational || r.passed;
  });
}

}  // namespace banz
