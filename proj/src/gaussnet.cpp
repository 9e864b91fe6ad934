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

#include "banz/gaussnet.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "banz/error.hpp"

namespace banz {

Predictor::Predictor(const Architecture& arch) : arch_(arch) {
  arch_.validate();
  const std::size_t e = arch_.embed_dim;
  const std::size_t h = arch_.hidden_dim;
  hidden_offset_ = kAlphabetSize * e;
  hidden_bias_offset_ = hidden_offset_ + h * arch_.input_dim();
  output_offset_ = hidden_bias_offset_ + h;
  output_bias_offset_ = output_offset_ + kAlphabetSize * h;
  size_ = output_bias_offset_ + kAlphabetSize;
  assert(size_ == arch_.predictor_size());
}

void Predictor::forward(const Context& context, std::span<const double> w,
                        Activations& act) const {
  assert(w.size() == size_);
  assert(context.size() == arch_.context_length);
  const std::size_t e = arch_.embed_dim;
  const std::size_t in = arch_.input_dim();
  const std::size_t hd = arch_.hidden_dim;

  act.input.resize(in);
  for (std::size_t p = 0; p < context.size(); ++p) {
    const double* row = &w[context[p] * e];
    std::copy(row, row + e, act.input.begin() + p * e);
  }

  act.hidden.resize(hd);
  for (std::size_t j = 0; j < hd; ++j) {
    const double* row = &w[hidden_offset_ + j * in];
    double a = w[hidden_bias_offset_ + j];
    for (std::size_t i = 0; i < in; ++i) a += row[i] * act.input[i];
    act.hidden[j] = std::tanh(a);
  }

  // Four rows at a time; each logit still sums in order j = 0, 1, ...
  static_assert(kAlphabetSize % 4 == 0);
  const double* h = act.hidden.data();
  for (std::size_t k = 0; k < kAlphabetSize; k += 4) {
    const double* r0 = &w[output_offset_ + k * hd];
    const double* r1 = r0 + hd;
    const double* r2 = r1 + hd;
    const double* r3 = r2 + hd;
    double a0 = w[output_bias_offset_ + k];
    double a1 = w[output_bias_offset_ + k + 1];
    double a2 = w[output_bias_offset_ + k + 2];
    double a3 = w[output_bias_offset_ + k + 3];
    for (std::size_t j = 0; j < hd; ++j) {
      a0 += r0[j] * h[j];
      a1 += r1[j] * h[j];
      a2 += r2[j] * h[j];
      a3 += r3[j] * h[j];
    }
    act.logits[k] = a0;
    act.logits[k + 1] = a1;
    act.logits[k + 2] = a2;
    act.logits[k + 3] = a3;
  }
}

namespace {

// Shifts logits by their max and returns ln sum exp of the shifted values.
double shift_and_log_normalizer(Pmf& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(top)) throw NumericError("non-finite predictor logits");
  double sum = 0.0;
  for (double& x : logits) {
    if (!std::isfinite(x)) throw NumericError("non-finite predictor logits");
    x -= top;
    sum += std::exp(x);
  }
  return std::log(sum);
}

}  // namespace

Pmf Predictor::predict(const Context& context, std::span<const double> w) const {
  Activations act;
  forward(context, w, act);
  Pmf& pmf = act.logits;
  const double top = *std::max_element(pmf.begin(), pmf.end());
  if (!std::isfinite(top)) throw NumericError("non-finite predictor logits");
  double sum = 0.0;
  for (double& x : pmf) {
    if (!std::isfinite(x)) throw NumericError("non-finite predictor logits");
    x = std::exp(x - top);
    sum += x;
  }
  for (double& x : pmf) x /= sum;
  return pmf;
}

double Predictor::loss(const Sample& sample, std::span<const double> w) const {
  Activations act;
  forward(sample.context, w, act);
  const double log_z = shift_and_log_normalizer(act.logits);
  return log_z - act.logits[sample.target];
}

double Predictor::loss_and_grad(const Sample& sample, std::span<const double> w,
                                std::span<double> grad) const {
  assert(grad.size() == size_);
  Activations act;
  forward(sample.context, w, act);
  const double log_z = shift_and_log_normalizer(act.logits);
  const double loss = log_z - act.logits[sample.target];

  const std::size_t e = arch_.embed_dim;
  const std::size_t in = arch_.input_dim();
  const std::size_t hd = arch_.hidden_dim;
  std::fill(grad.begin(), grad.end(), 0.0);

  // d loss / d logit_k = p_k - [k == target]
  Pmf dlogit;
  for (std::size_t k = 0; k < kAlphabetSize; ++k) {
    dlogit[k] = std::exp(act.logits[k] - log_z);
  }
  dlogit[sample.target] -= 1.0;

  std::vector<double> dhidden(hd, 0.0);
  for (std::size_t k = 0; k < kAlphabetSize; ++k) {
    const double g = dlogit[k];
    const double* row = &w[output_offset_ + k * hd];
    double* grow = &grad[output_offset_ + k * hd];
    for (std::size_t j = 0; j < hd; ++j) {
      grow[j] = g * act.hidden[j];
      dhidden[j] += row[j] * g;
    }
    grad[output_bias_offset_ + k] = g;
  }

  std::vector<double> dinput(in, 0.0);
  for (std::size_t j = 0; j < hd; ++j) {
    const double h = act.hidden[j];
    const double da = dhidden[j] * (1.0 - h * h);
    const double* row = &w[hidden_offset_ + j * in];
    double* grow = &grad[hidden_offset_ + j * in];
    for (std::size_t i = 0; i < in; ++i) {
      grow[i] = da * act.input[i];
      dinput[i] += row[i] * da;
    }
    grad[hidden_bias_offset_ + j] = da;
  }

  for (std::size_t p = 0; p < sample.context.size(); ++p) {
    double* grow = &grad[sample.context[p] * e];
    for (std::size_t i = 0; i < e; ++i) grow[i] += dinput[p * e + i];
  }
  return loss;
}

namespace {

void check_latent(std::span<const double> z, const Architecture& arch) {
  if (z.size() != arch.latent_dim) {
    throw ConfigError("latent code has dimension " + std::to_string(z.size()) +
                      ", expected " + std::to_string(arch.latent_dim));
  }
}

double map_row(const double* coeffs, std::span<const double> z) {
  double acc = coeffs[0];
  for (std::size_t k = 0; k < z.size(); ++k) acc += coeffs[1 + k] * z[k];
  return acc;
}

}  // namespace

void mean_weights(std::span<const double> z, const HyperNetParams& v,
                  const Architecture& arch, std::span<double> out,
                  const Context* context) {
  check_latent(z, arch);
  const std::size_t stride = 1 + arch.latent_dim;
  const std::size_t n = arch.predictor_size();
  assert(out.size() == n && v.map.size() == n * stride);
  const double* means = v.map.mean.data();

  std::size_t first = 0;
  if (context != nullptr) {
    const std::size_t e = arch.embed_dim;
    std::array<bool, kAlphabetSize> seen{};
    for (Symbol s : context->symbols()) {
      if (seen[s]) continue;
      seen[s] = true;
      for (std::size_t j = s * e; j < (s + 1) * e; ++j) {
        out[j] = map_row(means + j * stride, z);
      }
    }
    first = kAlphabetSize * e;
  }
  for (std::size_t j = first; j < n; ++j) {
    out[j] = map_row(means + j * stride, z);
  }
}

WeightStats weight_stats(std::span<const double> z, const HyperNetParams& v,
                         const Architecture& arch) {
  WeightStats stats;
  stats.mean.resize(arch.predictor_size());
  mean_weights(z, v, arch, stats.mean);
  const std::size_t stride = 1 + arch.latent_dim;
  stats.stddev.resize(stats.mean.size());
  for (std::size_t j = 0; j < stats.stddev.size(); ++j) {
    stats.stddev[j] = 1.0 / std::sqrt(v.map.precision[j * stride]);
  }
  return stats;
}

std::vector<double> sample_weights(const WeightStats& stats,
                                   std::span<const double> noise) {
  assert(noise.size() == stats.mean.size());
  std::vector<double> w(stats.mean.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = stats.mean[j] + stats.stddev[j] * noise[j];
  }
  return w;
}

void pullback_to_map(std::span<const double> grad_w, std::span<const double> z,
                     const HyperNetParams& v, const Architecture& arch,
                     std::span<double> grad_map, std::span<double> grad_z) {
  check_latent(z, arch);
  const std::size_t stride = 1 + arch.latent_dim;
  assert(grad_map.size() == grad_w.size() * stride);
  assert(grad_z.size() == z.size());
  std::fill(grad_z.begin(), grad_z.end(), 0.0);
  const double* means = v.map.mean.data();
  for (std::size_t j = 0; j < grad_w.size(); ++j) {
    double* g = &grad_map[j * stride];
    const double gw = grad_w[j];
    g[0] = gw;
    const double* row = means + j * stride;
    for (std::size_t k = 0; k < z.size(); ++k) {
      g[1 + k] = gw * z[k];
      grad_z[k] += gw * row[1 + k];
    }
  }
}

HyperGrad backprop_to_v(const Sample& sample, std::span<const double> z,
                        std::span<const double> noise, const HyperNetParams& v,
                        const Architecture& arch) {
  const Predictor predictor(arch);
  const std::vector<double> w = sample_weights(weight_stats(z, v, arch), noise);
  std::vector<double> grad_w(predictor.size());
  HyperGrad out;
  out.loss = predictor.loss_and_grad(sample, w, grad_w);
  out.map.resize(arch.map_size());
  out.z.resize(arch.latent_dim);
  pullback_to_map(grad_w, z, v, arch, out.map, out.z);
  return out;
}

}  // namespace banz
