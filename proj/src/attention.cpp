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

#include "banz/attention.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "banz/error.hpp"

namespace banz {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2 pi)

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

void check_latent(std::span<const double> z, const Architecture& arch) {
  if (z.size() != arch.latent_dim) {
    throw ConfigError("latent code has dimension " + std::to_string(z.size()) +
                      ", expected " + std::to_string(arch.latent_dim));
  }
}

}  // namespace

EncoderLayout::EncoderLayout(const Architecture& arch)
    : latent_dim(arch.latent_dim),
      bias_offset(arch.context_length * kAlphabetSize * arch.latent_dim) {}

EncoderPosterior encode(const Context& context, const HyperNetParams& v,
                        const Architecture& arch) {
  const EncoderLayout layout(arch);
  const std::size_t d = arch.latent_dim;
  const double* m = v.encoder.mean.data();
  EncoderPosterior post;
  post.mean.assign(m + layout.bias(), m + layout.bias() + d);
  for (std::size_t p = 0; p < context.size(); ++p) {
    const double* row = m + layout.embedding(p, context[p]);
    for (std::size_t k = 0; k < d; ++k) post.mean[k] += row[k];
  }
  post.variance.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    post.variance[k] = kEncoderInitVariance * std::exp(m[layout.log_variance() + k]);
  }
  return post;
}

std::vector<double> sample_z(const EncoderPosterior& post,
                             std::span<const double> noise) {
  assert(noise.size() == post.mean.size());
  std::vector<double> z(post.mean.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    z[k] = post.mean[k] + std::sqrt(post.variance[k]) * noise[k];
  }
  return z;
}

std::vector<double> context_embedding(const Context& context,
                                      const DecoderParams& u,
                                      const Architecture& arch) {
  const EncoderLayout layout(arch);  // decoder embedding shares the layout
  const std::size_t d = arch.latent_dim;
  std::vector<double> e(d, 0.0);
  for (std::size_t p = 0; p < context.size(); ++p) {
    const double* row = &u.embed.mean[layout.embedding(p, context[p])];
    for (std::size_t k = 0; k < d; ++k) e[k] += row[k];
  }
  return e;
}

double decoder_log_score(const Context& context, std::span<const double> z,
                         const DecoderParams& u, const Architecture& arch) {
  check_latent(z, arch);
  const double g = dot(context_embedding(context, u, arch), z);
  return std::clamp(g, -kScoreClamp, kScoreClamp);
}

double decoder_score(const Context& context, std::span<const double> z,
                     const DecoderParams& u, const Architecture& arch) {
  return std::exp(decoder_log_score(context, z, u, arch));
}

std::vector<double> importance(std::span<const double> scores) {
  if (scores.empty()) throw ConfigError("importance needs at least one score");
  double total = 0.0;
  for (double s : scores) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw NumericError("decoder scores must be positive and finite");
    }
    total += s;
  }
  const double scale = static_cast<double>(scores.size()) / total;
  std::vector<double> rho(scores.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = scores[i] * scale;
  return rho;
}

BatchAttention score_batch(std::span<const Sample> batch,
                           std::span<const double> z, const DecoderParams& u,
                           const Architecture& arch) {
  check_latent(z, arch);
  const std::size_t d = arch.latent_dim;
  BatchAttention att;
  att.latent_dim = d;
  att.embeddings.reserve(batch.size() * d);
  att.log_scores.resize(batch.size());
  att.saturated.resize(batch.size());
  std::vector<double> scores(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const std::vector<double> e = context_embedding(batch[j].context, u, arch);
    att.embeddings.insert(att.embeddings.end(), e.begin(), e.end());
    const double g = dot(e, z);
    att.saturated[j] = std::abs(g) > kScoreClamp;
    att.log_scores[j] = std::clamp(g, -kScoreClamp, kScoreClamp);
    scores[j] = std::exp(att.log_scores[j]);
  }
  att.rho = importance(scores);
  return att;
}

std::vector<double> importance_grad_z(const BatchAttention& att, std::size_t i) {
  // d rho_i = rho_i * (d g_i - sum_j (rho_j / B) d g_j), d g_j / d z = e_j.
  const std::size_t d = att.latent_dim;
  const double batch = static_cast<double>(att.rho.size());
  std::vector<double> mean_e(d, 0.0);
  for (std::size_t j = 0; j < att.rho.size(); ++j) {
    if (att.saturated[j]) continue;
    const double wj = att.rho[j] / batch;
    for (std::size_t k = 0; k < d; ++k) mean_e[k] += wj * att.embeddings[j * d + k];
  }
  std::vector<double> grad(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double own = att.saturated[i] ? 0.0 : att.embeddings[i * d + k];
    grad[k] = att.rho[i] * (own - mean_e[k]);
  }
  return grad;
}

std::vector<double> importance_grad_u(const BatchAttention& att,
                                      std::span<const Sample> batch,
                                      std::span<const double> z, std::size_t i,
                                      const Architecture& arch) {
  // d g_j / d U[p][c] = z when s_j[p] == c.
  const EncoderLayout layout(arch);
  const std::size_t d = arch.latent_dim;
  const double batch_size = static_cast<double>(batch.size());
  std::vector<double> grad(arch.decoder_size(), 0.0);
  auto add = [&](const Context& ctx, double coeff) {
    for (std::size_t p = 0; p < ctx.size(); ++p) {
      double* row = &grad[layout.embedding(p, ctx[p])];
      for (std::size_t k = 0; k < d; ++k) row[k] += coeff * z[k];
    }
  };
  const double rho_i = att.rho[i];
  if (!att.saturated[i]) add(batch[i].context, rho_i);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (att.saturated[j]) continue;
    add(batch[j].context, -rho_i * att.rho[j] / batch_size);
  }
  return grad;
}

double log_standard_normal(std::span<const double> z) {
  return -0.5 * (static_cast<double>(z.size()) * kLog2Pi + dot(z, z));
}

double log_density(const EncoderPosterior& post, std::span<const double> z) {
  double acc = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double r = z[k] - post.mean[k];
    acc += kLog2Pi + std::log(post.variance[k]) + r * r / post.variance[k];
  }
  return -0.5 * acc;
}

double regularizer(const Context& context, std::span<const double> z,
                   const DecoderParams& u, const HyperNetParams& v,
                   const Architecture& arch) {
  const EncoderPosterior post = encode(context, v, arch);
  return decoder_log_score(context, z, u, arch) + log_standard_normal(z) -
         log_density(post, z);
}

double regularizer_reparam(const Context& context, std::span<const double> noise,
                           const DecoderParams& u, const HyperNetParams& v,
                           const Architecture& arch) {
  const EncoderPosterior post = encode(context, v, arch);
  const std::vector<double> z = sample_z(post, noise);
  return decoder_log_score(context, z, u, arch) + log_standard_normal(z) -
         log_density(post, z);
}

void encoder_pullback(const Context& context, const EncoderPosterior& post,
                      std::span<const double> noise, std::span<const double> dz,
                      const Architecture& arch, std::span<double> grad_encoder) {
  const EncoderLayout layout(arch);
  const std::size_t d = arch.latent_dim;
  assert(grad_encoder.size() == arch.encoder_size());
  for (std::size_t p = 0; p < context.size(); ++p) {
    double* row = &grad_encoder[layout.embedding(p, context[p])];
    for (std::size_t k = 0; k < d; ++k) row[k] += dz[k];
  }
  for (std::size_t k = 0; k < d; ++k) {
    grad_encoder[layout.bias() + k] += dz[k];
    // dz_k / d logvar_k = sqrt(variance_k) * noise_k / 2
    grad_encoder[layout.log_variance() + k] +=
        dz[k] * 0.5 * std::sqrt(post.variance[k]) * noise[k];
  }
}

std::vector<double> regularizer_grad_v(const Context& context,
                                       std::span<const double> noise,
                                       const DecoderParams& u,
                                       const HyperNetParams& v,
                                       const Architecture& arch) {
  const EncoderPosterior post = encode(context, v, arch);
  const std::vector<double> z = sample_z(post, noise);
  const std::vector<double> e = context_embedding(context, u, arch);
  const bool saturated = std::abs(dot(e, z)) > kScoreClamp;
  const std::size_t d = arch.latent_dim;

  // Under the reparameterization -ln q = sum_k (ln(2 pi var_k) + noise_k^2) / 2,
  // so only its log-variance derivative (1/2) survives.
  std::vector<double> dz(d);
  for (std::size_t k = 0; k < d; ++k) dz[k] = (saturated ? 0.0 : e[k]) - z[k];
  std::vector<double> grad(arch.encoder_size(), 0.0);
  encoder_pullback(context, post, noise, dz, arch, grad);
  const EncoderLayout layout(arch);
  for (std::size_t k = 0; k < d; ++k) grad[layout.log_variance() + k] += 0.5;
  return grad;
}

double loss_correlation(std::span<const double> grad_train,
                        std::span<const double> grad_test,
                        std::span<const double> weight_variance, std::size_t K) {
  assert(grad_train.size() == grad_test.size());
  assert(weight_variance.size() == grad_test.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < grad_train.size(); ++j) {
    acc += weight_variance[j] * grad_train[j] * grad_test[j];
  }
  return acc / static_cast<double>(K);
}

std::vector<double> attention_grad_u(const Sample& train, const Sample& test,
                                     std::span<const double> w,
                                     std::span<const double> weight_variance,
                                     std::span<const double> rho_row,
                                     std::size_t K, const Predictor& predictor) {
  std::vector<double> g_train(predictor.size());
  std::vector<double> g_test(predictor.size());
  predictor.loss_and_grad(train, w, g_train);
  predictor.loss_and_grad(test, w, g_test);
  const double c = loss_correlation(g_train, g_test, weight_variance, K);
  std::vector<double> grad(rho_row.begin(), rho_row.end());
  for (double& g : grad) g *= c;
  return grad;
}

}  // namespace banz
