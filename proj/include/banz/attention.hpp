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

#ifndef BANZ_ATTENTION_HPP_
#define BANZ_ATTENTION_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "banz/gaussnet.hpp"
#include "banz/model.hpp"
#include "banz/seqmodel.hpp"

namespace banz {

// Encoder variance when the log-variance offsets are zero. With all-zero
// encoder means the posterior is the standard normal prior.
inline constexpr double kEncoderInitVariance = 0.01;

// Decoder log-scores are clamped to [-kScoreClamp, kScoreClamp].
inline constexpr double kScoreClamp = 30.0;

// Diagonal Gaussian q(z | s).
struct EncoderPosterior {
  std::vector<double> mean;
  std::vector<double> variance;
};

// Offsets into HyperNetParams::encoder. Layout: per-position byte
// embeddings [l x 256 x d], mean bias [d], log-variance offsets [d].
struct EncoderLayout {
  explicit EncoderLayout(const Architecture& arch);
  std::size_t embedding(std::size_t position, Symbol byte) const {
    return (position * kAlphabetSize + byte) * latent_dim;
  }
  std::size_t bias() const { return bias_offset; }
  std::size_t log_variance() const { return bias_offset + latent_dim; }

  std::size_t latent_dim;
  std::size_t bias_offset;
};

// mean = bias + sum_p E[p][s_p]; variance_k = kEncoderInitVariance *
// exp(logvar_k). Uses only the means of v.
EncoderPosterior encode(const Context& context, const HyperNetParams& v,
                        const Architecture& arch);

// z = mean + sqrt(variance) * noise.
std::vector<double> sample_z(const EncoderPosterior& post,
                             std::span<const double> noise);

// Decoder embedding embed_u(s) = sum_p U[p][s_p] (the means of u).
std::vector<double> context_embedding(const Context& context,
                                      const DecoderParams& u,
                                      const Architecture& arch);

// <embed_u(s), z> clamped to [-kScoreClamp, kScoreClamp].
double decoder_log_score(const Context& context, std::span<const double> z,
                         const DecoderParams& u, const Architecture& arch);

// exp(decoder_log_score); strictly positive and finite.
double decoder_score(const Context& context, std::span<const double> z,
                     const DecoderParams& u, const Architecture& arch);

// rho_i = B * score_i / sum_j score_j. Requires B >= 1 and positive scores.
std::vector<double> importance(std::span<const double> scores);

// Decoder scores and importance factors of a batch for one latent code,
// with what is needed to differentiate them.
struct BatchAttention {
  std::size_t latent_dim = 0;
  std::vector<double> embeddings;  // B x d, row j = embed_u(s_j)
  std::vector<double> log_scores;  // clamped
  std::vector<bool> saturated;     // clamp active, zero derivative
  std::vector<double> rho;
};

BatchAttention score_batch(std::span<const Sample> batch,
                           std::span<const double> z, const DecoderParams& u,
                           const Architecture& arch);

// d rho_i / d z.
std::vector<double> importance_grad_z(const BatchAttention& att, std::size_t i);

// d rho_i / d u (means of the decoder embedding), dense.
std::vector<double> importance_grad_u(const BatchAttention& att,
                                      std::span<const Sample> batch,
                                      std::span<const double> z, std::size_t i,
                                      const Architecture& arch);

double log_standard_normal(std::span<const double> z);
double log_density(const EncoderPosterior& post, std::span<const double> z);

// ln score(s, z) + ln N(z; 0, I) - ln q(z | s, v), evaluated at the given z.
double regularizer(const Context& context, std::span<const double> z,
                   const DecoderParams& u, const HyperNetParams& v,
                   const Architecture& arch);

// The regularizer at z = mean + sqrt(variance) * noise, as a function of v.
double regularizer_reparam(const Context& context, std::span<const double> noise,
                           const DecoderParams& u, const HyperNetParams& v,
                           const Architecture& arch);

// Gradient of regularizer_reparam with respect to the encoder means.
std::vector<double> regularizer_grad_v(const Context& context,
                                       std::span<const double> noise,
                                       const DecoderParams& u,
                                       const HyperNetParams& v,
                                       const Architecture& arch);

// Accumulates dJ/dz into encoder-mean gradients through
// z = mean + sqrt(variance) * noise. Adds into grad_encoder.
void encoder_pullback(const Context& context, const EncoderPosterior& post,
                      std::span<const double> noise, std::span<const double> dz,
                      const Architecture& arch, std::span<double> grad_encoder);

// c = sum_j (variance_j / K) * grad_train_j * grad_test_j.
double loss_correlation(std::span<const double> grad_train,
                        std::span<const double> grad_test,
                        std::span<const double> weight_variance, std::size_t K);

// Loss-correlation attention gradient: c * rho_row, where rho_row is
// d rho_i / d u and c the correlation of the two loss gradients at w.
std::vector<double> attention_grad_u(const Sample& train, const Sample& test,
                                     std::span<const double> w,
                                     std::span<const double> weight_variance,
                                     std::span<const double> rho_row,
                                     std::size_t K, const Predictor& predictor);

}  // namespace banz

#endif  // BANZ_ATTENTION_HPP_
