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

#include "banz/trainer.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <numeric>

#include <boost/random/normal_distribution.hpp>

#include "banz/attention.hpp"
#include "banz/error.hpp"
#include "banz/gaussnet.hpp"

namespace banz {

void TrainConfig::validate() const {
  arch.validate();
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch < 2) throw ConfigError("batch size must be at least 2");
}

StepDraw draw_step(const Architecture& arch, std::size_t batch_size,
                   std::mt19937_64& rng) {
  StepDraw draw;
  draw.train_index =
      std::uniform_int_distribution<std::size_t>(0, batch_size - 2)(rng);
  boost::random::normal_distribution<double> normal;
  draw.noise_z.resize(arch.latent_dim);
  for (double& x : draw.noise_z) x = normal(rng);
  draw.noise_w.resize(arch.predictor_size());
  for (double& x : draw.noise_w) x = normal(rng);
  return draw;
}

namespace {

std::vector<double> weight_variance(const ModelParams& params) {
  const std::size_t stride = 1 + params.arch.latent_dim;
  std::vector<double> var(params.arch.predictor_size());
  for (std::size_t j = 0; j < var.size(); ++j) {
    var[j] = 1.0 / params.v.map.precision[j * stride];
  }
  return var;
}

// Exponent bits all set means inf or nan.
bool all_finite(std::span<const double> xs) {
  constexpr std::uint64_t kExponent = 0x7ff0000000000000ULL;
  std::uint64_t bad = 0;
  for (double x : xs) {
    bad |= static_cast<std::uint64_t>((std::bit_cast<std::uint64_t>(x) & kExponent) == kExponent);
  }
  return bad == 0;
}

}  // namespace

StepGradients step_gradients(const ModelParams& params,
                             std::span<const Sample> batch,
                             const StepDraw& draw) {
  const Architecture& arch = params.arch;
  const std::size_t n = batch.size();
  const std::size_t d = arch.latent_dim;
  const std::size_t i = draw.train_index;
  const Sample& test = batch[n - 1];
  const Predictor predictor(arch);

  const EncoderPosterior post = encode(test.context, params.v, arch);
  StepGradients g;
  g.z = sample_z(post, draw.noise_z);
  g.w = sample_weights(weight_stats(g.z, params.v, arch), draw.noise_w);
  const BatchAttention att = score_batch(batch, g.z, params.u, arch);
  g.rho = att.rho;

  std::vector<double> grad_train(predictor.size());
  std::vector<double> grad_test(predictor.size());
  g.train_loss = predictor.loss_and_grad(batch[i], g.w, grad_train);
  g.test_loss = predictor.loss_and_grad(test, g.w, grad_test);
  const bool capped = g.train_loss >= kLossCap;
  const double train_loss = std::min(g.train_loss, kLossCap);
  const double rho_i = att.rho[i];

  g.regularizer = att.log_scores[n - 1] + log_standard_normal(g.z) -
                  log_density(post, g.z);
  g.objective = rho_i * train_loss - g.regularizer;

  // Through w: d(rho_i * l_i)/dw, pulled back to the map and to z.
  std::vector<double> grad_w(predictor.size(), 0.0);
  if (!capped) {
    for (std::size_t j = 0; j < grad_w.size(); ++j) grad_w[j] = rho_i * grad_train[j];
  }
  g.map.resize(arch.map_size());
  std::vector<double> dz(d);
  pullback_to_map(grad_w, g.z, params.v, arch, g.map, dz);

  // Through rho_i(z) and the regularizer's explicit z-dependence.
  const std::vector<double> drho_dz = importance_grad_z(att, i);
  const bool test_saturated = att.saturated[n - 1];
  for (std::size_t k = 0; k < d; ++k) {
    const double e = test_saturated ? 0.0 : att.embeddings[(n - 1) * d + k];
    dz[k] += train_loss * drho_dz[k] - (e - g.z[k]);
  }
  g.encoder.assign(arch.encoder_size(), 0.0);
  encoder_pullback(test.context, post, draw.noise_z, dz, arch, g.encoder);
  const EncoderLayout layout(arch);
  for (std::size_t k = 0; k < d; ++k) g.encoder[layout.log_variance() + k] -= 0.5;

  // Decoder: loss correlation times d rho_i / d u.
  g.correlation = loss_correlation(grad_train, grad_test, weight_variance(params), n);
  g.decoder = importance_grad_u(att, batch, g.z, i, arch);
  for (double& x : g.decoder) x *= g.correlation;
  return g;
}

double step_objective(const ModelParams& params, std::span<const Sample> batch,
                      const StepDraw& draw) {
  const Architecture& arch = params.arch;
  const Sample& test = batch[batch.size() - 1];
  const EncoderPosterior post = encode(test.context, params.v, arch);
  const std::vector<double> z = sample_z(post, draw.noise_z);
  const std::vector<double> w =
      sample_weights(weight_stats(z, params.v, arch), draw.noise_w);
  std::vector<double> scores(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    scores[j] = decoder_score(batch[j].context, z, params.u, arch);
  }
  const double rho_i = importance(scores)[draw.train_index];
  const double loss =
      std::min(Predictor(arch).loss(batch[draw.train_index], w), kLossCap);
  return rho_i * loss - regularizer(test.context, z, params.u, params.v, arch);
}

double complete_loss(const ModelParams& params, std::span<const Sample> batch,
                     std::span<const double> z, std::span<const double> w) {
  const Architecture& arch = params.arch;
  const Predictor predictor(arch);
  const BatchAttention att = score_batch(batch, z, params.u, arch);
  const std::size_t n = batch.size();
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    total += att.rho[j] * std::min(predictor.loss(batch[j], w), kLossCap);
  }
  const double test_loss = std::min(predictor.loss(batch[n - 1], w), kLossCap);
  const double reg = regularizer(batch[n - 1].context, z, params.u, params.v, arch);
  return total - test_loss * total - reg;
}

StepReport train_step(TrainState& state, std::span<const Sample> batch,
                      std::mt19937_64& rng, const TrainConfig& config) {
  if (batch.size() != config.batch) {
    throw ConfigError("batch has " + std::to_string(batch.size()) +
                      " samples, expected " + std::to_string(config.batch));
  }
  const StepDraw draw = draw_step(state.params.arch, batch.size(), rng);
  StepReport report;
  report.train_index = draw.train_index;

  StepGradients g;
  try {
    g = step_gradients(state.params, batch, draw);
  } catch (const NumericError&) {
    return report;
  }
  if (!std::isfinite(g.objective) || !all_finite(g.map) ||
      !all_finite(g.encoder) || !all_finite(g.decoder)) {
    return report;
  }
  report.accepted = true;
  report.rho_sum = std::accumulate(g.rho.begin(), g.rho.end(), 0.0);
  report.test_loss = g.test_loss;
  report.correlation = g.correlation;
  report.complete_loss = complete_loss(state.params, batch, g.z, g.w);

  const double rate = config.learning_rate();
  const double sign = config.sign == AttentionSign::kDescent ? 1.0 : -1.0;
  state.params.v.map.apply(g.map, rate);
  state.params.v.encoder.apply(g.encoder, rate);
  state.params.u.embed.apply(g.decoder, rate, sign);
  ++state.steps;
  return report;
}

ModelSnapshot train(std::span<const Symbol> corpus, const TrainConfig& config,
                    const TrainHooks& hooks) {
  config.validate();
  if (corpus.empty()) throw ConfigError("training corpus is empty");
  if (corpus.size() < config.batch) {
    throw ConfigError("training corpus is shorter than the batch size");
  }
  const std::vector<Sample> samples = make_samples(corpus, config.arch.context_length);
  const std::size_t n = samples.size();
  const std::size_t b = config.batch;

  TrainState state;
  state.params = ModelParams::random(config.arch, config.seed);
  std::seed_seq seq{config.seed, std::uint64_t{0x5eed}};
  std::mt19937_64 rng(seq);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Sample> batch(b);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    EpochStats stats;
    stats.epoch = epoch + 1;
    std::size_t accepted = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
      for (std::size_t k = 0; k + 1 < b; ++k) batch[k] = samples[order[(pos + 1 + k) % n]];
      batch[b - 1] = samples[order[pos]];
      const StepReport report = train_step(state, batch, rng, config);
      if (report.accepted) {
        ++accepted;
        stats.mean_complete_loss += report.complete_loss;
        stats.bits_per_byte += report.test_loss / std::numbers::ln2;
      } else {
        ++stats.rejected;
        std::fprintf(stderr, "banz: rejected non-finite step %zu in epoch %zu\n",
                     pos, epoch + 1);
      }
      if (hooks.on_step) hooks.on_step(report, state);
    }
    ++state.epoch;
    if (accepted > 0) {
      stats.mean_complete_loss /= static_cast<double>(accepted);
      stats.bits_per_byte /= static_cast<double>(accepted);
    }
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (hooks.on_epoch) hooks.on_epoch(stats, state);
  }

  ModelSnapshot snapshot;
  snapshot.params = std::move(state.params);
  snapshot.meta.epochs = static_cast<std::uint32_t>(config.epochs);
  snapshot.meta.batch = static_cast<std::uint32_t>(config.batch);
  snapshot.meta.seed = config.seed;
  snapshot.meta.sign = config.sign;
  return snapshot;
}

std::string format_epoch(const EpochStats& stats) {
  char line[160];
  std::snprintf(line, sizeof line,
                "epoch %zu  loss %.4f  bits/byte %.4f  time %.2fs", stats.epoch,
                stats.mean_complete_loss, stats.bits_per_byte, stats.seconds);
  std::string out(line);
  if (stats.rejected > 0) out += "  rejected " + std::to_string(stats.rejected);
  return out;
}

}  // namespace banz
