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

#ifndef BANZ_TRAINER_HPP_
#define BANZ_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "banz/model.hpp"
#include "banz/seqmodel.hpp"
#include "banz/snapshot.hpp"

namespace banz {

// Per-sample losses are capped at this many nats wherever they enter the
// objective or the complete loss.
inline constexpr double kLossCap = 30.0;

struct TrainConfig {
  std::size_t epochs = 10;  // T; the learning rate is exactly 1 / T
  std::size_t batch = 4;    // B >= 2: B - 1 training samples and a test sample
  std::uint64_t seed = 1;
  Architecture arch;
  AttentionSign sign = AttentionSign::kDescent;

  double learning_rate() const { return 1.0 / static_cast<double>(epochs); }
  // Throws ConfigError.
  void validate() const;
};

struct TrainState {
  ModelParams params;
  std::size_t epoch = 0;
  std::size_t steps = 0;
};

// Random inputs of one step: the training index and the two noise vectors.
struct StepDraw {
  std::size_t train_index = 0;
  std::vector<double> noise_z;
  std::vector<double> noise_w;
};

// Draws the training index uniformly from [0, B - 1), then noise_z and
// noise_w from the standard normal, in that order.
StepDraw draw_step(const Architecture& arch, std::size_t batch_size,
                   std::mt19937_64& rng);

// Gradients of the per-step objective
//   J(v) = rho_i(z) * min(l_i(w), cap) - R(v)
// with z = mean + sqrt(var) * noise_z, w = W z + b + stddev * noise_w and R
// the regularizer, plus the loss-correlation decoder gradient.
struct StepGradients {
  std::vector<double> map;      // dJ / d(map means)
  std::vector<double> encoder;  // dJ / d(encoder means)
  std::vector<double> decoder;  // c * d rho_i / d u
  std::vector<double> z;
  std::vector<double> w;
  std::vector<double> rho;
  double objective = 0.0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double correlation = 0.0;
  double regularizer = 0.0;
};

// The last batch element is the test sample.
StepGradients step_gradients(const ModelParams& params,
                             std::span<const Sample> batch, const StepDraw& draw);

// J(v) alone, for finite-difference checks.
double step_objective(const ModelParams& params, std::span<const Sample> batch,
                      const StepDraw& draw);

// Single-draw estimate of the complete loss,
//   L - l_test * L - R,  L = sum over training samples of rho_j * l_j,
// with losses capped at kLossCap.
double complete_loss(const ModelParams& params, std::span<const Sample> batch,
                     std::span<const double> z, std::span<const double> w);

struct StepReport {
  bool accepted = false;
  std::size_t train_index = 0;
  double rho_sum = 0.0;
  double complete_loss = 0.0;
  double test_loss = 0.0;
  double correlation = 0.0;
};

// One update step. State is untouched when any gradient is non-finite.
StepReport train_step(TrainState& state, std::span<const Sample> batch,
                      std::mt19937_64& rng, const TrainConfig& config);

struct EpochStats {
  std::size_t epoch = 0;
  double mean_complete_loss = 0.0;
  double bits_per_byte = 0.0;  // mean test loss in bits
  double seconds = 0.0;
  std::size_t rejected = 0;
};

struct TrainHooks {
  std::function<void(const StepReport&, const TrainState&)> on_step;
  std::function<void(const EpochStats&, const TrainState&)> on_epoch;
};

// Runs `epochs` passes. Each epoch shuffles sample positions with the seeded
// generator and takes one step per position: the position's sample is the
// test sample and the next B - 1 positions in shuffled order (cyclically)
// are the training part. Throws ConfigError when the corpus is shorter than
// the batch size.
ModelSnapshot train(std::span<const Symbol> corpus, const TrainConfig& config,
                    const TrainHooks& hooks = {});

// Training log line for one epoch.
std::string format_epoch(const EpochStats& stats);

}  // namespace banz

#endif  // BANZ_TRAINER_HPP_
