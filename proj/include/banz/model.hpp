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

#ifndef BANZ_MODEL_HPP_
#define BANZ_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <random>

#include "banz/gaussian.hpp"
#include "banz/seqmodel.hpp"

namespace banz {

// Shape of every network in the model.
//
// Predictor: context bytes -> shared embedding (embed_dim per position) ->
// concatenation -> tanh hidden layer -> 256-way softmax.
// Hypernetwork: each predictor weight is an affine function of the latent
// code z (latent_dim entries).
// Encoder/decoder: per-position byte embeddings into latent space.
struct Architecture {
  std::size_t context_length = 8;
  std::size_t latent_dim = 8;
  std::size_t embed_dim = 16;
  std::size_t hidden_dim = 64;

  // Throws ConfigError on zero sizes or values that do not fit the
  // container header.
  void validate() const;

  std::size_t input_dim() const { return context_length * embed_dim; }
  // Number of predictor weights P.
  std::size_t predictor_size() const;
  // Hypernetwork coefficients: P rows of (1 + latent_dim).
  std::size_t map_size() const { return predictor_size() * (1 + latent_dim); }
  // Encoder: byte embeddings, mean bias, log-variance offsets.
  std::size_t encoder_size() const {
    return context_length * kAlphabetSize * latent_dim + 2 * latent_dim;
  }
  std::size_t decoder_size() const {
    return context_length * kAlphabetSize * latent_dim;
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

// Initial hyper-precision (variance 0.01) and half-width of the uniform
// initialization of hyper-means.
inline constexpr double kInitPrecision = 100.0;
inline constexpr double kInitMeanHalfWidth = 0.05;

// The v-parameters: the hypernetwork map and the encoder network.
struct HyperNetParams {
  GaussianBlock map;
  GaussianBlock encoder;

  friend bool operator==(const HyperNetParams&, const HyperNetParams&) = default;
};

// The u-parameters: the decoder's context embedding.
struct DecoderParams {
  GaussianBlock embed;

  friend bool operator==(const DecoderParams&, const DecoderParams&) = default;
};

struct ModelParams {
  Architecture arch;
  HyperNetParams v;
  DecoderParams u;

  // All means zero, all precisions kInitPrecision. Predicts the uniform PMF.
  static ModelParams zeros(const Architecture& arch);
  // Means ~ Uniform[-0.05, 0.05], precisions kInitPrecision.
  static ModelParams random(const Architecture& arch, std::uint64_t seed);

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

}  // namespace banz

#endif  // BANZ_MODEL_HPP_
