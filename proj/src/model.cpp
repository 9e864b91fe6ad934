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

#include "banz/model.hpp"

#include "banz/error.hpp"

namespace banz {

void Architecture::validate() const {
  if (context_length == 0 || latent_dim == 0 || embed_dim == 0 ||
      hidden_dim == 0) {
    throw ConfigError("architecture sizes must be positive");
  }
  if (context_length > 255 || latent_dim > 255) {
    throw ConfigError("context length and latent dimension must be <= 255");
  }
  if (embed_dim > 4096 || hidden_dim > 4096) {
    throw ConfigError("embedding and hidden sizes must be <= 4096");
  }
}

std::size_t Architecture::predictor_size() const {
  return kAlphabetSize * embed_dim                // byte embedding
         + hidden_dim * input_dim() + hidden_dim  // hidden layer
         + kAlphabetSize * hidden_dim + kAlphabetSize;  // output layer
}

ModelParams ModelParams::zeros(const Architecture& arch) {
  arch.validate();
  ModelParams p;
  p.arch = arch;
  p.v.map = GaussianBlock(arch.map_size(), kInitPrecision);
  p.v.encoder = GaussianBlock(arch.encoder_size(), kInitPrecision);
  p.u.embed = GaussianBlock(arch.decoder_size(), kInitPrecision);
  return p;
}

ModelParams ModelParams::random(const Architecture& arch, std::uint64_t seed) {
  ModelParams p = zeros(arch);
  std::mt19937_64 rng(seed);
  p.v.map.randomize_means(rng, kInitMeanHalfWidth);
  p.v.encoder.randomize_means(rng, kInitMeanHalfWidth);
  p.u.embed.randomize_means(rng, kInitMeanHalfWidth);
  return p;
}

}  // namespace banz
