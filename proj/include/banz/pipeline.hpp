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

#ifndef BANZ_PIPELINE_HPP_
#define BANZ_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "banz/coder.hpp"
#include "banz/gaussnet.hpp"
#include "banz/snapshot.hpp"

namespace banz {

inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kHeaderSize = 24;

// Mode byte: bit 0 set when the model snapshot is embedded after the header,
// bit 1 set when latent codes are drawn from the encoder with a generator
// seeded by the model hash instead of taken at the encoder mean.
inline constexpr std::uint8_t kModeEmbedded = 0x01;
inline constexpr std::uint8_t kModeSampledLatent = 0x02;

// Container layout, little-endian:
//   "BANZ" | u8 version | u8 l | u8 d | u8 mode | u64 original length |
//   u64 model hash | [u64 snapshot size | snapshot] | range-coded payload
struct ContainerHeader {
  std::uint8_t version = kContainerVersion;
  std::uint8_t context_length = 0;
  std::uint8_t latent_dim = 0;
  std::uint8_t mode = 0;
  std::uint64_t original_length = 0;
  std::uint64_t model_hash = 0;

  bool embedded() const { return (mode & kModeEmbedded) != 0; }
  bool sampled_latent() const { return (mode & kModeSampledLatent) != 0; }
};

// Called once per coded symbol with the model PMF before and after
// quantization.
using PmfObserver = std::function<void(std::size_t position, const Pmf& pmf,
                                       const QuantizedPmf& quantized,
                                       Symbol symbol)>;

struct CompressOptions {
  bool embed_model = false;
  bool sample_latent = false;
  PmfObserver observer;
};

// Deterministic per-symbol prediction: context -> encoder mean z ->
// w = mean weights at z -> PMF -> quantized PMF. In sampled-latent mode z is
// drawn from the encoder posterior with a generator seeded by the model
// hash, so compress and decompress see the same draws.
// With the mean latent the result depends only on the context, so results
// are memoized per context (bounded, cleared when full). A context is stored
// on its second sighting so that inputs without repeats skip the copies.
class PredictionPath {
 public:
  explicit PredictionPath(const ModelSnapshot& snapshot, bool sample_latent = false);

  const Pmf& predict(const Context& context);
  const QuantizedPmf& quantized() const { return quantized_; }

 private:
  const ModelParams& params_;
  Predictor predictor_;
  bool sample_latent_;
  std::mt19937_64 rng_;
  // Affine map coefficients split by column: cols_[0] is the bias term and
  // cols_[1 + k] multiplies z_k.
  std::vector<std::vector<double>> cols_;
  std::vector<double> weights_;
  Pmf pmf_{};
  QuantizedPmf quantized_{};
  struct Cached {
    Pmf pmf;
    QuantizedPmf quantized;
  };
  std::vector<Cached> entries_;
  std::vector<bool> seen_;
  std::unordered_map<std::string, std::size_t> cache_;
};

std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input,
                                   const ModelSnapshot& snapshot,
                                   const CompressOptions& options = {});

// Uses the embedded model when present, otherwise `model`, which must then
// be given. Throws FormatError on a bad header, ModelMismatchError when the
// model hash differs from the header, DecodeError on a corrupt payload.
std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> container,
                                     const ModelSnapshot* model,
                                     const PmfObserver& observer = {});

ContainerHeader parse_header(std::span<const std::uint8_t> container);

struct ContainerInfo {
  ContainerHeader header;
  std::size_t model_bytes = 0;
  std::size_t payload_bytes = 0;
  std::size_t total_bytes = 0;
  // Payload bits per original byte; 0 for empty input.
  double bits_per_byte = 0.0;
};

ContainerInfo inspect(std::span<const std::uint8_t> container);

}  // namespace banz

#endif  // BANZ_PIPELINE_HPP_
