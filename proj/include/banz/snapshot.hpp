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

#ifndef BANZ_SNAPSHOT_HPP_
#define BANZ_SNAPSHOT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "banz/model.hpp"

namespace banz {

// Direction of the decoder update. kDescent applies
// mean -= rate * variance * grad_u as written; kAscent flips it.
enum class AttentionSign : std::uint8_t { kDescent = 0, kAscent = 1 };

// Training settings recorded with a trained model.
struct TrainMeta {
  std::uint32_t epochs = 0;
  std::uint32_t batch = 0;
  std::uint64_t seed = 0;
  AttentionSign sign = AttentionSign::kDescent;

  friend bool operator==(const TrainMeta&, const TrainMeta&) = default;
};

struct ModelSnapshot {
  ModelParams params;
  TrainMeta meta;

  friend bool operator==(const ModelSnapshot&, const ModelSnapshot&) = default;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Binary layout, little-endian:
//   "BANM" | u32 version | u32 l, d, embed, hidden |
//   u32 epochs | u32 batch | u64 seed | u32 flags |
//   u64 map, encoder, decoder counts |
//   (f64 mean, f64 precision) for map, encoder, decoder in order |
//   u64 FNV-1a checksum of all preceding bytes
std::vector<std::uint8_t> serialize(const ModelSnapshot& snapshot);

// Throws FormatError on bad magic, version, shape or checksum.
ModelSnapshot deserialize(std::span<const std::uint8_t> bytes);

// The trailing checksum of the serialized snapshot; identifies a model.
std::uint64_t snapshot_hash(const ModelSnapshot& snapshot);
std::uint64_t snapshot_hash(std::span<const std::uint8_t> serialized);

void save_snapshot(const ModelSnapshot& snapshot, const std::string& path);
ModelSnapshot load_snapshot(const std::string& path);

}  // namespace banz

#endif  // BANZ_SNAPSHOT_HPP_
