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

#include "banz/snapshot.hpp"

#include <fstream>
#include <iterator>

#include "banz/bytes.hpp"
#include "banz/error.hpp"

namespace banz {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

namespace {

void write_block(ByteWriter& w, const GaussianBlock& block) {
  for (std::size_t i = 0; i < block.size(); ++i) {
    w.f64(block.mean[i]);
    w.f64(block.precision[i]);
  }
}

void read_block(ByteReader& r, GaussianBlock& block, std::size_t n) {
  block.mean.resize(n);
  block.precision.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    block.mean[i] = r.f64();
    block.precision[i] = r.f64();
    if (!(block.precision[i] > 0.0)) {
      throw FormatError("model snapshot holds a non-positive precision");
    }
  }
}

}  // namespace

std::vector<std::uint8_t> serialize(const ModelSnapshot& snapshot) {
  const ModelParams& p = snapshot.params;
  ByteWriter w;
  w.tag("BANM");
  w.u32(kSnapshotVersion);
  w.u32(static_cast<std::uint32_t>(p.arch.context_length));
  w.u32(static_cast<std::uint32_t>(p.arch.latent_dim));
  w.u32(static_cast<std::uint32_t>(p.arch.embed_dim));
  w.u32(static_cast<std::uint32_t>(p.arch.hidden_dim));
  w.u32(snapshot.meta.epochs);
  w.u32(snapshot.meta.batch);
  w.u64(snapshot.meta.seed);
  w.u32(static_cast<std::uint32_t>(snapshot.meta.sign));
  w.u64(p.v.map.size());
  w.u64(p.v.encoder.size());
  w.u64(p.u.embed.size());
  write_block(w, p.v.map);
  write_block(w, p.v.encoder);
  write_block(w, p.u.embed);
  w.u64(fnv1a64(w.data()));
  return w.take();
}

ModelSnapshot deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "model snapshot");
  if (!r.tag("BANM")) throw FormatError("not a model snapshot (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kSnapshotVersion) {
    throw FormatError("unsupported model snapshot version " +
                      std::to_string(version));
  }
  ModelSnapshot s;
  Architecture& arch = s.params.arch;
  arch.context_length = r.u32();
  arch.latent_dim = r.u32();
  arch.embed_dim = r.u32();
  arch.hidden_dim = r.u32();
  try {
    arch.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model snapshot: ") + e.what());
  }
  s.meta.epochs = r.u32();
  s.meta.batch = r.u32();
  s.meta.seed = r.u64();
  const std::uint32_t flags = r.u32();
  if (flags > 1) throw FormatError("model snapshot: unknown flags");
  s.meta.sign = static_cast<AttentionSign>(flags);
  const std::uint64_t n_map = r.u64();
  const std::uint64_t n_enc = r.u64();
  const std::uint64_t n_dec = r.u64();
  if (n_map != arch.map_size() || n_enc != arch.encoder_size() ||
      n_dec != arch.decoder_size()) {
    throw FormatError("model snapshot: parameter counts do not match shape");
  }
  if (r.remaining() != (n_map + n_enc + n_dec) * 16 + 8) {
    throw FormatError("model snapshot: unexpected length");
  }
  read_block(r, s.params.v.map, n_map);
  read_block(r, s.params.v.encoder, n_enc);
  read_block(r, s.params.u.embed, n_dec);
  const std::uint64_t expected = fnv1a64(bytes.first(r.position()));
  if (r.u64() != expected) throw FormatError("model snapshot: checksum mismatch");
  return s;
}

std::uint64_t snapshot_hash(std::span<const std::uint8_t> serialized) {
  if (serialized.size() < 8) throw FormatError("model snapshot is truncated");
  ByteReader r(serialized.last(8), "model snapshot");
  return r.u64();
}

std::uint64_t snapshot_hash(const ModelSnapshot& snapshot) {
  return snapshot_hash(serialize(snapshot));
}

void save_snapshot(const ModelSnapshot& snapshot, const std::string& path) {
  write_file(path, serialize(snapshot));
}

ModelSnapshot load_snapshot(const std::string& path) {
  return deserialize(read_file(path));
}

}  // namespace banz
