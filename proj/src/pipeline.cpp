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

#include "banz/pipeline.hpp"

#include <algorithm>

#include <boost/random/normal_distribution.hpp>

#include "banz/attention.hpp"
#include "banz/bytes.hpp"
#include "banz/error.hpp"

namespace banz {

namespace {

constexpr std::size_t kCacheEntries = 4096;
constexpr std::size_t kSeenBits = 1 << 16;

}  // namespace

PredictionPath::PredictionPath(const ModelSnapshot& snapshot, bool sample_latent)
    : params_(snapshot.params),
      predictor_(snapshot.params.arch),
      sample_latent_(sample_latent),
      rng_(snapshot_hash(snapshot)),
      cols_(1 + snapshot.params.arch.latent_dim),
      weights_(predictor_.size(), 0.0) {
  const std::size_t n = predictor_.size();
  const std::size_t stride = cols_.size();
  const std::vector<double>& means = params_.v.map.mean;
  for (std::size_t k = 0; k < stride; ++k) {
    cols_[k].resize(n);
    for (std::size_t j = 0; j < n; ++j) cols_[k][j] = means[j * stride + k];
  }
}

const Pmf& PredictionPath::predict(const Context& context) {
  std::string key;
  if (!sample_latent_) {
    key.assign(context.symbols().begin(), context.symbols().end());
    if (auto it = cache_.find(key); it != cache_.end()) {
      pmf_ = entries_[it->second].pmf;
      quantized_ = entries_[it->second].quantized;
      return pmf_;
    }
  }

  const Architecture& arch = params_.arch;
  const EncoderPosterior post = encode(context, params_.v, arch);
  std::vector<double> z = post.mean;
  if (sample_latent_) {
    boost::random::normal_distribution<double> normal;
    std::vector<double> noise(arch.latent_dim);
    for (double& x : noise) x = normal(rng_);
    z = sample_z(post, noise);
  }

  // Same sums, in the same order, as mean_weights; only the layout differs.
  // Embedding rows of bytes absent from the context are never read.
  const std::size_t e = arch.embed_dim;
  const std::size_t n = weights_.size();
  double* w = weights_.data();
  auto fill = [&](std::size_t lo, std::size_t hi) {
    std::copy(cols_[0].begin() + lo, cols_[0].begin() + hi, w + lo);
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double* c = cols_[1 + k].data();
      const double zk = z[k];
      for (std::size_t j = lo; j < hi; ++j) w[j] += c[j] * zk;
    }
  };
  for (Symbol s : context.symbols()) fill(s * e, (s + 1) * e);
  fill(kAlphabetSize * e, n);

  pmf_ = predictor_.predict(context, weights_);
  quantized_ = quantize(pmf_);
  bool store = false;
  if (!sample_latent_) {
    if (seen_.empty()) seen_.resize(kSeenBits);
    const std::size_t bit = std::hash<std::string>{}(key) % kSeenBits;
    store = seen_[bit];
    seen_[bit] = true;
  }
  if (store) {
    if (entries_.size() >= kCacheEntries) {
      entries_.clear();
      cache_.clear();
    }
    cache_.emplace(std::move(key), entries_.size());
    entries_.push_back({pmf_, quantized_});
  }
  return pmf_;
}

namespace {

void write_header(ByteWriter& w, const ContainerHeader& h) {
  w.tag("BANZ");
  w.u8(h.version);
  w.u8(h.context_length);
  w.u8(h.latent_dim);
  w.u8(h.mode);
  w.u64(h.original_length);
  w.u64(h.model_hash);
}

ContainerHeader read_header(ByteReader& r) {
  if (!r.tag("BANZ")) throw FormatError("not a banz container (bad magic)");
  ContainerHeader h;
  h.version = r.u8();
  if (h.version != kContainerVersion) {
    throw FormatError("unsupported container version " + std::to_string(h.version));
  }
  h.context_length = r.u8();
  h.latent_dim = r.u8();
  h.mode = r.u8();
  if ((h.mode & ~(kModeEmbedded | kModeSampledLatent)) != 0) {
    throw FormatError("container has unknown mode bits");
  }
  h.original_length = r.u64();
  h.model_hash = r.u64();
  return h;
}

}  // namespace

std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input,
                                   const ModelSnapshot& snapshot,
                                   const CompressOptions& options) {
  const Architecture& arch = snapshot.params.arch;
  const std::vector<std::uint8_t> model_bytes = serialize(snapshot);
  ContainerHeader header;
  header.context_length = static_cast<std::uint8_t>(arch.context_length);
  header.latent_dim = static_cast<std::uint8_t>(arch.latent_dim);
  header.mode = static_cast<std::uint8_t>((options.embed_model ? kModeEmbedded : 0) |
                                          (options.sample_latent ? kModeSampledLatent : 0));
  header.original_length = input.size();
  header.model_hash = snapshot_hash(model_bytes);

  ByteWriter w;
  write_header(w, header);
  if (options.embed_model) {
    w.u64(model_bytes.size());
    w.bytes(model_bytes);
  }

  PredictionPath path(snapshot, options.sample_latent);
  RangeEncoder encoder;
  for (std::size_t n = 0; n < input.size(); ++n) {
    const Context ctx = context_at(input, n, arch.context_length);
    const Pmf& pmf = path.predict(ctx);
    encoder.encode(input[n], path.quantized());
    if (options.observer) options.observer(n, pmf, path.quantized(), input[n]);
  }
  w.bytes(encoder.finish());
  return w.take();
}

namespace {

struct Parsed {
  ContainerHeader header;
  std::span<const std::uint8_t> model;
  std::span<const std::uint8_t> payload;
};

Parsed parse(std::span<const std::uint8_t> container) {
  ByteReader r(container, "container");
  Parsed p;
  p.header = read_header(r);
  if (p.header.embedded()) {
    const std::uint64_t size = r.u64();
    if (size > r.remaining()) throw FormatError("embedded model is truncated");
    p.model = r.bytes(static_cast<std::size_t>(size));
  }
  p.payload = r.bytes(r.remaining());
  return p;
}

}  // namespace

ContainerHeader parse_header(std::span<const std::uint8_t> container) {
  return parse(container).header;
}

std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> container,
                                     const ModelSnapshot* model,
                                     const PmfObserver& observer) {
  const Parsed parsed = parse(container);
  const ContainerHeader& header = parsed.header;

  std::optional<ModelSnapshot> embedded;
  if (header.embedded()) {
    if (snapshot_hash(parsed.model) != header.model_hash) {
      throw ModelMismatchError("embedded model does not match the container hash");
    }
    embedded = deserialize(parsed.model);
    model = &*embedded;
  } else if (model == nullptr) {
    throw ModelMismatchError("container references an external model; none given");
  } else if (snapshot_hash(*model) != header.model_hash) {
    throw ModelMismatchError("wrong model: hash does not match the container");
  }

  const Architecture& arch = model->params.arch;
  if (arch.context_length != header.context_length ||
      arch.latent_dim != header.latent_dim) {
    throw FormatError("container header disagrees with the model shape");
  }
  // A symbol costs at least -log2(65281 / 65536) > 1/180 bits, which bounds
  // how many symbols a payload of this size can describe.
  const std::uint64_t max_symbols = (parsed.payload.size() + 8) * 8 * 180;
  if (header.original_length > max_symbols) {
    throw DecodeError("original length is inconsistent with the payload size");
  }

  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(header.original_length));
  PredictionPath path(*model, header.sampled_latent());
  RangeDecoder decoder(parsed.payload);
  for (std::uint64_t n = 0; n < header.original_length; ++n) {
    const Context ctx = context_at(out, out.size(), arch.context_length);
    const Pmf& pmf = path.predict(ctx);
    const Symbol s = decoder.decode(path.quantized());
    out.push_back(s);
    if (observer) observer(out.size() - 1, pmf, path.quantized(), s);
  }
  decoder.finish();
  return out;
}

ContainerInfo inspect(std::span<const std::uint8_t> container) {
  const Parsed parsed = parse(container);
  ContainerInfo info;
  info.header = parsed.header;
  info.model_bytes = parsed.model.size();
  info.payload_bytes = parsed.payload.size();
  info.total_bytes = container.size();
  if (info.header.original_length > 0) {
    info.bits_per_byte = 8.0 * static_cast<double>(info.payload_bytes) /
                         static_cast<double>(info.header.original_length);
  }
  return info;
}

}  // namespace banz
