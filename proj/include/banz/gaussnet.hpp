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

#ifndef BANZ_GAUSSNET_HPP_
#define BANZ_GAUSSNET_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "banz/model.hpp"
#include "banz/seqmodel.hpp"

namespace banz {

using Pmf = std::array<double, kAlphabetSize>;

// Context predictor P(a | s, w) over a flat weight vector w.
//
// Layout of w: byte embedding [256 x E], hidden weights [H x l*E], hidden
// bias [H], output weights [256 x H], output bias [256].
class Predictor {
 public:
  explicit Predictor(const Architecture& arch);

  const Architecture& arch() const { return arch_; }
  std::size_t size() const { return size_; }

  std::size_t embed_offset() const { return 0; }
  std::size_t hidden_offset() const { return hidden_offset_; }
  std::size_t hidden_bias_offset() const { return hidden_bias_offset_; }
  std::size_t output_offset() const { return output_offset_; }
  std::size_t output_bias_offset() const { return output_bias_offset_; }

  // Softmax over the logits with the max subtracted. Only the embedding rows
  // of bytes present in `context` are read. Throws NumericError on
  // non-finite logits.
  Pmf predict(const Context& context, std::span<const double> w) const;

  // -ln P(target | context, w).
  double loss(const Sample& sample, std::span<const double> w) const;

  // Returns the loss and overwrites `grad` (size()) with its exact gradient.
  double loss_and_grad(const Sample& sample, std::span<const double> w,
                       std::span<double> grad) const;

 private:
  struct Activations {
    std::vector<double> input;
    std::vector<double> hidden;
    Pmf logits;
  };
  void forward(const Context& context, std::span<const double> w,
               Activations& act) const;

  Architecture arch_;
  std::size_t hidden_offset_;
  std::size_t hidden_bias_offset_;
  std::size_t output_offset_;
  std::size_t output_bias_offset_;
  std::size_t size_;
};

// Mean and standard deviation of the generated predictor weights.
struct WeightStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

// mean_j = b_j + sum_k W_jk z_k with (b_j, W_j.) the hyper-means of row j of
// the map; stddev_j = 1 / sqrt(precision of b_j), independent of z.
// Throws ConfigError when z has the wrong dimension.
WeightStats weight_stats(std::span<const double> z, const HyperNetParams& v,
                         const Architecture& arch);

// Mean weights only. With `context` set, embedding rows of bytes absent from
// the context are skipped (left untouched in `out`).
void mean_weights(std::span<const double> z, const HyperNetParams& v,
                  const Architecture& arch, std::span<double> out,
                  const Context* context = nullptr);

// Reparameterized draw w = mean + stddev * noise.
std::vector<double> sample_weights(const WeightStats& stats,
                                   std::span<const double> noise);

// Pulls dJ/dw back through w = W z + b + stddev * noise. Gradients with
// respect to the map means are written into grad_map (overwritten), and
// dJ/dz into grad_z (overwritten). The stddev term carries no mean-gradient.
void pullback_to_map(std::span<const double> grad_w, std::span<const double> z,
                     const HyperNetParams& v, const Architecture& arch,
                     std::span<double> grad_map, std::span<double> grad_z);

struct HyperGrad {
  double loss = 0.0;
  std::vector<double> map;  // d loss / d (map means)
  std::vector<double> z;    // d loss / d z
};

// Loss of `sample` under w = mean(z) + stddev * noise and its gradient with
// respect to the map means and to z.
HyperGrad backprop_to_v(const Sample& sample, std::span<const double> z,
                        std::span<const double> noise, const HyperNetParams& v,
                        const Architecture& arch);

}  // namespace banz

#endif  // BANZ_GAUSSNET_HPP_
