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

#include "banz/seqmodel.hpp"

#include <cmath>
#include <string>

#include "banz/error.hpp"

namespace banz {

Context context_at(std::span<const Symbol> sequence, std::size_t n,
                   std::size_t context_length) {
  std::vector<Symbol> window(context_length, Symbol{0});
  // window[k] holds position n - context_length + k.
  for (std::size_t k = 0; k < context_length; ++k) {
    const std::size_t back = context_length - k;
    if (back <= n) window[k] = sequence[n - back];
  }
  return Context(std::move(window));
}

std::vector<Sample> make_samples(std::span<const Symbol> sequence,
                                 std::size_t context_length) {
  if (context_length == 0) {
    throw ConfigError("context length must be at least 1");
  }
  std::vector<Sample> samples;
  samples.reserve(sequence.size());
  for (std::size_t n = 0; n < sequence.size(); ++n) {
    samples.push_back({context_at(sequence, n, context_length), sequence[n], n});
  }
  return samples;
}

double sequence_log2_prob(std::span<const double> per_symbol_probs) {
  double bits = 0.0;
  for (std::size_t n = 0; n < per_symbol_probs.size(); ++n) {
    const double p = per_symbol_probs[n];
    if (!(p > 0.0 && p <= 1.0)) {
      throw NumericError("probability out of (0, 1] at position " +
                         std::to_string(n));
    }
    bits -= std::log2(p);
  }
  return bits;
}

}  // namespace banz
