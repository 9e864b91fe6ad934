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

#ifndef BANZ_SEQMODEL_HPP_
#define BANZ_SEQMODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace banz {

inline constexpr std::size_t kAlphabetSize = 256;

// Byte value; the padding symbol is 0.
using Symbol = std::uint8_t;

// Fixed-length window of the symbols preceding a target, oldest first.
// Positions before the start of the sequence hold Symbol 0.
class Context {
 public:
  Context() = default;
  explicit Context(std::vector<Symbol> window) : window_(std::move(window)) {}

  std::size_t size() const { return window_.size(); }
  Symbol operator[](std::size_t i) const { return window_[i]; }
  std::span<const Symbol> symbols() const { return window_; }

  friend bool operator==(const Context&, const Context&) = default;

 private:
  std::vector<Symbol> window_;
};

struct Sample {
  Context context;
  Symbol target = 0;
  std::size_t index = 0;  // position in the source sequence
};

// Builds one sample per position; sample n sees the l symbols before n.
// Throws ConfigError when l == 0.
std::vector<Sample> make_samples(std::span<const Symbol> sequence,
                                 std::size_t context_length);

// Context for position n of `sequence` without materializing all samples.
Context context_at(std::span<const Symbol> sequence, std::size_t n,
                   std::size_t context_length);

// Code length in bits, -sum log2 p. Throws NumericError if any p is not
// in (0, 1].
double sequence_log2_prob(std::span<const double> per_symbol_probs);

}  // namespace banz

#endif  // BANZ_SEQMODEL_HPP_
