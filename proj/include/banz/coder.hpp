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

#ifndef BANZ_CODER_HPP_
#define BANZ_CODER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "banz/gaussnet.hpp"
#include "banz/seqmodel.hpp"

namespace banz {

inline constexpr std::uint32_t kProbBits = 16;
inline constexpr std::uint32_t kProbTotal = 1u << kProbBits;

// Integer PMF consumed by the range coder: 256 counts, each >= 1, summing
// to kProbTotal. cumulative[s] is the sum of counts below s.
struct QuantizedPmf {
  std::array<std::uint32_t, kAlphabetSize> counts{};
  std::array<std::uint32_t, kAlphabetSize + 1> cumulative{};

  // Recomputes cumulative from counts.
  void finalize();
  // True when every count is >= 1 and the total is kProbTotal.
  bool valid() const;
};

// counts = max(1, round(p * 65536)), then the total is restored to 65536 by
// moving one unit at a time to or from the symbol with the largest (or
// smallest) remainder p * 65536 - count, lower index first on ties.
QuantizedPmf quantize(const Pmf& pmf);

// -log2(count / 65536).
double code_length_bits(const QuantizedPmf& q, Symbol s);

// Byte-oriented range encoder. low carries one bit above the 56-bit window;
// range stays in [2^48, 2^56) between symbols.
class RangeEncoder {
 public:
  void encode(Symbol s, const QuantizedPmf& q);
  // Flushes the final interval and returns the payload. The encoder must not
  // be used afterwards. An encoder that saw no symbols returns no bytes.
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint64_t range_ = (std::uint64_t{1} << 56) - 1;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 1;  // cache byte plus run of 0xFF bytes
  bool first_ = true;          // the initial cache byte is always 0 and elided
  std::size_t symbols_ = 0;
  std::size_t shifts_ = 0;
  std::vector<std::uint8_t> out_;
};

// Inverse of RangeEncoder given the same sequence of QuantizedPmfs.
// Throws DecodeError on corrupt or truncated input.
class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> payload);

  Symbol decode(const QuantizedPmf& q);
  // Checks that the payload length matches what the encoder would have
  // produced for the symbols decoded so far.
  void finish() const;

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::size_t padded_ = 0;
  std::uint64_t code_ = 0;
  std::uint64_t range_ = (std::uint64_t{1} << 56) - 1;
  std::size_t shifts_ = 0;
  std::size_t symbols_ = 0;
  bool started_ = false;
};

}  // namespace banz

#endif  // BANZ_CODER_HPP_
