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

#include "banz/coder.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <array>
#include <utility>

#include "banz/error.hpp"

namespace banz {

namespace {

constexpr std::uint64_t kWindowBits = 56;
constexpr std::uint64_t kCarry = std::uint64_t{1} << kWindowBits;
constexpr std::uint64_t kBottom = std::uint64_t{1} << (kWindowBits - 8);
constexpr std::uint64_t kBottomMask = kBottom - 1;
constexpr std::size_t kInitBytes = kWindowBits / 8;

}  // namespace

void QuantizedPmf::finalize() {
  cumulative[0] = 0;
  for (std::size_t s = 0; s < kAlphabetSize; ++s) {
    cumulative[s + 1] = cumulative[s] + counts[s];
  }
}

bool QuantizedPmf::valid() const {
  std::uint64_t total = 0;
  for (std::size_t s = 0; s < kAlphabetSize; ++s) {
    if (counts[s] < 1 || cumulative[s] != total) return false;
    total += counts[s];
  }
  return total == kProbTotal && cumulative[kAlphabetSize] == kProbTotal;
}

QuantizedPmf quantize(const Pmf& pmf) {
  QuantizedPmf q;
  std::array<double, kAlphabetSize> target{};
  std::int64_t total = 0;
  for (std::size_t s = 0; s < kAlphabetSize; ++s) {
    const double p = pmf[s];
    target[s] = (std::isfinite(p) && p > 0.0) ? p * kProbTotal : 0.0;
    // Round half away from zero; exact for nonnegative inputs in range.
    const double x = std::min(target[s], double{kProbTotal});
    std::uint32_t rounded = static_cast<std::uint32_t>(x);
    if (x - rounded >= 0.5) ++rounded;
    q.counts[s] = std::max<std::uint32_t>(1, rounded);
    total += q.counts[s];
  }

  // Heap entries are (remainder, symbol); the comparator puts the symbol to
  // adjust next on top. At most one entry per symbol, so a fixed array does.
  using Entry = std::pair<double, std::size_t>;
  std::array<Entry, kAlphabetSize> heap;
  std::size_t used = 0;
  auto run = [&](auto worse, int step, std::uint32_t floor) {
    for (std::size_t s = 0; s < kAlphabetSize; ++s) {
      if (q.counts[s] > floor) heap[used++] = {target[s] - q.counts[s], s};
    }
    // Each pick moves one entry down by a whole unit, so entries outside the
    // best `needed` are never reached: while picks remain, one of those best
    // entries is still untouched and outranks all of them.
    const auto needed = static_cast<std::size_t>(std::abs(total - kProbTotal));
    if (needed < used) {
      std::nth_element(heap.begin(), heap.begin() + (needed - 1), heap.begin() + used,
                       [&](const Entry& a, const Entry& b) { return worse(b, a); });
      used = needed;
    }
    std::make_heap(heap.begin(), heap.begin() + used, worse);
    for (; total != kProbTotal; total += step) {
      assert(used > 0);
      std::pop_heap(heap.begin(), heap.begin() + used, worse);
      const std::size_t s = heap[--used].second;
      q.counts[s] = static_cast<std::uint32_t>(q.counts[s] + step);
      if (q.counts[s] > floor) {
        heap[used++] = {target[s] - q.counts[s], s};
        std::push_heap(heap.begin(), heap.begin() + used, worse);
      }
    }
  };
  if (total > kProbTotal) {
    // Take from the most over-allocated symbol.
    run([](const Entry& a, const Entry& b) {
          return a.first != b.first ? a.first > b.first : a.second > b.second;
        },
        -1, 1);
  } else if (total < kProbTotal) {
    // Give to the most under-allocated symbol.
    run([](const Entry& a, const Entry& b) {
          return a.first != b.first ? a.first < b.first : a.second > b.second;
        },
        1, 0);
  }
  q.finalize();
  return q;
}

double code_length_bits(const QuantizedPmf& q, Symbol s) {
  return static_cast<double>(kProbBits) - std::log2(static_cast<double>(q.counts[s]));
}

void RangeEncoder::encode(Symbol s, const QuantizedPmf& q) {
  const std::uint64_t r = range_ >> kProbBits;
  low_ += r * q.cumulative[s];
  range_ = r * q.counts[s];
  while (range_ < kBottom) {
    range_ <<= 8;
    shift_low();
    ++shifts_;
  }
  ++symbols_;
}

void RangeEncoder::shift_low() {
  if (low_ < (std::uint64_t{0xFF} << (kWindowBits - 8)) || low_ >= kCarry) {
    const auto carry = static_cast<std::uint8_t>(low_ >> kWindowBits);
    std::uint8_t byte = cache_;
    do {
      const auto out = static_cast<std::uint8_t>(byte + carry);
      if (first_) {
        assert(out == 0);
        first_ = false;
      } else {
        out_.push_back(out);
      }
      byte = 0xFF;
    } while (--pending_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> (kWindowBits - 8));
  }
  ++pending_;
  low_ = (low_ & kBottomMask) << 8;
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  if (symbols_ == 0) return {};
  // Any value in [low, low + range) identifies the stream; pick the one whose
  // bytes below the top window byte are zero, so a single byte ends it.
  low_ = (low_ + kBottomMask) & ~kBottomMask;
  shift_low();
  shift_low();
  assert(out_.size() == shifts_ + 1);
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> payload)
    : in_(payload) {}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ < in_.size()) return in_[pos_++];
  // The encoder leaves off the trailing zero bytes of the final window.
  if (++padded_ > kInitBytes - 1) {
    throw DecodeError("range-coded payload is truncated");
  }
  return 0;
}

Symbol RangeDecoder::decode(const QuantizedPmf& q) {
  if (!started_) {
    for (std::size_t i = 0; i < kInitBytes; ++i) code_ = (code_ << 8) | next_byte();
    started_ = true;
  }
  const std::uint64_t r = range_ >> kProbBits;
  const std::uint64_t value = code_ / r;
  if (value >= kProbTotal) throw DecodeError("range-coded payload is corrupt");
  const auto it = std::upper_bound(q.cumulative.begin() + 1, q.cumulative.end(),
                                   static_cast<std::uint32_t>(value));
  const auto s = static_cast<std::size_t>(it - q.cumulative.begin() - 1);
  code_ -= r * q.cumulative[s];
  range_ = r * q.counts[s];
  while (range_ < kBottom) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
    ++shifts_;
  }
  ++symbols_;
  return static_cast<Symbol>(s);
}

void RangeDecoder::finish() const {
  const std::size_t expected = symbols_ == 0 ? 0 : shifts_ + 1;
  if (in_.size() != expected) {
    throw DecodeError("range-coded payload has " + std::to_string(in_.size()) +
                      " bytes, expected " + std::to_string(expected));
  }
}

}  // namespace banz
