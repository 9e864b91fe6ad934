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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "banz/coder.hpp"
#include "banz/error.hpp"

using namespace banz;

namespace {

// Mixes flat, peaked and sparse shapes.
Pmf random_pmf(std::mt19937_64& rng) {
  Pmf p{};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int shape = static_cast<int>(rng() % 4);
  double sum = 0.0;
  for (double& x : p) {
    double v = u(rng);
    if (shape == 1) v = std::pow(v, 40.0);
    if (shape == 2) v = u(rng) < 0.02 ? v : 0.0;
    if (shape == 3) v = std::exp(30.0 * (v - 1.0));
    x = v;
    sum += v;
  }
  if (sum == 0.0) p[rng() % 256] = sum = 1.0;
  for (double& x : p) x /= sum;
  return p;
}

std::vector<std::uint8_t> encode_all(const std::vector<Symbol>& syms,
                                     const std::vector<QuantizedPmf>& pmfs) {
  RangeEncoder enc;
  for (std::size_t n = 0; n < syms.size(); ++n) enc.encode(syms[n], pmfs[n]);
  return enc.finish();
}

}  // namespace

TEST_SUITE("coder") {

TEST_CASE("uniform PMF quantizes exactly") {
  Pmf p;
  p.fill(1.0 / 256);
  const QuantizedPmf q = quantize(p);
  for (std::uint32_t c : q.counts) CHECK(c == 256);
  CHECK(q.valid());
}

TEST_CASE("point mass keeps the floor on every other symbol") {
  Pmf p{};
  p[0] = 1.0;
  const QuantizedPmf q = quantize(p);
  CHECK(q.counts[0] == 65281);
  for (std::size_t s = 1; s < 256; ++s) CHECK(q.counts[s] == 1);
  CHECK(q.valid());
  p[0] = 0.0;
  p[200] = 1.0;
  CHECK(quantize(p).counts[200] == 65281);
}

TEST_CASE("random PMFs quantize to valid tables") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10000; ++t) {
    const Pmf p = random_pmf(rng);
    const QuantizedPmf q = quantize(p);
    std::uint64_t total = 0;
    for (std::uint32_t c : q.counts) {
      CHECK(c >= 1);
      total += c;
    }
    REQUIRE(total == kProbTotal);
    REQUIRE(q.valid());
    // each count stays within a few units of its target or at the floor
    for (std::size_t s = 0; s < 256; ++s) {
      const double target = p[s] * kProbTotal;
      if (q.counts[s] > 1) CHECK(std::abs(q.counts[s] - target) < 256.0);
    }
  }
}

TEST_CASE("quantization is deterministic") {
  std::mt19937_64 rng(2);
  const Pmf p = random_pmf(rng);
  const QuantizedPmf a = quantize(p), b = quantize(p);
  CHECK(a.counts == b.counts);
  CHECK(a.cumulative == b.cumulative);
}

TEST_CASE("invalid tables are detected") {
  Pmf p;
  p.fill(1.0 / 256);
  QuantizedPmf q = quantize(p);
  q.counts[3] = 0;
  q.counts[4] += 256;
  q.finalize();
  CHECK_FALSE(q.valid());
}

TEST_CASE("code length") {
  Pmf p;
  p.fill(1.0 / 256);
  CHECK(code_length_bits(quantize(p), 9) == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("empty stream") {
  RangeEncoder enc;
  const std::vector<std::uint8_t> out = enc.finish();
  CHECK(out.empty());
  RangeDecoder dec(out);
  CHECK_NOTHROW(dec.finish());
}

TEST_CASE("single symbol") {
  Pmf p;
  p.fill(1.0 / 256);
  const QuantizedPmf q = quantize(p);
  for (int s : {0, 1, 127, 255}) {
    RangeEncoder enc;
    enc.encode(static_cast<Symbol>(s), q);
    const std::vector<std::uint8_t> out = enc.finish();
    CHECK(out.size() <= 3);
    RangeDecoder dec(out);
    CHECK(dec.decode(q) == s);
    CHECK_NOTHROW(dec.finish());
  }
}

TEST_CASE("million symbol round trip with changing PMFs") {
  std::mt19937_64 rng(3);
  std::vector<QuantizedPmf> pool;
  for (int k = 0; k < 2000; ++k) pool.push_back(quantize(random_pmf(rng)));
  const std::size_t n = 1000000;
  std::vector<Symbol> syms(n);
  std::vector<std::size_t> which(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double bound = 0.0;
  RangeEncoder enc;
  for (std::size_t i = 0; i < n; ++i) {
    which[i] = rng() % pool.size();
    const QuantizedPmf& q = pool[which[i]];
    // draw the symbol from the table itself, sometimes from the floor
    const std::uint32_t r = static_cast<std::uint32_t>(rng() % kProbTotal);
    const auto it = std::upper_bound(q.cumulative.begin() + 1, q.cumulative.end(), r);
    syms[i] = (i % 97 == 0) ? static_cast<Symbol>(rng() % 256)
                            : static_cast<Symbol>(it - q.cumulative.begin() - 1);
    bound += code_length_bits(q, syms[i]);
    enc.encode(syms[i], q);
  }
  const std::vector<std::uint8_t> out = enc.finish();
  CHECK(8.0 * static_cast<double>(out.size()) <= std::ceil(bound) + 64.0);
  RangeDecoder dec(out);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (dec.decode(pool[which[i]]) != syms[i]) ++mismatches;
  }
  CHECK(mismatches == 0);
  CHECK_NOTHROW(dec.finish());
}

TEST_CASE("extreme tables") {
  // long runs of the floor symbol and of the mode stress carry handling
  Pmf p{};
  p[7] = 1.0;
  const QuantizedPmf q = quantize(p);
  for (Symbol s : {Symbol{7}, Symbol{8}}) {
    std::vector<Symbol> syms(5000, s);
    for (std::size_t i = 0; i < syms.size(); i += 13) syms[i] = static_cast<Symbol>(7 + (i % 3));
    const std::vector<QuantizedPmf> pmfs(syms.size(), q);
    const std::vector<std::uint8_t> out = encode_all(syms, pmfs);
    double bound = 0.0;
    for (Symbol x : syms) bound += code_length_bits(q, x);
    CHECK(8.0 * static_cast<double>(out.size()) <= std::ceil(bound) + 64.0);
    RangeDecoder dec(out);
    for (Symbol x : syms) REQUIRE(dec.decode(q) == x);
    CHECK_NOTHROW(dec.finish());
  }
}

TEST_CASE("truncated and padded payloads are rejected") {
  std::mt19937_64 rng(4);
  std::vector<Symbol> syms(3000);
  std::vector<QuantizedPmf> pmfs;
  for (Symbol& s : syms) {
    s = static_cast<Symbol>(rng() % 256);
    pmfs.push_back(quantize(random_pmf(rng)));
  }
  const std::vector<std::uint8_t> out = encode_all(syms, pmfs);
  auto decode_all = [&](std::span<const std::uint8_t> bytes) {
    RangeDecoder dec(bytes);
    for (const QuantizedPmf& q : pmfs) dec.decode(q);
    dec.finish();
  };
  CHECK_NOTHROW(decode_all(out));
  CHECK_THROWS_AS(decode_all(std::span(out).first(out.size() - 1)), DecodeError);
  CHECK_THROWS_AS(decode_all(std::span(out).first(out.size() / 2)), DecodeError);
  std::vector<std::uint8_t> longer = out;
  longer.push_back(0);
  CHECK_THROWS_AS(decode_all(longer), DecodeError);
}

}
