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

#ifndef BANZ_TESTS_SUPPORT_HPP_
#define BANZ_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "banz/model.hpp"
#include "banz/seqmodel.hpp"

namespace banz::testing {

// Small enough for finite differences over every coordinate.
inline Architecture tiny_arch() { return {2, 2, 2, 3}; }

inline std::vector<Symbol> random_bytes(std::mt19937_64& rng, std::size_t n,
                                        int alphabet = 256) {
  std::uniform_int_distribution<int> byte(0, alphabet - 1);
  std::vector<Symbol> out(n);
  for (Symbol& s : out) s = static_cast<Symbol>(byte(rng));
  return out;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n,
                                         double half_width = 1.0) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  std::vector<double> out(n);
  for (double& x : out) x = u(rng);
  return out;
}

inline double rel_err(double a, double b, double floor = 1e-6) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

inline std::vector<Symbol> bytes_of(const char* s) {
  std::vector<Symbol> out;
  for (; *s != 0; ++s) out.push_back(static_cast<Symbol>(*s));
  return out;
}

}  // namespace banz::testing

#endif  // BANZ_TESTS_SUPPORT_HPP_
