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

#include <random>

#include "banz/error.hpp"
#include "banz/gaussian.hpp"
#include "banz/model.hpp"

using namespace banz;

TEST_SUITE("gaussian") {

TEST_CASE("scalar update") {
  const GaussianHyper h = update_hyper({0.0, 1.0}, 1.0, 0.1);
  CHECK(h.mean == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(h.precision == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("ascent sign flips the mean step only") {
  const GaussianHyper h = update_hyper({0.0, 1.0}, 1.0, 0.1, -1.0);
  CHECK(h.mean == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(h.precision == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("update uses pre-step precision") {
  // mean step divides by tau before the increment
  const GaussianHyper h = update_hyper({1.0, 2.0}, 4.0, 0.5);
  CHECK(h.mean == doctest::Approx(1.0 - 0.5 * 4.0 / 2.0));
  CHECK(h.precision == doctest::Approx(2.0 + 0.5 * 16.0));
}

TEST_CASE("block apply matches scalar rule and skips zero gradients") {
  GaussianBlock b(4, 3.0);
  b.mean = {0.5, -0.25, 1.0, 0.0};
  const GaussianBlock before = b;
  const std::vector<double> g{0.0, 2.0, -1.0, 0.0};
  b.apply(g, 0.25);
  for (std::size_t i = 0; i < 4; ++i) {
    const GaussianHyper h = update_hyper(before.at(i), g[i], 0.25);
    CHECK(b.mean[i] == h.mean);
    CHECK(b.precision[i] == h.precision);
  }
  CHECK(b.at(0).mean == before.at(0).mean);
  CHECK(b.at(3).precision == before.at(3).precision);
}

TEST_CASE("zero gradients leave a block unchanged") {
  std::mt19937_64 rng(1);
  GaussianBlock b(50, 100.0);
  b.randomize_means(rng, 0.05);
  const GaussianBlock before = b;
  b.apply(std::vector<double>(50, 0.0), 1.0);
  CHECK(b == before);
}

TEST_CASE("precision never decreases") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  GaussianBlock b(20, 1.0);
  for (int step = 0; step < 200; ++step) {
    std::vector<double> g(20);
    for (double& x : g) x = 10.0 * n(rng);
    const GaussianBlock before = b;
    b.apply(g, 0.1, step % 2 == 0 ? 1.0 : -1.0);
    for (std::size_t i = 0; i < 20; ++i) CHECK(b.precision[i] >= before.precision[i]);
  }
}

TEST_CASE("variance is the inverse precision") {
  CHECK(GaussianHyper{0.0, 4.0}.variance() == 0.25);
}

TEST_CASE("randomized means stay in range") {
  std::mt19937_64 rng(9);
  GaussianBlock b(1000, 100.0);
  b.randomize_means(rng, 0.05);
  for (double m : b.mean) {
    CHECK(m >= -0.05);
    CHECK(m <= 0.05);
  }
  for (double p : b.precision) CHECK(p == 100.0);
}

TEST_CASE("architecture sizes") {
  const Architecture a;
  CHECK(a.input_dim() == 128);
  CHECK(a.predictor_size() == 256 * 16 + 64 * 128 + 64 + 256 * 64 + 256);
  CHECK(a.map_size() == a.predictor_size() * 9);
  CHECK(a.encoder_size() == 8 * 256 * 8 + 16);
  CHECK(a.decoder_size() == 8 * 256 * 8);
}

TEST_CASE("architecture validation") {
  CHECK_NOTHROW(Architecture{}.validate());
  CHECK_THROWS_AS((Architecture{0, 8, 16, 64}.validate()), ConfigError);
  CHECK_THROWS_AS((Architecture{8, 0, 16, 64}.validate()), ConfigError);
  CHECK_THROWS_AS((Architecture{256, 8, 16, 64}.validate()), ConfigError);
  CHECK_THROWS_AS((Architecture{8, 8, 16, 0}.validate()), ConfigError);
}

TEST_CASE("parameter initialization") {
  const Architecture a{2, 3, 4, 5};
  const ModelParams z = ModelParams::zeros(a);
  CHECK(z.v.map.size() == a.map_size());
  CHECK(z.v.encoder.size() == a.encoder_size());
  CHECK(z.u.embed.size() == a.decoder_size());
  for (double m : z.v.map.mean) CHECK(m == 0.0);
  for (double p : z.u.embed.precision) CHECK(p == kInitPrecision);

  const ModelParams r1 = ModelParams::random(a, 7);
  const ModelParams r2 = ModelParams::random(a, 7);
  const ModelParams r3 = ModelParams::random(a, 8);
  CHECK(r1 == r2);
  CHECK_FALSE(r1 == r3);
  for (double m : r1.v.map.mean) CHECK(std::abs(m) <= kInitMeanHalfWidth);
}

}
