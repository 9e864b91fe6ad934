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

#ifndef BANZ_GAUSSIAN_HPP_
#define BANZ_GAUSSIAN_HPP_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace banz {

// Mean and precision (1 / variance) of one trainable scalar.
struct GaussianHyper {
  double mean = 0.0;
  double precision = 1.0;

  double variance() const { return 1.0 / precision; }
};

// One recursive update step for a single hyperparameter pair:
//   mean      -= sign * rate * variance * grad
//   precision += rate * grad^2
// Both deltas use the pre-step values. `sign` is +1 for descent.
GaussianHyper update_hyper(GaussianHyper h, double grad, double rate,
                           double sign = 1.0);

// A contiguous block of GaussianHyper pairs, stored as two parallel arrays so
// that the means can be handed to the networks as a plain span.
struct GaussianBlock {
  std::vector<double> mean;
  std::vector<double> precision;

  GaussianBlock() = default;
  GaussianBlock(std::size_t n, double init_precision)
      : mean(n, 0.0), precision(n, init_precision) {}

  std::size_t size() const { return mean.size(); }
  GaussianHyper at(std::size_t i) const { return {mean[i], precision[i]}; }

  // Means ~ Uniform[-half_width, half_width].
  void randomize_means(std::mt19937_64& rng, double half_width);

  // Applies update_hyper elementwise. grad.size() must equal size().
  void apply(std::span<const double> grad, double rate, double sign = 1.0);

  friend bool operator==(const GaussianBlock&, const GaussianBlock&) = default;
};

}  // namespace banz

#endif  // BANZ_GAUSSIAN_HPP_
