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

#include "banz/gaussian.hpp"

#include <cassert>

namespace banz {

GaussianHyper update_hyper(GaussianHyper h, double grad, double rate,
                           double sign) {
  return {h.mean - sign * rate * grad / h.precision,
          h.precision + rate * grad * grad};
}

void GaussianBlock::randomize_means(std::mt19937_64& rng, double half_width) {
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  for (double& m : mean) m = dist(rng);
}

void GaussianBlock::apply(std::span<const double> grad, double rate,
                          double sign) {
  assert(grad.size() == mean.size());
  // A zero gradient leaves both values as they were, so no branch.
  const double step = sign * rate;
  double* m = mean.data();
  double* p = precision.data();
  const double* g = grad.data();
  for (std::size_t i = 0; i < mean.size(); ++i) {
    m[i] -= step * g[i] / p[i];
    p[i] += rate * g[i] * g[i];
  }
}

}  // namespace banz
