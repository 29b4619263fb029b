// Copyright 2026 The csskit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Central-difference gradient reference. Treats the function under test as a
// black box; intentionally slow and simple.

#ifndef CSSKIT_TESTS_ORACLE_FINITE_DIFF_HPP_
#define CSSKIT_TESTS_ORACLE_FINITE_DIFF_HPP_

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using ScalarFn = std::function<double(const std::vector<double>&)>;

inline std::vector<double> finite_diff_grad(const ScalarFn& f,
                                            const std::vector<double>& x,
                                            double eps = 1e-4) {
  std::vector<double> grad(x.size());
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const double hi = f(probe);
    probe[i] = x[i] - eps;
    const double lo = f(probe);
    probe[i] = x[i];
    grad[i] = (hi - lo) / (2.0 * eps);
  }
  return grad;
}

// Largest |a-b| / max(1, |a|, |b|) over paired entries.
inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({1.0, std::fabs(a[i]), std::fabs(b[i])});
    worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace oracle

#endif  // CSSKIT_TESTS_ORACLE_FINITE_DIFF_HPP_
