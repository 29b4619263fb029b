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

// Closed-form two-microphone distortionless filter for a diagonal
// interference covariance: w_i = (d_i / s_i) / (sum_j |d_j|^2 / s_j) with
// s_i the loaded diagonal entries. Hand-derived; no linear-algebra library.

#ifndef CSSKIT_TESTS_ORACLE_MVDR_2MIC_HPP_
#define CSSKIT_TESTS_ORACLE_MVDR_2MIC_HPP_

#include <array>
#include <complex>

namespace oracle {

using cd = std::complex<double>;

// diag holds the interference variances; load is the diagonal loading the
// system under test documents (1e-6 * trace / M).
inline std::array<cd, 2> analytic_mvdr_2mic(const std::array<cd, 2>& d,
                                            const std::array<double, 2>& diag,
                                            double load) {
  const double s0 = diag[0] + load;
  const double s1 = diag[1] + load;
  const cd n0 = d[0] / s0;
  const cd n1 = d[1] / s1;
  const double denom = std::norm(d[0]) / s0 + std::norm(d[1]) / s1;
  return {n0 / denom, n1 / denom};
}

}  // namespace oracle

#endif  // CSSKIT_TESTS_ORACLE_MVDR_2MIC_HPP_
