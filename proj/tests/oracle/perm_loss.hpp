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

// Brute-force loss evaluation by explicit enumeration of both speech
// assignments. Plain double loops, no tensor machinery.

#ifndef CSSKIT_TESTS_ORACLE_PERM_LOSS_HPP_
#define CSSKIT_TESTS_ORACLE_PERM_LOSS_HPP_

#include <array>
#include <cmath>
#include <vector>

namespace oracle {

using Mat = std::vector<double>;  // row-major bins x frames

inline double masked_distance(const Mat& mask, const Mat& y_mag, const Mat& ref,
                              bool squared) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y_mag.size(); ++i) {
    const double d = mask[i] * y_mag[i] - ref[i];
    acc += d * d;
  }
  return squared ? acc : std::sqrt(acc);
}

struct PermLoss {
  double loss = 0.0;
  bool swapped = false;
};

inline PermLoss enumerate_permutation_loss(const std::array<Mat, 2>& masks,
                                           const Mat& y_mag,
                                           const std::array<Mat, 2>& refs,
                                           bool squared = false) {
  const double identity = masked_distance(masks[0], y_mag, refs[0], squared) +
                          masked_distance(masks[1], y_mag, refs[1], squared);
  const double crossed = masked_distance(masks[0], y_mag, refs[1], squared) +
                         masked_distance(masks[1], y_mag, refs[0], squared);
  if (crossed < identity) return {crossed, true};
  return {identity, false};
}

// Speech uPIT term plus fixed-order weighted noise terms.
inline double stage1_reference(const std::array<Mat, 4>& masks, const Mat& y_mag,
                               const std::array<Mat, 2>& speech_refs,
                               const std::array<Mat, 2>& noise_refs, double w_q,
                               bool squared = false) {
  const PermLoss pit =
      enumerate_permutation_loss({masks[0], masks[1]}, y_mag, speech_refs, squared);
  double total = pit.loss;
  total += w_q * masked_distance(masks[2], y_mag, noise_refs[0], squared);
  total += w_q * masked_distance(masks[3], y_mag, noise_refs[1], squared);
  return total;
}

inline double stage2_reference(const std::array<Mat, 4>& teacher,
                               const std::array<Mat, 4>& student, const Mat& y_mag,
                               double w_q, bool squared = false) {
  auto dist = [&](const Mat& tea, const Mat& stu) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y_mag.size(); ++i) {
      const double d = tea[i] * y_mag[i] - stu[i] * y_mag[i];
      acc += d * d;
    }
    return squared ? acc : std::sqrt(acc);
  };
  const double identity = dist(teacher[0], student[0]) + dist(teacher[1], student[1]);
  const double crossed = dist(teacher[0], student[1]) + dist(teacher[1], student[0]);
  double total = std::min(identity, crossed);
  total += w_q * dist(teacher[2], student[2]);
  total += w_q * dist(teacher[3], student[3]);
  return total;
}

}  // namespace oracle

#endif  // CSSKIT_TESTS_ORACLE_PERM_LOSS_HPP_
