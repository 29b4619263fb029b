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

#ifndef CSSKIT_METRICS_HPP_
#define CSSKIT_METRICS_HPP_

#include <array>
#include <vector>

#include "csskit/net.hpp"

namespace csskit {

inline constexpr double kSiSnrCapDb = 60.0;

// Scale-invariant SNR in dB after mean removal, capped at +-cap_db.
double si_snr_db(const std::vector<double>& est, const std::vector<double>& ref,
                 double cap_db = kSiSnrCapDb);

struct StreamAssignment {
  bool swapped = false;          // est stream -> ref mapping
  std::array<double, 2> si_snr_db = {0.0, 0.0};  // per matched pair
  double mean_db = 0.0;
};

// Best of the two stream-to-reference assignments by total SI-SNR.
StreamAssignment best_assignment(const std::array<std::vector<double>, 2>& est,
                                 const std::array<std::vector<double>, 2>& refs,
                                 double cap_db = kSiSnrCapDb);

// Per-sample activity of one source: frame energy above an energy threshold
// relative to the source's loudest frame (threshold_db is negative).
std::vector<bool> activity_mask(const std::vector<double>& ref, int frame_len = 400,
                                double threshold_db = -40.0);

struct RegionSiSnri {
  double overall = 0.0;
  double overlap = 0.0;      // both sources active
  double non_overlap = 0.0;  // exactly one source active
  bool has_overlap = false;
  bool has_non_overlap = false;
  bool swapped = false;
};

// SI-SNR improvement of the separated streams over the mixture, overall and
// split into overlap / single-speaker regions from reference activity.
RegionSiSnri region_si_snr_improvement(const std::array<std::vector<double>, 2>& est,
                                       const std::array<std::vector<double>, 2>& refs,
                                       const std::vector<double>& mixture_ch0,
                                       double cap_db = kSiSnrCapDb);

// Mean squared difference between mask sets; the speech pair is aligned by
// the better of the two assignments, the noise pair keeps its fixed order.
double mask_mse(const MaskSet& a, const MaskSet& b);

// Ideal ratio masks from component magnitude spectra (each bins x frames,
// same layout as channel_magnitude).
MaskSet ideal_ratio_masks(const std::array<std::vector<double>, 2>& speech_mag,
                          const std::array<std::vector<double>, 2>& noise_mag,
                          int bins, int frames);

}  // namespace csskit

#endif  // CSSKIT_METRICS_HPP_
