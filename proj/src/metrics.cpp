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

#include "csskit/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace csskit {

namespace {

double clamp_db(double db, double cap) { return std::clamp(db, -cap, cap); }

std::vector<double> gather(const std::vector<double>& x, const std::vector<bool>& keep) {
  std::vector<double> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (keep[i]) out.push_back(x[i]);
  }
  return out;
}

}  // namespace

double si_snr_db(const std::vector<double>& est, const std::vector<double>& ref,
                 double cap_db) {
  require(est.size() == ref.size() && !ref.empty(), ErrorCode::kShapeMismatch,
          "si_snr: length mismatch (", est.size(), " vs ", ref.size(), ")");
  double mean_e = 0.0, mean_r = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    mean_e += est[i];
    mean_r += ref[i];
  }
  mean_e /= static_cast<double>(est.size());
  mean_r /= static_cast<double>(ref.size());

  double dot = 0.0, ref_energy = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double e = est[i] - mean_e;
    const double r = ref[i] - mean_r;
    dot += e * r;
    ref_energy += r * r;
  }
  if (ref_energy <= 0.0) return -cap_db;
  const double alpha = dot / ref_energy;
  double target = 0.0, error = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double e = est[i] - mean_e;
    const double r = ref[i] - mean_r;
    const double t = alpha * r;
    target += t * t;
    const double d = e - t;
    error += d * d;
  }
  if (target <= 0.0) return -cap_db;
  if (error <= target * std::pow(10.0, -cap_db / 10.0)) return cap_db;
  return clamp_db(10.0 * std::log10(target / error), cap_db);
}

StreamAssignment best_assignment(const std::array<std::vector<double>, 2>& est,
                                 const std::array<std::vector<double>, 2>& refs,
                                 double cap_db) {
  const double id0 = si_snr_db(est[0], refs[0], cap_db);
  const double id1 = si_snr_db(est[1], refs[1], cap_db);
  const double sw0 = si_snr_db(est[0], refs[1], cap_db);
  const double sw1 = si_snr_db(est[1], refs[0], cap_db);
  StreamAssignment out;
  if (sw0 + sw1 > id0 + id1) {
    out.swapped = true;
    out.si_snr_db = {sw1, sw0};  // per reference order
  } else {
    out.swapped = false;
    out.si_snr_db = {id0, id1};
  }
  out.mean_db = 0.5 * (out.si_snr_db[0] + out.si_snr_db[1]);
  return out;
}

std::vector<bool> activity_mask(const std::vector<double>& ref, int frame_len,
                                double threshold_db) {
  require(frame_len > 0, ErrorCode::kInvalidArgument, "activity_mask: bad frame_len");
  const std::size_t n = ref.size();
  const std::size_t frames = (n + static_cast<std::size_t>(frame_len) - 1) /
                             static_cast<std::size_t>(frame_len);
  std::vector<double> energy(frames, 0.0);
  double peak = 0.0;
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t begin = f * static_cast<std::size_t>(frame_len);
    const std::size_t end = std::min(n, begin + static_cast<std::size_t>(frame_len));
    for (std::size_t i = begin; i < end; ++i) energy[f] += ref[i] * ref[i];
    peak = std::max(peak, energy[f]);
  }
  const double floor = peak * std::pow(10.0, threshold_db / 10.0);
  std::vector<bool> active(n, false);
  for (std::size_t f = 0; f < frames; ++f) {
    if (energy[f] > floor && peak > 0.0) {
      const std::size_t begin = f * static_cast<std::size_t>(frame_len);
      const std::size_t end = std::min(n, begin + static_cast<std::size_t>(frame_len));
      for (std::size_t i = begin; i < end; ++i) active[i] = true;
    }
  }
  return active;
}

RegionSiSnri region_si_snr_improvement(const std::array<std::vector<double>, 2>& est,
                                       const std::array<std::vector<double>, 2>& refs,
                                       const std::vector<double>& mixture_ch0,
                                       double cap_db) {
  const StreamAssignment assign = best_assignment(est, refs, cap_db);
  const std::array<const std::vector<double>*, 2> matched = {
      assign.swapped ? &est[1] : &est[0], assign.swapped ? &est[0] : &est[1]};

  RegionSiSnri out;
  out.swapped = assign.swapped;
  double overall = 0.0;
  for (int j = 0; j < 2; ++j) {
    overall += si_snr_db(*matched[static_cast<std::size_t>(j)],
                         refs[static_cast<std::size_t>(j)], cap_db) -
               si_snr_db(mixture_ch0, refs[static_cast<std::size_t>(j)], cap_db);
  }
  out.overall = overall / 2.0;

  const std::vector<bool> act0 = activity_mask(refs[0]);
  const std::vector<bool> act1 = activity_mask(refs[1]);
  std::vector<bool> ovlp(act0.size()), single(act0.size());
  std::size_t n_ovlp = 0, n_single = 0;
  for (std::size_t i = 0; i < act0.size(); ++i) {
    ovlp[i] = act0[i] && act1[i];
    single[i] = act0[i] != act1[i];
    n_ovlp += ovlp[i] ? 1u : 0u;
    n_single += single[i] ? 1u : 0u;
  }

  auto region_improvement = [&](const std::vector<bool>& keep) {
    double acc = 0.0;
    for (int j = 0; j < 2; ++j) {
      const auto est_r = gather(*matched[static_cast<std::size_t>(j)], keep);
      const auto ref_r = gather(refs[static_cast<std::size_t>(j)], keep);
      const auto mix_r = gather(mixture_ch0, keep);
      acc += si_snr_db(est_r, ref_r, cap_db) - si_snr_db(mix_r, ref_r, cap_db);
    }
    return acc / 2.0;
  };

  // Regions need enough samples for a stable measurement.
  if (n_ovlp > 1600) {
    out.overlap = region_improvement(ovlp);
    out.has_overlap = true;
  }
  if (n_single > 1600) {
    out.non_overlap = region_improvement(single);
    out.has_non_overlap = true;
  }
  return out;
}

double mask_mse(const MaskSet& a, const MaskSet& b) {
  require(a.bins == b.bins && a.frames == b.frames, ErrorCode::kShapeMismatch,
          "mask_mse: shape mismatch (", a.bins, "x", a.frames, " vs ", b.bins, "x",
          b.frames, ")");
  const std::size_t n = static_cast<std::size_t>(a.bins) * a.frames;
  auto pair_mse = [&](int ia, int ib) {
    double acc = 0.0;
    const auto& ma = a.masks[static_cast<std::size_t>(ia)];
    const auto& mb = b.masks[static_cast<std::size_t>(ib)];
    for (std::size_t i = 0; i < n; ++i) {
      const double d = ma[i] - mb[i];
      acc += d * d;
    }
    return acc;
  };
  const double identity = pair_mse(kSpeech0, kSpeech0) + pair_mse(kSpeech1, kSpeech1);
  const double crossed = pair_mse(kSpeech0, kSpeech1) + pair_mse(kSpeech1, kSpeech0);
  double total = std::min(identity, crossed);
  total += pair_mse(kNoiseStationary, kNoiseStationary);
  total += pair_mse(kNoiseTransient, kNoiseTransient);
  return total / static_cast<double>(4 * n);
}

MaskSet ideal_ratio_masks(const std::array<std::vector<double>, 2>& speech_mag,
                          const std::array<std::vector<double>, 2>& noise_mag,
                          int bins, int frames) {
  const std::size_t n = static_cast<std::size_t>(bins) * frames;
  for (const auto& m : speech_mag) {
    require(m.size() == n, ErrorCode::kShapeMismatch, "ideal_ratio_masks: bad shape");
  }
  for (const auto& m : noise_mag) {
    require(m.size() == n, ErrorCode::kShapeMismatch, "ideal_ratio_masks: bad shape");
  }
  MaskSet out(bins, frames);
  for (std::size_t i = 0; i < n; ++i) {
    const double total = speech_mag[0][i] + speech_mag[1][i] + noise_mag[0][i] +
                         noise_mag[1][i] + 1e-12;
    out.masks[kSpeech0][i] = std::clamp(speech_mag[0][i] / total, 0.0, 1.0);
    out.masks[kSpeech1][i] = std::clamp(speech_mag[1][i] / total, 0.0, 1.0);
    out.masks[kNoiseStationary][i] = std::clamp(noise_mag[0][i] / total, 0.0, 1.0);
    out.masks[kNoiseTransient][i] = std::clamp(noise_mag[1][i] / total, 0.0, 1.0);
  }
  return out;
}

}  // namespace csskit
