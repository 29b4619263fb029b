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

#ifndef CSSKIT_SIM_HPP_
#define CSSKIT_SIM_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "csskit/rng.hpp"
#include "csskit/segmenter.hpp"
#include "csskit/wave.hpp"

namespace csskit {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct ArrayGeometry {
  std::vector<Vec3> mics;
  void validate() const;
};

enum class SpeechKind { kAmTone, kFilteredNoiseBursts };

// Parametric stand-in for speech: a deterministic-for-seed signal with known
// bandwidth, unit RMS over active regions.
struct SpeechParams {
  SpeechKind kind = SpeechKind::kAmTone;
  double band_lo_hz = 300.0;
  double band_hi_hz = 1500.0;
  double am_rate_hz = 4.0;
};

std::vector<double> synth_speech(const SpeechParams& params, double dur_sec,
                                 int sample_rate, std::uint64_t seed);

// Direct propagation: per-mic fractional delay ||pos - mic||/c and 1/distance
// gain, applied as a frequency-domain phase shift. The output is input length
// plus the longest integer delay (plus a small interpolation guard).
MultichannelWaveform propagate(const std::vector<double>& src, int sample_rate,
                               const Vec3& src_pos, const ArrayGeometry& geom,
                               double sound_speed = 343.0);

struct TransientEvent {
  double onset_sec = 0.0;
  double duration_sec = 0.0;
  double level_db = 0.0;
};

struct Room {
  double sound_speed = 343.0;
  // When > 0, adds one floor reflection (source mirrored across z = 0).
  double reflection_gain = 0.0;
};

struct SceneSource {
  SpeechParams speech;
  Vec3 position;
  double onset_sec = 0.0;
  double duration_sec = 0.0;
  double level_db = 0.0;
  // Randomness sub-stream; 0 derives it from the source index. A source with
  // an explicit tag renders identically whether alone or inside a full scene.
  std::uint64_t stream_tag = 0;
};

struct Scene {
  std::vector<SceneSource> sources;  // up to two speakers
  double stationary_noise_db = -200.0;  // <= -150 disables
  std::vector<TransientEvent> transient_noise;
  Room room;
  void validate(double dur_sec) const;
};

// A rendered sample: the mixture plus channel-0 component images. Reference
// magnitudes for training are derived from the images at featurization time.
struct TrainingSample {
  MultichannelWaveform mixture;
  std::vector<std::vector<double>> speech_images_ch0;  // one per source
  std::vector<double> stationary_noise_ch0;
  std::vector<double> transient_noise_ch0;
  double quality_score = 0.0;
};

TrainingSample render_scene(const Scene& scene, const ArrayGeometry& geom,
                            double dur_sec, int sample_rate, std::uint64_t seed);

struct UtterancePlan {
  std::string speaker;
  SpeechParams speech;
  Vec3 position;
  double onset_sec = 0.0;
  double duration_sec = 0.0;
  double level_db = 0.0;
};

struct LongformPlan {
  double duration_sec = 0.0;
  std::vector<UtterancePlan> utterances;
  double stationary_noise_db = -200.0;
  std::vector<TransientEvent> transient_noise;
  Room room;
  void validate() const;
};

struct LongformRender {
  MultichannelWaveform audio;
  DiarizationAnnotation diarization;  // word-level entries
  std::vector<std::string> speakers;  // distinct ids, first-appearance order
  std::vector<std::vector<double>> speaker_images_ch0;  // aligned with speakers
};

// Renders the conversation and word-level speaker timing. Words subdivide
// each utterance deterministically for the given seed.
LongformRender render_longform(const LongformPlan& plan, const ArrayGeometry& geom,
                               int sample_rate, std::uint64_t seed);

// Fraction of speech-active time with two or more simultaneous speakers.
double overlap_ratio(const std::vector<UtterancePlan>& utterances, double dur_sec,
                     double grid_sec = 0.01);

}  // namespace csskit

#endif  // CSSKIT_SIM_HPP_
