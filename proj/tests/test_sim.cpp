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

#include "csskit/sim.hpp"

#include <algorithm>
#include <cmath>

#include "csskit/dsp.hpp"
#include "csskit/metrics.hpp"
#include "doctest.h"
#include "oracle/report.hpp"

using namespace csskit;

namespace {

constexpr int kRate = 16000;

ArrayGeometry triangle_array() {
  ArrayGeometry g;
  g.mics = {{0.0, 0.0, 1.0}, {0.08, 0.0, 1.0}, {0.04, 0.07, 1.0}};
  return g;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("synth_speech guards and determinism") {
  SpeechParams p;
  CHECK_THROWS_AS(synth_speech(p, 0.0, kRate, 1), Error);

  const auto a = synth_speech(p, 0.5, kRate, 42);
  const auto b = synth_speech(p, 0.5, kRate, 42);
  CHECK(a == b);
  const auto c = synth_speech(p, 0.5, kRate, 43);
  CHECK(a != c);
}

TEST_CASE("am tone energy stays in its stated band") {
  SpeechParams p;
  p.kind = SpeechKind::kAmTone;
  p.band_lo_hz = 400.0;
  p.band_hi_hz = 1200.0;
  const auto sig = synth_speech(p, 1.0, kRate, 7);

  MultichannelWaveform w(kRate, 1, sig.size());
  w.channels[0] = sig;
  StftConfig cfg;
  const Spectrogram spec = stft(w, cfg);
  double in_band = 0.0, total = 0.0;
  for (int f = 0; f < spec.bins; ++f) {
    const double hz = static_cast<double>(f) * kRate / cfg.fft_size;
    double e = 0.0;
    for (int n = 0; n < spec.frames; ++n) e += std::norm(spec.at(0, f, n));
    total += e;
    // One bin of leakage margin on each side.
    if (hz >= p.band_lo_hz - 2.0 * kRate / cfg.fft_size &&
        hz <= p.band_hi_hz + 2.0 * kRate / cfg.fft_size) {
      in_band += e;
    }
  }
  CHECK(oracle::report_at_least("sim.am_tone_band_energy", in_band / total, 0.95));
}

TEST_CASE("filtered noise bursts stay in band too") {
  SpeechParams p;
  p.kind = SpeechKind::kFilteredNoiseBursts;
  p.band_lo_hz = 2000.0;
  p.band_hi_hz = 4000.0;
  const auto sig = synth_speech(p, 1.0, kRate, 11);
  MultichannelWaveform w(kRate, 1, sig.size());
  w.channels[0] = sig;
  StftConfig cfg;
  const Spectrogram spec = stft(w, cfg);
  double in_band = 0.0, total = 0.0;
  for (int f = 0; f < spec.bins; ++f) {
    const double hz = static_cast<double>(f) * kRate / cfg.fft_size;
    double e = 0.0;
    for (int n = 0; n < spec.frames; ++n) e += std::norm(spec.at(0, f, n));
    total += e;
    if (hz >= p.band_lo_hz - 3.0 * kRate / cfg.fft_size &&
        hz <= p.band_hi_hz + 3.0 * kRate / cfg.fft_size) {
      in_band += e;
    }
  }
  CHECK(in_band / total > 0.95);
}

TEST_CASE("propagate: equidistant mics receive identical channels") {
  ArrayGeometry g;
  g.mics = {{-0.05, 0.0, 0.0}, {0.05, 0.0, 0.0}};
  const Vec3 src{0.0, 1.3, 0.0};  // on the perpendicular bisector
  const auto sig = synth_speech(SpeechParams{}, 0.3, kRate, 3);
  const auto out = propagate(sig, kRate, src, g);
  CHECK(max_abs_diff(out.channels[0], out.channels[1]) < 1e-9);
}

TEST_CASE("propagate: 3.43 m at 343 m/s is a 160 sample delay") {
  ArrayGeometry g;
  g.mics = {{0.0, 0.0, 0.0}, {0.0, 3.43, 0.0}};
  const Vec3 src{0.0, 6.86, 0.0};  // 6.86 m to mic 0, 3.43 m to mic 1
  const auto sig = synth_speech(SpeechParams{}, 0.4, kRate, 5);
  const auto out = propagate(sig, kRate, src, g);

  // Cross-correlation peak between the two channels sits at lag 160.
  int best_lag = -1;
  double best = -1.0;
  for (int lag = 0; lag <= 400; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < out.num_samples(); ++i) {
      acc += out.channels[1][i] * out.channels[0][i + static_cast<std::size_t>(lag)];
    }
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  CHECK(oracle::report_case("sim.propagate_delay_lag", best_lag, 160, best_lag == 160));
}

TEST_CASE("propagate: doubling distance halves amplitude") {
  // Distances chosen to give whole-sample delays (100 and 200 samples), so
  // the two channels are exact shifted-and-scaled copies.
  ArrayGeometry g;
  g.mics = {{0.0, 2.14375, 0.0}, {0.0, 4.2875, 0.0}};
  const Vec3 src{0.0, 0.0, 0.0};
  const auto sig = synth_speech(SpeechParams{}, 0.3, kRate, 9);
  const auto out = propagate(sig, kRate, src, g);
  const double ratio = max_abs(out.channels[0]) / max_abs(out.channels[1]);
  CHECK(ratio == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("propagate rejects a source on top of a mic") {
  ArrayGeometry g;
  g.mics = {{0.0, 0.0, 0.0}};
  CHECK_THROWS_WITH_AS(propagate({0.1, 0.2}, kRate, Vec3{0, 0, 0}, g),
                       doctest::Contains("coincides"), Error);
}

namespace {

Scene two_source_scene(bool with_noise) {
  Scene scene;
  SceneSource a;
  a.speech.band_lo_hz = 300;
  a.speech.band_hi_hz = 1000;
  a.position = {1.0, 0.5, 1.0};
  a.duration_sec = 1.5;
  a.stream_tag = 11;
  SceneSource b;
  b.speech.band_lo_hz = 2500;
  b.speech.band_hi_hz = 4500;
  b.position = {-0.8, 1.1, 1.0};
  b.duration_sec = 1.5;
  b.stream_tag = 23;
  scene.sources = {a, b};
  if (with_noise) {
    scene.stationary_noise_db = -30.0;
    scene.transient_noise = {{0.6, 0.2, -25.0}};
  }
  return scene;
}

}  // namespace

TEST_CASE("render_scene additivity across component renders") {
  const ArrayGeometry geom = triangle_array();
  const Scene full = two_source_scene(true);

  Scene only_a = full;
  only_a.sources = {full.sources[0]};
  only_a.stationary_noise_db = -200.0;
  only_a.transient_noise.clear();
  Scene only_b = only_a;
  only_b.sources = {full.sources[1]};
  Scene only_noise = full;
  only_noise.sources.clear();

  const auto sum = [&](int c) {
    const auto ra = render_scene(only_a, geom, 1.5, kRate, 77);
    const auto rb = render_scene(only_b, geom, 1.5, kRate, 77);
    const auto rn = render_scene(only_noise, geom, 1.5, kRate, 77);
    std::vector<double> s(ra.mixture.num_samples(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = ra.mixture.channels[static_cast<std::size_t>(c)][i] +
             rb.mixture.channels[static_cast<std::size_t>(c)][i] +
             rn.mixture.channels[static_cast<std::size_t>(c)][i];
    }
    return s;
  };

  const auto whole = render_scene(full, geom, 1.5, kRate, 77);
  double worst = 0.0;
  for (int c = 0; c < 3; ++c) {
    worst = std::max(worst, max_abs_diff(whole.mixture.channels[static_cast<std::size_t>(c)], sum(c)));
  }
  CHECK(oracle::report_below("sim.render_additivity", worst, 1e-9));
}

TEST_CASE("reference images sum to the mixture's first channel") {
  const ArrayGeometry geom = triangle_array();
  const auto sample = render_scene(two_source_scene(true), geom, 1.5, kRate, 5);
  std::vector<double> sum(sample.mixture.num_samples(), 0.0);
  for (const auto& img : sample.speech_images_ch0) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += img[i];
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    sum[i] += sample.stationary_noise_ch0[i] + sample.transient_noise_ch0[i];
  }
  CHECK(oracle::report_below("sim.reference_consistency",
                             max_abs_diff(sum, sample.mixture.channels[0]), 1e-6));
}

TEST_CASE("zero sources leaves only noise; per-seed renders are bitwise equal") {
  const ArrayGeometry geom = triangle_array();
  Scene scene = two_source_scene(true);
  scene.sources.clear();
  const auto a = render_scene(scene, geom, 1.0, kRate, 31);
  CHECK(a.speech_images_ch0.empty());
  double energy = 0.0;
  for (double v : a.mixture.channels[0]) energy += v * v;
  CHECK(energy > 0.0);

  const auto b = render_scene(scene, geom, 1.0, kRate, 31);
  for (int c = 0; c < 3; ++c) {
    CHECK(a.mixture.channels[static_cast<std::size_t>(c)] ==
          b.mixture.channels[static_cast<std::size_t>(c)]);
  }
}

TEST_CASE("ideal ratio masks separate disjoint-band sources above 20 dB") {
  const ArrayGeometry geom = triangle_array();
  const auto sample = render_scene(two_source_scene(false), geom, 1.5, kRate, 13);
  StftConfig cfg;

  const Spectrogram mix_spec = stft(sample.mixture, cfg);
  const std::size_t len = sample.mixture.num_samples();

  auto image_mag = [&](const std::vector<double>& img) {
    MultichannelWaveform w(kRate, 1, len);
    w.channels[0] = img;
    return channel_magnitude(stft(w, cfg), 0);
  };
  const std::array<std::vector<double>, 2> speech_mag = {
      image_mag(sample.speech_images_ch0[0]), image_mag(sample.speech_images_ch0[1])};
  const std::size_t grid = speech_mag[0].size();
  const std::array<std::vector<double>, 2> noise_mag = {
      std::vector<double>(grid, 0.0), std::vector<double>(grid, 0.0)};
  const MaskSet irm =
      ideal_ratio_masks(speech_mag, noise_mag, mix_spec.bins, mix_spec.frames);

  double worst = 1e9;
  for (int s = 0; s < 2; ++s) {
    Spectrogram masked = mix_spec.channel(0);
    for (int f = 0; f < masked.bins; ++f) {
      for (int n = 0; n < masked.frames; ++n) {
        masked.at(0, f, n) *= irm.at(s, f, n);
      }
    }
    const auto est = istft(masked, cfg, len);
    worst = std::min(worst, si_snr_db(est.channels[0], sample.speech_images_ch0[static_cast<std::size_t>(s)]));
  }
  CHECK(oracle::report_at_least("sim.irm_separation_si_snr_db", worst, 20.0));
}

TEST_CASE("render_longform basic plan") {
  ArrayGeometry geom = triangle_array();
  LongformPlan plan;
  plan.duration_sec = 10.0;
  UtterancePlan u;
  u.speaker = "spk0";
  u.position = {1.0, 1.0, 1.2};
  u.onset_sec = 0.0;
  u.duration_sec = 5.0;
  plan.utterances = {u};

  const auto render = render_longform(plan, geom, kRate, 21);
  CHECK(render.audio.num_samples() == static_cast<std::size_t>(10 * kRate));
  REQUIRE(render.speakers.size() == 1);
  REQUIRE(!render.diarization.entries.empty());
  CHECK(render.diarization.entries.front().start == doctest::Approx(0.0));
  CHECK(render.diarization.entries.back().end == doctest::Approx(5.0).epsilon(1e-6));
  // One contiguous talk spurt: transcription-based segmentation sees a single
  // segment.
  const auto segs = cts(render.diarization);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].start == doctest::Approx(0.0));
  CHECK(segs[0].end == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("render_longform lists sequential speakers with stated boundaries") {
  ArrayGeometry geom = triangle_array();
  LongformPlan plan;
  plan.duration_sec = 9.0;
  for (int s = 0; s < 3; ++s) {
    UtterancePlan u;
    u.speaker = "spk" + std::to_string(s);
    u.position = {1.0 - 0.5 * s, 1.0, 1.2};
    u.onset_sec = 3.0 * s;
    u.duration_sec = 2.5;
    plan.utterances.push_back(u);
  }
  const auto render = render_longform(plan, geom, kRate, 33);
  CHECK(render.speakers.size() == 3);
  for (int s = 0; s < 3; ++s) {
    double lo = 1e9, hi = -1e9;
    for (const auto& e : render.diarization.entries) {
      if (e.speaker == "spk" + std::to_string(s)) {
        lo = std::min(lo, e.start);
        hi = std::max(hi, e.end);
      }
    }
    CHECK(lo == doctest::Approx(3.0 * s));
    CHECK(hi == doctest::Approx(3.0 * s + 2.5).epsilon(1e-6));
  }
}

TEST_CASE("rendered overlap ratio matches the plan") {
  ArrayGeometry geom = triangle_array();
  LongformPlan plan;
  plan.duration_sec = 20.0;
  Rng rng(3);
  double t = 0.0;
  int idx = 0;
  while (t < 18.0) {
    UtterancePlan u;
    u.speaker = idx % 2 ? "A" : "B";
    u.position = {idx % 2 ? 1.0 : -1.0, 1.0, 1.2};
    u.onset_sec = t;
    u.duration_sec = rng.uniform(1.0, 2.0);
    plan.utterances.push_back(u);
    // Next turn starts before this one ends about half the time.
    t += u.duration_sec * rng.uniform(0.6, 1.3);
    ++idx;
  }
  const double planned = overlap_ratio(plan.utterances, plan.duration_sec);
  REQUIRE(planned > 0.02);

  const auto render = render_longform(plan, geom, kRate, 8);
  // Measure overlap from the rendered per-speaker images.
  const std::size_t n = render.audio.num_samples();
  std::size_t active = 0, overlapped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int count = 0;
    for (const auto& img : render.speaker_images_ch0) {
      if (std::fabs(img[i]) > 1e-7) ++count;
    }
    if (count >= 1) ++active;
    if (count >= 2) ++overlapped;
  }
  const double measured = static_cast<double>(overlapped) / static_cast<double>(active);
  CHECK(oracle::report_below("sim.overlap_ratio_abs_err", std::fabs(measured - planned),
                             0.02));
}

TEST_CASE("longform plan validation") {
  LongformPlan plan;
  CHECK_THROWS_AS(plan.validate(), Error);
  plan.duration_sec = 5.0;
  UtterancePlan u;
  u.speaker = "A";
  u.onset_sec = 4.0;
  u.duration_sec = 2.0;  // runs past the end
  plan.utterances = {u};
  CHECK_THROWS_AS(plan.validate(), Error);
}
