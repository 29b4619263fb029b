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
#include <complex>
#include <map>

#include "csskit/dsp.hpp"

namespace csskit {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Distinct sub-stream tags per scene component, so a component renders
// identically whether alone or inside a full scene.
constexpr std::uint64_t kSourceStream = 1000;
constexpr std::uint64_t kStationaryStream = 2000;
constexpr std::uint64_t kTransientStream = 3000;
constexpr std::uint64_t kWordStream = 4000;

double db_to_lin(double db) { return std::pow(10.0, db / 20.0); }

void normalize_rms(std::vector<double>& x, double target_rms) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  const double rms = std::sqrt(acc / static_cast<double>(x.size()));
  if (rms <= 0.0) return;
  const double g = target_rms / rms;
  for (auto& v : x) v *= g;
}

// Brickwall bandpass via the full-length FFT.
void bandpass(std::vector<double>& x, int sample_rate, double lo_hz, double hi_hz) {
  const std::size_t nfft = fft::next_pow2(x.size());
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  fft::transform(buf, false);
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(nfft);
    if (f < lo_hz || f > hi_hz) {
      buf[k] = 0.0;
      if (k > 0 && k < nfft / 2) buf[nfft - k] = 0.0;
    }
  }
  fft::transform(buf, true);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = buf[i].real();
}

std::vector<double> pink_noise(std::size_t len, int sample_rate, Rng& rng) {
  std::vector<double> x(len);
  for (auto& v : x) v = rng.normal();
  const std::size_t nfft = fft::next_pow2(len);
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < len; ++i) buf[i] = x[i];
  fft::transform(buf, false);
  for (std::size_t k = 1; k <= nfft / 2; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(nfft);
    const double g = 1.0 / std::sqrt(std::max(f, 20.0));
    buf[k] *= g;
    if (k < nfft / 2) buf[nfft - k] *= g;
  }
  buf[0] = 0.0;
  fft::transform(buf, true);
  for (std::size_t i = 0; i < len; ++i) x[i] = buf[i].real();
  normalize_rms(x, 1.0);
  return x;
}

}  // namespace

void ArrayGeometry::validate() const {
  require(!mics.empty(), ErrorCode::kInvalidArgument, "geometry has no microphones");
  for (std::size_t i = 0; i < mics.size(); ++i) {
    for (std::size_t j = i + 1; j < mics.size(); ++j) {
      require(distance(mics[i], mics[j]) > 0.0, ErrorCode::kInvalidArgument,
              "microphones ", i, " and ", j, " share a position");
    }
  }
}

void Scene::validate(double dur_sec) const {
  require(sources.size() <= 2, ErrorCode::kInvalidArgument,
          "scene has ", sources.size(), " sources; at most two are supported");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    require(std::isfinite(s.level_db), ErrorCode::kInvalidArgument,
            "source ", i, " level is not finite");
    require(s.onset_sec >= 0.0 && s.onset_sec < dur_sec, ErrorCode::kInvalidArgument,
            "source ", i, " onset ", s.onset_sec, " outside scene [0,", dur_sec, ")");
    require(s.duration_sec > 0.0, ErrorCode::kInvalidArgument, "source ", i,
            " has non-positive duration");
  }
  for (const auto& t : transient_noise) {
    require(t.onset_sec >= 0.0 && t.onset_sec < dur_sec, ErrorCode::kInvalidArgument,
            "transient onset ", t.onset_sec, " outside scene [0,", dur_sec, ")");
    require(t.duration_sec > 0.0, ErrorCode::kInvalidArgument,
            "transient duration must be > 0");
    require(std::isfinite(t.level_db), ErrorCode::kInvalidArgument,
            "transient level is not finite");
  }
}

std::vector<double> synth_speech(const SpeechParams& params, double dur_sec,
                                 int sample_rate, std::uint64_t seed) {
  require(dur_sec > 0.0, ErrorCode::kInvalidArgument,
          "synth_speech: duration must be > 0, got ", dur_sec);
  require(params.band_lo_hz > 0.0 && params.band_hi_hz > params.band_lo_hz &&
              params.band_hi_hz < sample_rate / 2.0,
          ErrorCode::kInvalidArgument, "synth_speech: bad band [", params.band_lo_hz,
          ",", params.band_hi_hz, "] at fs ", sample_rate);

  Rng rng(seed);
  const auto len = static_cast<std::size_t>(dur_sec * sample_rate);
  std::vector<double> x(len, 0.0);

  if (params.kind == SpeechKind::kAmTone) {
    // Carrier inside the band with margin for the AM sidebands.
    const double margin = 2.0 * params.am_rate_hz + 10.0;
    const double lo = params.band_lo_hz + margin;
    const double hi = std::max(lo + 1.0, params.band_hi_hz - margin);
    const double carrier = rng.uniform(lo, hi);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    const double am_phase = rng.uniform(0.0, 2.0 * kPi);
    for (std::size_t n = 0; n < len; ++n) {
      const double t = static_cast<double>(n) / sample_rate;
      const double env = 0.55 + 0.45 * std::sin(2.0 * kPi * params.am_rate_hz * t + am_phase);
      x[n] = env * std::sin(2.0 * kPi * carrier * t + phase);
    }
  } else {
    for (auto& v : x) v = rng.normal();
    bandpass(x, sample_rate, params.band_lo_hz, params.band_hi_hz);
    // Syllable-like bursts: alternating voiced/silent stretches.
    std::size_t n = 0;
    while (n < len) {
      const auto on = static_cast<std::size_t>(rng.uniform(0.15, 0.40) * sample_rate);
      const auto off = static_cast<std::size_t>(rng.uniform(0.05, 0.15) * sample_rate);
      const std::size_t end = std::min(len, n + on);
      for (std::size_t i = n; i < end; ++i) {
        const double pos = static_cast<double>(i - n) / static_cast<double>(end - n);
        x[i] *= 0.5 * (1.0 - std::cos(2.0 * kPi * pos));
      }
      for (std::size_t i = end; i < std::min(len, end + off); ++i) x[i] = 0.0;
      n = end + off;
    }
  }
  normalize_rms(x, 1.0);
  return x;
}

MultichannelWaveform propagate(const std::vector<double>& src, int sample_rate,
                               const Vec3& src_pos, const ArrayGeometry& geom,
                               double sound_speed) {
  geom.validate();
  require(!src.empty(), ErrorCode::kInvalidArgument, "propagate: empty source");
  require(sound_speed > 0.0, ErrorCode::kInvalidArgument,
          "propagate: sound speed must be > 0");

  std::vector<double> delays(geom.mics.size());
  std::vector<double> gains(geom.mics.size());
  double max_delay = 0.0;
  for (std::size_t m = 0; m < geom.mics.size(); ++m) {
    const double dist = distance(src_pos, geom.mics[m]);
    require(dist > 0.0, ErrorCode::kInvalidArgument,
            "propagate: source coincides with microphone ", m);
    delays[m] = dist / sound_speed * sample_rate;  // samples, fractional
    gains[m] = 1.0 / dist;
    max_delay = std::max(max_delay, delays[m]);
  }

  const std::size_t out_len =
      src.size() + static_cast<std::size_t>(std::ceil(max_delay)) + 64;
  const std::size_t nfft = fft::next_pow2(out_len + 64);
  std::vector<std::complex<double>> base(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < src.size(); ++i) base[i] = src[i];
  fft::transform(base, false);

  MultichannelWaveform out(sample_rate, static_cast<int>(geom.mics.size()), out_len);
  std::vector<std::complex<double>> buf(nfft);
  for (std::size_t m = 0; m < geom.mics.size(); ++m) {
    const double d = delays[m];
    buf[0] = base[0] * gains[m];
    for (std::size_t k = 1; k < nfft / 2; ++k) {
      const double ang = -2.0 * kPi * static_cast<double>(k) * d / static_cast<double>(nfft);
      const std::complex<double> ph(std::cos(ang), std::sin(ang));
      buf[k] = base[k] * ph * gains[m];
      buf[nfft - k] = std::conj(buf[k]);
    }
    buf[nfft / 2] = base[nfft / 2] * std::cos(kPi * d) * gains[m];
    fft::transform(buf, true);
    for (std::size_t i = 0; i < out_len; ++i) {
      out.channels[m][i] = buf[i].real();
    }
  }
  return out;
}

namespace {

// Renders one source (with optional floor reflection) into per-channel
// images, trimmed/placed on the scene timeline.
MultichannelWaveform render_source_images(const std::vector<double>& sig,
                                          int sample_rate, const Vec3& pos,
                                          const ArrayGeometry& geom, const Room& room,
                                          double onset_sec, std::size_t scene_len) {
  MultichannelWaveform images(sample_rate, static_cast<int>(geom.mics.size()),
                              scene_len);
  const auto onset = static_cast<std::size_t>(onset_sec * sample_rate);
  auto add_path = [&](const Vec3& p, double gain) {
    const MultichannelWaveform w = propagate(sig, sample_rate, p, geom, room.sound_speed);
    for (int c = 0; c < w.num_channels(); ++c) {
      const auto& src = w.channels[static_cast<std::size_t>(c)];
      auto& dst = images.channels[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < src.size() && onset + i < scene_len; ++i) {
        dst[onset + i] += gain * src[i];
      }
    }
  };
  add_path(pos, 1.0);
  if (room.reflection_gain > 0.0) {
    add_path(Vec3{pos.x, pos.y, -pos.z}, room.reflection_gain);
  }
  return images;
}

}  // namespace

TrainingSample render_scene(const Scene& scene, const ArrayGeometry& geom,
                            double dur_sec, int sample_rate, std::uint64_t seed) {
  geom.validate();
  require(dur_sec > 0.0, ErrorCode::kInvalidArgument, "render_scene: duration <= 0");
  scene.validate(dur_sec);

  Rng master(seed);
  const auto len = static_cast<std::size_t>(dur_sec * sample_rate);
  const int channels = static_cast<int>(geom.mics.size());

  TrainingSample sample;
  sample.mixture = MultichannelWaveform(sample_rate, channels, len);
  sample.stationary_noise_ch0.assign(len, 0.0);
  sample.transient_noise_ch0.assign(len, 0.0);

  for (std::size_t i = 0; i < scene.sources.size(); ++i) {
    const auto& s = scene.sources[i];
    const Rng srng = master.fork(kSourceStream + (s.stream_tag ? s.stream_tag : i));
    std::vector<double> sig =
        synth_speech(s.speech, s.duration_sec, sample_rate, srng.seed());
    const double g = db_to_lin(s.level_db);
    for (auto& v : sig) v *= g;
    const MultichannelWaveform images =
        render_source_images(sig, sample_rate, s.position, geom, scene.room,
                             s.onset_sec, len);
    add_into(sample.mixture, images);
    sample.speech_images_ch0.push_back(images.channels[0]);
  }

  if (scene.stationary_noise_db > -150.0) {
    Rng nrng = master.fork(kStationaryStream);
    const double g = db_to_lin(scene.stationary_noise_db);
    for (int c = 0; c < channels; ++c) {
      Rng crng = nrng.fork(static_cast<std::uint64_t>(c));
      std::vector<double> noise = pink_noise(len, sample_rate, crng);
      for (std::size_t i = 0; i < len; ++i) {
        const double v = g * noise[i];
        sample.mixture.channels[static_cast<std::size_t>(c)][i] += v;
        if (c == 0) sample.stationary_noise_ch0[i] = v;
      }
    }
  }

  for (std::size_t t = 0; t < scene.transient_noise.size(); ++t) {
    const auto& ev = scene.transient_noise[t];
    Rng trng = master.fork(kTransientStream + t);
    const auto onset = static_cast<std::size_t>(ev.onset_sec * sample_rate);
    const auto n = static_cast<std::size_t>(ev.duration_sec * sample_rate);
    const double g = db_to_lin(ev.level_db);
    for (int c = 0; c < channels; ++c) {
      Rng crng = trng.fork(static_cast<std::uint64_t>(c));
      for (std::size_t i = 0; i < n && onset + i < len; ++i) {
        const double pos = static_cast<double>(i) / static_cast<double>(n);
        const double env = 0.5 * (1.0 - std::cos(2.0 * kPi * pos));
        const double v = g * env * crng.normal();
        sample.mixture.channels[static_cast<std::size_t>(c)][onset + i] += v;
        if (c == 0) sample.transient_noise_ch0[onset + i] += v;
      }
    }
  }

  return sample;
}

void LongformPlan::validate() const {
  require(!utterances.empty(), ErrorCode::kInvalidArgument,
          "longform plan has no utterances");
  require(duration_sec > 0.0, ErrorCode::kInvalidArgument,
          "longform plan duration must be > 0");
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const auto& u = utterances[i];
    require(!u.speaker.empty(), ErrorCode::kInvalidArgument, "utterance ", i,
            " has an empty speaker id");
    require(u.onset_sec >= 0.0 && u.duration_sec > 0.0 &&
                u.onset_sec + u.duration_sec <= duration_sec + 1e-9,
            ErrorCode::kInvalidArgument, "utterance ", i, " [", u.onset_sec, ",",
            u.onset_sec + u.duration_sec, ") does not fit in the plan");
  }
}

LongformRender render_longform(const LongformPlan& plan, const ArrayGeometry& geom,
                               int sample_rate, std::uint64_t seed) {
  plan.validate();
  geom.validate();
  Rng master(seed);
  const auto len = static_cast<std::size_t>(plan.duration_sec * sample_rate);
  const int channels = static_cast<int>(geom.mics.size());

  LongformRender out;
  out.audio = MultichannelWaveform(sample_rate, channels, len);

  std::map<std::string, std::size_t> speaker_index;
  for (std::size_t i = 0; i < plan.utterances.size(); ++i) {
    const auto& u = plan.utterances[i];
    if (!speaker_index.count(u.speaker)) {
      speaker_index[u.speaker] = out.speakers.size();
      out.speakers.push_back(u.speaker);
      out.speaker_images_ch0.emplace_back(len, 0.0);
    }
    const Rng urng = master.fork(kSourceStream + i);
    std::vector<double> sig =
        synth_speech(u.speech, u.duration_sec, sample_rate, urng.seed());
    const double g = db_to_lin(u.level_db);
    for (auto& v : sig) v *= g;
    const MultichannelWaveform images = render_source_images(
        sig, sample_rate, u.position, geom, plan.room, u.onset_sec, len);
    add_into(out.audio, images);
    auto& spk_img = out.speaker_images_ch0[speaker_index[u.speaker]];
    for (std::size_t s = 0; s < len; ++s) spk_img[s] += images.channels[0][s];

    // Word-level timing: deterministic subdivision of the utterance.
    Rng wrng = master.fork(kWordStream + i);
    double t = u.onset_sec;
    const double end = u.onset_sec + u.duration_sec;
    int word_no = 0;
    while (t < end - 1e-9) {
      const double wlen = std::min(wrng.uniform(0.25, 0.55), end - t);
      DiarEntry e;
      e.speaker = u.speaker;
      e.start = t;
      e.end = t + wlen;
      e.word = "w" + std::to_string(word_no++);
      out.diarization.entries.push_back(std::move(e));
      t += wlen;
    }
  }

  if (plan.stationary_noise_db > -150.0) {
    Rng nrng = master.fork(kStationaryStream);
    const double g = db_to_lin(plan.stationary_noise_db);
    for (int c = 0; c < channels; ++c) {
      Rng crng = nrng.fork(static_cast<std::uint64_t>(c));
      std::vector<double> noise = pink_noise(len, sample_rate, crng);
      for (std::size_t s = 0; s < len; ++s) {
        out.audio.channels[static_cast<std::size_t>(c)][s] += g * noise[s];
      }
    }
  }

  std::sort(out.diarization.entries.begin(), out.diarization.entries.end(),
            [](const DiarEntry& a, const DiarEntry& b) { return a.start < b.start; });
  out.diarization.validate();
  return out;
}

double overlap_ratio(const std::vector<UtterancePlan>& utterances, double dur_sec,
                     double grid_sec) {
  require(dur_sec > 0.0 && grid_sec > 0.0, ErrorCode::kInvalidArgument,
          "overlap_ratio: durations must be positive");
  const auto n = static_cast<std::size_t>(dur_sec / grid_sec);
  std::size_t active = 0;
  std::size_t overlapped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * grid_sec;
    int count = 0;
    for (const auto& u : utterances) {
      if (t >= u.onset_sec && t < u.onset_sec + u.duration_sec) ++count;
    }
    if (count >= 1) ++active;
    if (count >= 2) ++overlapped;
  }
  return active == 0 ? 0.0 : static_cast<double>(overlapped) / static_cast<double>(active);
}

}  // namespace csskit
