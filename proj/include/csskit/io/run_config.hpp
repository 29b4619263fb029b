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

#ifndef CSSKIT_IO_RUN_CONFIG_HPP_
#define CSSKIT_IO_RUN_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csskit/css.hpp"
#include "csskit/dsp.hpp"
#include "csskit/net.hpp"
#include "csskit/sim.hpp"

namespace csskit {

// JSON run configuration. Unknown keys are rejected; validation failures are
// reported all at once, each naming its key path and reason. All randomness
// funnels through the single top-level seed.
struct SimulateRunConfig {
  std::string kind = "dataset";  // dataset | longform
  int num_samples = 40;
  double duration_sec = 2.0;
  std::vector<Vec3> geometry;  // empty selects the default 3-mic triangle
  double stationary_noise_db = -28.0;
  double transient_rate = 0.5;  // expected transient events per sample
  std::array<double, 2> band_a = {300.0, 1000.0};
  std::array<double, 2> band_b = {2500.0, 4500.0};
  // longform-only:
  double longform_duration_sec = 30.0;
  int speakers = 3;
  double overlap_fraction = 0.35;
};

struct TrainDataConfig {
  std::string sim_manifest;
  std::string longform_wav;
  std::string annotation;
  std::string segments;            // precomputed segment table; optional
  std::string scores;              // one quality score per line, segment order
  std::string segmentation = "cts";  // cts | fws
  std::optional<double> quality_threshold;
  double min_segment_sec = 0.5;
  double two_speaker_factor = 2.0;
};

struct TrainRunConfig {
  int stage = 1;
  double base_lr = 1e-4;
  double lr_decay = 0.99998;
  double weight_decay = 1e-5;
  int batch_size = 4;
  int steps = 400;
  int checkpoint_every = 200;
  double crop_sec = 2.0;
  int student_channels_min = 2;
  int student_channels_max = 0;  // 0 = up to all available
  double mix_sim_fraction = 0.25;
  double holdout_fraction = 0.2;
  TrainDataConfig data;
};

struct EvalRunConfig {
  std::string manifest;
  std::vector<std::string> estimates;
  std::vector<std::string> references;
  std::string method = "masking";
};

struct RunConfig {
  std::uint64_t seed = 1234;
  int threads = 0;  // 0 = library default
  StftConfig stft;
  NetConfig net;  // bins always derived from stft
  TrainRunConfig train;
  CssConfig css;
  SimulateRunConfig simulate;
  std::string separate_input;
  EvalRunConfig eval;
};

RunConfig parse_run_config_text(const std::string& text, const std::string& origin);
RunConfig parse_run_config(const std::string& path);

ArrayGeometry default_geometry(int channels = 3);

}  // namespace csskit

#endif  // CSSKIT_IO_RUN_CONFIG_HPP_
