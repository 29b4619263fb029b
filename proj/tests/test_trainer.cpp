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

#include "csskit/trainer.hpp"

#include <cmath>

#include "csskit/pipeline.hpp"
#include "doctest.h"
#include "oracle/report.hpp"

using namespace csskit;

namespace {

// Miniature problem: short scenes, a coarse stft grid, a small model.
StftConfig mini_stft() {
  StftConfig cfg;
  cfg.window_len = 64;
  cfg.hop = 32;
  cfg.fft_size = 64;
  return cfg;
}

NetConfig mini_net() {
  NetConfig cfg;
  cfg.num_blocks = 1;
  cfg.layers_per_block = 1;
  cfg.model_dim = 8;
  cfg.attention_heads = 2;
  cfg.conv_kernel = 5;
  cfg.bins = 33;
  return cfg;
}

SimulateRunConfig mini_sim() {
  SimulateRunConfig sim;
  sim.num_samples = 6;
  sim.duration_sec = 0.3;
  sim.stationary_noise_db = -30.0;
  sim.transient_rate = 0.3;
  return sim;
}

TrainerConfig mini_trainer(std::uint64_t seed) {
  TrainerConfig cfg;
  cfg.batch_size = 2;
  cfg.steps = 3;
  cfg.checkpoint_every = 100;
  cfg.crop_sec = 0.3;
  cfg.seed = seed;
  return cfg;
}

struct Stage2Fixture {
  ArrayGeometry geom = default_geometry(3);
  MultichannelWaveform audio;
  std::vector<Segment> segments;

  Stage2Fixture() {
    SimulateRunConfig sim = mini_sim();
    sim.longform_duration_sec = 8.0;
    sim.speakers = 2;
    sim.overlap_fraction = 0.4;
    const LongformPlan plan = pipeline::make_longform_plan(sim, 11);
    const LongformRender render = render_longform(plan, geom, 16000, 17);
    audio = render.audio;
    segments = filter_min_length(cts(render.diarization), 0.3);
    REQUIRE(!segments.empty());
  }
};

}  // namespace

TEST_CASE("zero steps leave the model and optimizer untouched") {
  const SimDataset data =
      pipeline::procedural_dataset(mini_sim(), default_geometry(3), 3, 6, 16000);
  auto model = MaskNet::random_init(mini_net(), 5);
  const std::uint64_t before = model.params().content_hash();
  Adam adam;
  TrainerConfig cfg = mini_trainer(1);
  cfg.steps = 0;
  const TrainResult result = train_stage1(model, adam, data, mini_stft(), cfg);
  CHECK(result.curve.empty());
  CHECK(model.params().content_hash() == before);
  CHECK(adam.step_count() == 0);
}

TEST_CASE("stage-1 training is deterministic for a fixed seed") {
  const SimDataset data =
      pipeline::procedural_dataset(mini_sim(), default_geometry(3), 3, 6, 16000);
  auto run = [&]() {
    auto model = MaskNet::random_init(mini_net(), 5);
    Adam adam;
    train_stage1(model, adam, data, mini_stft(), mini_trainer(42));
    return model.params().content_hash();
  };
  CHECK(run() == run());
}

TEST_CASE("stage-1 training changes parameters and logs the curve") {
  const SimDataset data =
      pipeline::procedural_dataset(mini_sim(), default_geometry(3), 3, 6, 16000);
  auto model = MaskNet::random_init(mini_net(), 5);
  const std::uint64_t before = model.params().content_hash();
  Adam adam;
  int hook_calls = 0;
  TrainerConfig cfg = mini_trainer(42);
  cfg.checkpoint_every = 2;
  const TrainResult result =
      train_stage1(model, adam, data, mini_stft(), cfg, [&](int) { ++hook_calls; });
  CHECK(model.params().content_hash() != before);
  CHECK(result.curve.size() == 3);
  CHECK(result.curve[0].lr == doctest::Approx(1e-4));
  CHECK(result.curve[1].lr < result.curve[0].lr);
  CHECK(hook_calls == 1);
  CHECK(adam.step_count() == 3);
}

TEST_CASE("stage-2 keeps the teacher frozen") {
  Stage2Fixture fx;
  const auto teacher = MaskNet::random_init(mini_net(), 7);
  const std::uint64_t teacher_hash = teacher.params().content_hash();
  auto student = MaskNet::random_init(mini_net(), 9);
  Adam adam;
  LongformData longform;
  longform.audio = &fx.audio;
  longform.segments = fx.segments;
  train_stage2(teacher, student, adam, longform, nullptr, mini_stft(),
               mini_trainer(21));
  CHECK(teacher.params().content_hash() == teacher_hash);
}

TEST_CASE("stage-2 loss is zero only when an identical student sees all channels") {
  Stage2Fixture fx;
  const auto teacher = MaskNet::random_init(mini_net(), 7);
  auto student = MaskNet::random_init(mini_net(), 7);  // same init == same model

  auto mean_first_losses = [&](int channels_min, int channels_max) {
    Adam adam;
    auto clone = MaskNet(student.config(), student.params().clone());
    TrainerConfig cfg = mini_trainer(33);
    cfg.base_lr = 1e-30;  // effectively frozen; we only probe the loss
    cfg.steps = 2;
    cfg.student_channels_min = channels_min;
    cfg.student_channels_max = channels_max;
    LongformData longform;
    longform.audio = &fx.audio;
    longform.segments = fx.segments;
    const TrainResult r =
        train_stage2(teacher, clone, adam, longform, nullptr, mini_stft(), cfg);
    double acc = 0.0;
    for (const auto& e : r.curve) acc += e.loss;
    return acc / static_cast<double>(r.curve.size());
  };

  const double all_channels = mean_first_losses(3, 3);
  const double subset = mean_first_losses(2, 2);
  CHECK(all_channels == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(subset > 1e-4);
}

TEST_CASE("mix_sim_fraction = 1 reduces stage-2 to stage-1 exactly") {
  Stage2Fixture fx;
  const SimDataset sim =
      pipeline::procedural_dataset(mini_sim(), default_geometry(3), 3, 6, 16000);

  auto a = MaskNet::random_init(mini_net(), 5);
  {
    Adam adam;
    train_stage1(a, adam, sim, mini_stft(), mini_trainer(77));
  }

  auto b = MaskNet::random_init(mini_net(), 5);
  {
    const auto teacher = MaskNet::random_init(mini_net(), 7);
    Adam adam;
    TrainerConfig cfg = mini_trainer(77);
    cfg.mix_sim_fraction = 1.0;
    LongformData longform;
    longform.audio = &fx.audio;
    longform.segments = fx.segments;
    train_stage2(teacher, b, adam, longform, &sim, mini_stft(), cfg);
  }
  CHECK(a.params().content_hash() == b.params().content_hash());
}

TEST_CASE("evaluate reports improvement metrics and the oracle ceiling") {
  const SimDataset data =
      pipeline::procedural_dataset(mini_sim(), default_geometry(3), 3, 4, 16000);
  const auto model = MaskNet::random_init(mini_net(), 5);
  const EvalResult r = evaluate(model, data, OutputMethod::kMasking, mini_stft());
  CHECK(r.num_samples == 4);
  CHECK(std::isfinite(r.si_snri_db));
  CHECK(r.mask_mse_vs_irm > 0.0);
  // Ideal masks sit well above a random-init model.
  CHECK(r.irm_si_snri_db > r.si_snri_db);
}

TEST_CASE("evaluate with identical outputs and references caps the SI-SNR") {
  std::vector<double> ref(4000);
  Rng rng(5);
  for (auto& v : ref) v = rng.uniform(-1, 1);
  CHECK(si_snr_db(ref, ref) == 60.0);
}

TEST_CASE("streams equal to the mixture give zero improvement") {
  const SimDataset data =
      pipeline::procedural_dataset(mini_sim(), default_geometry(3), 9, 1, 16000);
  const TrainingSample sample = data.get(0);
  const std::array<std::vector<double>, 2> est = {sample.mixture.channels[0],
                                                  sample.mixture.channels[0]};
  const std::array<std::vector<double>, 2> refs = {sample.speech_images_ch0[0],
                                                   sample.speech_images_ch0[1]};
  const RegionSiSnri r =
      region_si_snr_improvement(est, refs, sample.mixture.channels[0]);
  CHECK(r.overall == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("teacher_student_mask_mse is zero for identical models") {
  Stage2Fixture fx;
  const auto a = MaskNet::random_init(mini_net(), 7);
  const auto b = MaskNet(a.config(), a.params().clone());
  const double same =
      teacher_student_mask_mse(a, b, fx.audio, fx.segments, mini_stft(), 0.3);
  CHECK(same == doctest::Approx(0.0));
  const auto c = MaskNet::random_init(mini_net(), 8);
  const double diff =
      teacher_student_mask_mse(a, c, fx.audio, fx.segments, mini_stft(), 0.3);
  CHECK(diff > 0.0);
}
