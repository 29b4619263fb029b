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

#ifndef CSSKIT_TRAINER_HPP_
#define CSSKIT_TRAINER_HPP_

#include <functional>

#include "csskit/css.hpp"
#include "csskit/metrics.hpp"
#include "csskit/net.hpp"
#include "csskit/objectives.hpp"
#include "csskit/optim.hpp"
#include "csskit/segmenter.hpp"
#include "csskit/sim.hpp"

namespace csskit {

struct TrainerConfig {
  double base_lr = 1e-4;
  double lr_decay = 0.99998;
  double weight_decay = 1e-5;
  int batch_size = 4;
  int steps = 400;
  int checkpoint_every = 200;
  double crop_sec = 2.0;           // training crop for long-form segments
  int student_channels_min = 2;    // stage-2 student subset range
  int student_channels_max = 0;    // 0 = up to all available channels
  double mix_sim_fraction = 0.25;  // stage-2 simulated-sample share
  std::uint64_t seed = 0;
  LossWeights loss;
};

// Deterministic random-access sample source (pre-rendered or procedural).
struct SimDataset {
  int count = 0;
  std::function<TrainingSample(int)> get;
};

struct TrainLogEntry {
  int step = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct TrainResult {
  std::vector<TrainLogEntry> curve;
};

using CheckpointHook = std::function<void(int completed_steps)>;

// Supervised pre-training on simulated two-speaker mixtures.
TrainResult train_stage1(MaskNet& model, Adam& adam, const SimDataset& data,
                         const StftConfig& stft_cfg, const TrainerConfig& cfg,
                         const CheckpointHook& hook = {});

struct LongformData {
  const MultichannelWaveform* audio = nullptr;
  std::vector<Segment> segments;
  double two_speaker_factor = 2.0;
};

// Teacher-student training on unlabeled long-form audio. The teacher runs on
// all channels and stays frozen; the student sees a random channel subset per
// sample. Simulated samples are interleaved at mix_sim_fraction and trained
// with the supervised loss; mix_sim_fraction = 1 reduces to train_stage1.
TrainResult train_stage2(const MaskNet& teacher, MaskNet& student, Adam& adam,
                         const LongformData& longform, const SimDataset* sim,
                         const StftConfig& stft_cfg, const TrainerConfig& cfg,
                         const CheckpointHook& hook = {});

struct EvalResult {
  double si_snri_db = 0.0;
  double si_snri_ovlp_db = 0.0;
  double si_snri_nonovlp_db = 0.0;
  int ovlp_samples = 0;
  int nonovlp_samples = 0;
  double mask_mse_vs_irm = 0.0;
  double irm_si_snri_db = 0.0;  // oracle-mask ceiling, masking method
  int num_samples = 0;
};

// SI-SNR improvement over the mixture (best stream assignment) plus mask MSE
// against the ideal ratio masks; the IRM ceiling is reported alongside.
EvalResult evaluate(const MaskNet& model, const SimDataset& eval_set,
                    OutputMethod method, const StftConfig& stft_cfg);

// Mean mask MSE between teacher and student on fixed center crops of the
// given segments; both models see all channels.
double teacher_student_mask_mse(const MaskNet& teacher, const MaskNet& student,
                                const MultichannelWaveform& longform,
                                const std::vector<Segment>& segments,
                                const StftConfig& stft_cfg, double crop_sec = 2.0);

void write_loss_curve_csv(const std::string& path, const TrainResult& result);

}  // namespace csskit

#endif  // CSSKIT_TRAINER_HPP_
