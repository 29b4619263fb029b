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

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csskit/threading.hpp"

namespace csskit {

namespace {

Tensor mag_tensor_from_wave(const std::vector<double>& samples, int sample_rate,
                            const StftConfig& stft_cfg, int bins, int frames) {
  if (samples.empty()) {
    return Tensor::zeros({bins, frames});
  }
  MultichannelWaveform w(sample_rate, 1, samples.size());
  w.channels[0] = samples;
  const Spectrogram spec = stft(w, stft_cfg);
  require(spec.bins == bins && spec.frames == frames, ErrorCode::kInternal,
          "reference stft grid mismatch");
  return matrix_tensor<float>(channel_magnitude(spec, 0), bins, frames);
}

// One training item, fully decided up front so batch items can run on worker
// threads without touching shared randomness.
struct ItemPlan {
  bool sim = true;
  int index = 0;              // sim sample or segment index
  double crop_start = 0.0;    // segment crop (seconds)
  double crop_len = 0.0;
  int channels = 0;           // student subset size
  std::uint64_t subset_seed = 0;
};

struct UnifiedConfig {
  const MaskNet* teacher = nullptr;  // null for pure supervised training
  const LongformData* longform = nullptr;
  const SimDataset* sim = nullptr;
  double sim_fraction = 1.0;
};

double run_sim_item(MaskNet& model, const SimDataset& sim, int index,
                    const StftConfig& stft_cfg, const LossWeights& weights) {
  const TrainingSample sample = sim.get(index);
  const Spectrogram spec = stft(sample.mixture, stft_cfg);
  const int bins = spec.bins;
  const int frames = spec.frames;
  const int rate = sample.mixture.sample_rate;

  Stage1RefsT<float> refs;
  for (int s = 0; s < 2; ++s) {
    const std::vector<double>* img =
        static_cast<std::size_t>(s) < sample.speech_images_ch0.size()
            ? &sample.speech_images_ch0[static_cast<std::size_t>(s)]
            : nullptr;
    refs.speech_mag[static_cast<std::size_t>(s)] =
        img ? mag_tensor_from_wave(*img, rate, stft_cfg, bins, frames)
            : Tensor::zeros({bins, frames});
  }
  refs.noise_mag[0] =
      mag_tensor_from_wave(sample.stationary_noise_ch0, rate, stft_cfg, bins, frames);
  refs.noise_mag[1] =
      mag_tensor_from_wave(sample.transient_noise_ch0, rate, stft_cfg, bins, frames);
  const Tensor y_mag = matrix_tensor<float>(channel_magnitude(spec, 0), bins, frames);

  Tape tape;
  const auto masks = model.forward(tape, spec);
  const auto loss = stage1_loss<float>(tape, masks, y_mag, refs, weights);
  tape.backward(loss.loss);
  return static_cast<double>(loss.loss.item());
}

double run_segment_item(const MaskNet& teacher, MaskNet& student,
                        const LongformData& longform, const ItemPlan& plan,
                        const StftConfig& stft_cfg, const LossWeights& weights) {
  const auto& audio = *longform.audio;
  const auto begin = static_cast<std::size_t>(plan.crop_start * audio.sample_rate);
  const auto count = static_cast<std::size_t>(plan.crop_len * audio.sample_rate);
  MultichannelWaveform crop(audio.sample_rate, audio.num_channels(), count);
  for (int c = 0; c < audio.num_channels(); ++c) {
    const auto& src = audio.channels[static_cast<std::size_t>(c)];
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(begin), count,
                crop.channels[static_cast<std::size_t>(c)].begin());
  }

  const Spectrogram full_spec = stft(crop, stft_cfg);
  const MaskSet teacher_masks = teacher.infer(full_spec);

  Rng subset_rng(plan.subset_seed);
  const Spectrogram subset = select_channels(full_spec, plan.channels, subset_rng);
  const Tensor y_mag = matrix_tensor<float>(channel_magnitude(subset, 0),
                                            subset.bins, subset.frames);

  Tape tape;
  const auto student_masks = student.forward(tape, subset);
  const auto loss = stage2_loss<float>(tape, teacher_masks, student_masks, y_mag, weights);
  tape.backward(loss.loss);
  return static_cast<double>(loss.loss.item());
}

TrainResult run_training(const UnifiedConfig& uni, MaskNet& model, Adam& adam,
                         const StftConfig& stft_cfg, const TrainerConfig& cfg,
                         const CheckpointHook& hook) {
  require(cfg.batch_size >= 1 && cfg.steps >= 0, ErrorCode::kInvalidArgument,
          "trainer: bad batch size or step count");
  if (uni.sim_fraction < 1.0) {
    require(uni.longform != nullptr && uni.longform->audio != nullptr &&
                !uni.longform->segments.empty(),
            ErrorCode::kInvalidArgument, "trainer: long-form data required");
  }
  if (uni.sim_fraction > 0.0) {
    require(uni.sim != nullptr && uni.sim->count > 0 && uni.sim->get,
            ErrorCode::kInvalidArgument, "trainer: simulated dataset required");
  }

  std::vector<double> cumulative;
  int max_channels = 0;
  if (uni.longform != nullptr && uni.longform->audio != nullptr) {
    const auto weights =
        sampling_weights(uni.longform->segments, uni.longform->two_speaker_factor);
    cumulative.resize(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      cumulative[i] = acc;
    }
    max_channels = uni.longform->audio->num_channels();
  }

  Rng rng(cfg.seed);
  TrainResult result;
  std::vector<ItemPlan> plans(static_cast<std::size_t>(cfg.batch_size));
  std::vector<ParamSet> worker_params(static_cast<std::size_t>(cfg.batch_size));
  std::vector<double> losses(static_cast<std::size_t>(cfg.batch_size));

  for (int step = 0; step < cfg.steps; ++step) {
    const double lr = lr_schedule(adam.step_count(), cfg.base_lr, cfg.lr_decay);

    for (int b = 0; b < cfg.batch_size; ++b) {
      ItemPlan plan;
      const double u = rng.uniform();
      if (u < uni.sim_fraction) {
        plan.sim = true;
        plan.index = static_cast<int>(rng.uniform_int(uni.sim->count));
      } else {
        plan.sim = false;
        const double pick = rng.uniform();
        std::size_t idx = 0;
        while (idx + 1 < cumulative.size() && pick >= cumulative[idx]) ++idx;
        plan.index = static_cast<int>(idx);
        const Segment& seg = uni.longform->segments[idx];
        plan.crop_len = std::min(cfg.crop_sec, seg.duration());
        plan.crop_start = seg.duration() > plan.crop_len
                              ? rng.uniform(seg.start, seg.end - plan.crop_len)
                              : seg.start;
        const int lo = std::min(cfg.student_channels_min, max_channels);
        const int hi = cfg.student_channels_max > 0
                           ? std::min(cfg.student_channels_max, max_channels)
                           : max_channels;
        plan.channels = lo + static_cast<int>(rng.uniform_int(hi - lo + 1));
        plan.subset_seed = rng.next_u64();
      }
      plans[static_cast<std::size_t>(b)] = plan;
    }

    // Each batch item runs on its own parameter clone; gradients merge in
    // batch order so the result is independent of the worker count.
    parallel_for(cfg.batch_size, [&](int b) {
      worker_params[static_cast<std::size_t>(b)] = model.params().clone();
      MaskNet worker(model.config(), worker_params[static_cast<std::size_t>(b)]);
      const ItemPlan& plan = plans[static_cast<std::size_t>(b)];
      losses[static_cast<std::size_t>(b)] =
          plan.sim ? run_sim_item(worker, *uni.sim, plan.index, stft_cfg, cfg.loss)
                   : run_segment_item(*uni.teacher, worker, *uni.longform, plan,
                                      stft_cfg, cfg.loss);
    });

    model.params().zero_grad();
    // A zero loss (e.g. a student identical to its teacher) flows no
    // gradient; those parameters still hold a defined zero gradient here.
    for (auto& item : model.params().items()) item.tensor.alloc_grad();
    double mean_loss = 0.0;
    const float scale = 1.0f / static_cast<float>(cfg.batch_size);
    for (int b = 0; b < cfg.batch_size; ++b) {
      mean_loss += losses[static_cast<std::size_t>(b)];
      auto& master = model.params().items();
      auto& worker = worker_params[static_cast<std::size_t>(b)].items();
      for (std::size_t p = 0; p < master.size(); ++p) {
        if (!worker[p].tensor.has_grad()) continue;
        auto& master_tensor = master[p].tensor;
        master_tensor.alloc_grad();
        auto& mg = master_tensor.grad();
        const auto& wg = worker[p].tensor.grad();
        for (std::size_t i = 0; i < mg.size(); ++i) mg[i] += wg[i] * scale;
      }
    }
    mean_loss /= cfg.batch_size;

    adam.step(model.params(), lr, cfg.weight_decay);
    result.curve.push_back(TrainLogEntry{step, lr, mean_loss});
    if (hook && cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0) {
      hook(step + 1);
    }
  }
  return result;
}

}  // namespace

TrainResult train_stage1(MaskNet& model, Adam& adam, const SimDataset& data,
                         const StftConfig& stft_cfg, const TrainerConfig& cfg,
                         const CheckpointHook& hook) {
  UnifiedConfig uni;
  uni.sim = &data;
  uni.sim_fraction = 1.0;
  return run_training(uni, model, adam, stft_cfg, cfg, hook);
}

TrainResult train_stage2(const MaskNet& teacher, MaskNet& student, Adam& adam,
                         const LongformData& longform, const SimDataset* sim,
                         const StftConfig& stft_cfg, const TrainerConfig& cfg,
                         const CheckpointHook& hook) {
  require(teacher.config().bins == student.config().bins, ErrorCode::kConfig,
          "stage-2: teacher and student expect different stft grids (",
          teacher.config().bins, " vs ", student.config().bins, " bins)");
  UnifiedConfig uni;
  uni.teacher = &teacher;
  uni.longform = &longform;
  uni.sim = sim;
  uni.sim_fraction = sim != nullptr && sim->count > 0 ? cfg.mix_sim_fraction : 0.0;
  return run_training(uni, student, adam, stft_cfg, cfg, hook);
}

EvalResult evaluate(const MaskNet& model, const SimDataset& eval_set,
                    OutputMethod method, const StftConfig& stft_cfg) {
  require(eval_set.count > 0 && eval_set.get, ErrorCode::kInvalidArgument,
          "evaluate: empty evaluation set");

  struct PerSample {
    RegionSiSnri region;
    double mask_mse = 0.0;
    double irm_si_snri = 0.0;
  };
  std::vector<PerSample> rows(static_cast<std::size_t>(eval_set.count));

  parallel_for(eval_set.count, [&](int i) {
    const TrainingSample sample = eval_set.get(i);
    require(sample.speech_images_ch0.size() == 2, ErrorCode::kInvalidArgument,
            "evaluate: sample ", i, " lacks two speech references");
    const Spectrogram spec = stft(sample.mixture, stft_cfg);
    const std::size_t len = sample.mixture.num_samples();
    const int rate = sample.mixture.sample_rate;

    const MaskSet masks = model.infer(spec);

    auto streams_from = [&](const MaskSet& m) {
      std::array<std::vector<double>, 2> streams;
      if (method == OutputMethod::kMasking || spec.channels < 2) {
        const auto specs = apply_masks(spec, m);
        for (int s = 0; s < 2; ++s) {
          streams[static_cast<std::size_t>(s)] =
              istft(specs[static_cast<std::size_t>(s)], stft_cfg, len).channels[0];
        }
      } else {
        for (int s = 0; s < 2; ++s) {
          const auto& target = m.masks[static_cast<std::size_t>(s)];
          std::vector<double> interf(target.size());
          const int other = s == 0 ? 1 : 0;
          for (std::size_t k = 0; k < target.size(); ++k) {
            interf[k] = std::clamp(m.masks[static_cast<std::size_t>(other)][k] +
                                       m.masks[kNoiseStationary][k] +
                                       m.masks[kNoiseTransient][k],
                                   0.0, 1.0);
          }
          const auto phi_t = estimate_scm(spec, target);
          const auto phi_n = estimate_scm(spec, interf);
          const auto w = mvdr_weights(phi_t, phi_n);
          streams[static_cast<std::size_t>(s)] =
              istft(apply_beamformer(spec, w), stft_cfg, len).channels[0];
        }
      }
      return streams;
    };

    const std::array<std::vector<double>, 2> refs = {sample.speech_images_ch0[0],
                                                     sample.speech_images_ch0[1]};
    auto& row = rows[static_cast<std::size_t>(i)];
    row.region = region_si_snr_improvement(streams_from(masks), refs,
                                           sample.mixture.channels[0]);

    // Ideal-ratio-mask ceiling (masking path) and the model's mask error.
    auto ref_mag = [&](const std::vector<double>& img) {
      if (img.empty()) {
        return std::vector<double>(static_cast<std::size_t>(spec.bins) * spec.frames, 0.0);
      }
      MultichannelWaveform w(rate, 1, img.size());
      w.channels[0] = img;
      return channel_magnitude(stft(w, stft_cfg), 0);
    };
    const MaskSet irm = ideal_ratio_masks(
        {ref_mag(sample.speech_images_ch0[0]), ref_mag(sample.speech_images_ch0[1])},
        {ref_mag(sample.stationary_noise_ch0), ref_mag(sample.transient_noise_ch0)},
        spec.bins, spec.frames);
    row.mask_mse = mask_mse(masks, irm);

    std::array<std::vector<double>, 2> irm_streams;
    const auto irm_specs = apply_masks(spec, irm);
    for (int s = 0; s < 2; ++s) {
      irm_streams[static_cast<std::size_t>(s)] =
          istft(irm_specs[static_cast<std::size_t>(s)], stft_cfg, len).channels[0];
    }
    row.irm_si_snri =
        region_si_snr_improvement(irm_streams, refs, sample.mixture.channels[0]).overall;
  });

  EvalResult out;
  out.num_samples = eval_set.count;
  for (const auto& row : rows) {
    out.si_snri_db += row.region.overall;
    out.mask_mse_vs_irm += row.mask_mse;
    out.irm_si_snri_db += row.irm_si_snri;
    if (row.region.has_overlap) {
      out.si_snri_ovlp_db += row.region.overlap;
      ++out.ovlp_samples;
    }
    if (row.region.has_non_overlap) {
      out.si_snri_nonovlp_db += row.region.non_overlap;
      ++out.nonovlp_samples;
    }
  }
  out.si_snri_db /= eval_set.count;
  out.mask_mse_vs_irm /= eval_set.count;
  out.irm_si_snri_db /= eval_set.count;
  if (out.ovlp_samples > 0) out.si_snri_ovlp_db /= out.ovlp_samples;
  if (out.nonovlp_samples > 0) out.si_snri_nonovlp_db /= out.nonovlp_samples;
  return out;
}

double teacher_student_mask_mse(const MaskNet& teacher, const MaskNet& student,
                                const MultichannelWaveform& longform,
                                const std::vector<Segment>& segments,
                                const StftConfig& stft_cfg, double crop_sec) {
  require(!segments.empty(), ErrorCode::kInvalidArgument,
          "teacher_student_mask_mse: no segments");
  std::vector<double> values(segments.size());
  parallel_for(static_cast<int>(segments.size()), [&](int i) {
    const Segment& seg = segments[static_cast<std::size_t>(i)];
    const double len = std::min(crop_sec, seg.duration());
    const double start = seg.start + (seg.duration() - len) / 2.0;
    const auto begin = static_cast<std::size_t>(start * longform.sample_rate);
    const auto count = static_cast<std::size_t>(len * longform.sample_rate);
    MultichannelWaveform crop(longform.sample_rate, longform.num_channels(), count);
    for (int c = 0; c < longform.num_channels(); ++c) {
      std::copy_n(longform.channels[static_cast<std::size_t>(c)].begin() +
                      static_cast<std::ptrdiff_t>(begin),
                  count, crop.channels[static_cast<std::size_t>(c)].begin());
    }
    const Spectrogram spec = stft(crop, stft_cfg);
    values[static_cast<std::size_t>(i)] = mask_mse(teacher.infer(spec), student.infer(spec));
  });
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

void write_loss_curve_csv(const std::string& path, const TrainResult& result) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::kIo, "cannot open for writing: ", path);
  out << "step,lr,loss\n";
  out.precision(10);
  for (const auto& e : result.curve) {
    out << e.step << ',' << e.lr << ',' << e.loss << '\n';
  }
}

}  // namespace csskit
