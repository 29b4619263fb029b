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

#include "csskit/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "csskit/io/checkpoint.hpp"
#include "csskit/io/wav.hpp"
#include "csskit/threading.hpp"
#include "json.hpp"

namespace csskit::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

RunConfig load_config(const Options& opt) {
  require(!opt.config_path.empty(), ErrorCode::kConfig,
          "missing --config PATH (run configuration)");
  RunConfig cfg = parse_run_config(opt.config_path);
  if (opt.seed.has_value()) cfg.seed = *opt.seed;
  if (opt.stage.has_value()) cfg.train.stage = *opt.stage;
  if (opt.method.has_value()) {
    if (*opt.method == "masking") {
      cfg.css.method = OutputMethod::kMasking;
      cfg.eval.method = "masking";
    } else if (*opt.method == "mvdr") {
      cfg.css.method = OutputMethod::kMvdr;
      cfg.eval.method = "mvdr";
    } else {
      raise(ErrorCode::kConfig, "--method must be 'masking' or 'mvdr', got ",
            *opt.method);
    }
  }
  require(cfg.train.stage == 1 || cfg.train.stage == 2, ErrorCode::kConfig,
          "--stage must be 1 or 2");
  if (cfg.threads > 0) set_worker_cap(cfg.threads);
  return cfg;
}

void ensure_out_dir(const Options& opt) {
  require(!opt.out_dir.empty(), ErrorCode::kConfig, "missing --out DIR");
  fs::create_directories(opt.out_dir);
}

std::string out_path(const Options& opt, const std::string& name) {
  return (fs::path(opt.out_dir) / name).string();
}

ArrayGeometry config_geometry(const SimulateRunConfig& sim) {
  if (sim.geometry.empty()) return default_geometry(3);
  ArrayGeometry geom;
  geom.mics = sim.geometry;
  geom.validate();
  return geom;
}

MultichannelWaveform subset_wave_channels(const MultichannelWaveform& wave, int k,
                                          std::uint64_t seed) {
  require(k >= 1 && k <= wave.num_channels(), ErrorCode::kInvalidArgument,
          "--channels must be in [1,", wave.num_channels(), "], got ", k);
  Rng rng(seed);
  const auto keep = rng.sample_without_replacement(wave.num_channels(), k);
  MultichannelWaveform out;
  out.sample_rate = wave.sample_rate;
  for (int c : keep) out.channels.push_back(wave.channels[static_cast<std::size_t>(c)]);
  return out;
}

std::vector<double> mono_or_empty(const std::string& path) {
  if (path.empty()) return {};
  const MultichannelWaveform w = wav_read(path);
  return w.channels[0];
}

}  // namespace

Scene dataset_scene(const SimulateRunConfig& sim, std::uint64_t seed, int index) {
  Rng rng = Rng(seed).fork(0x5ce0e000 + static_cast<std::uint64_t>(index));
  Scene scene;
  scene.stationary_noise_db = sim.stationary_noise_db;

  const double base_angle = rng.uniform(0.0, 2.0 * kPi);
  const double separation = rng.uniform(kPi / 3.0, kPi);  // at least 60 degrees
  const std::array<std::array<double, 2>, 2> bands = {sim.band_a, sim.band_b};
  for (int s = 0; s < 2; ++s) {
    SceneSource src;
    src.speech.kind = s == 0 ? SpeechKind::kAmTone : SpeechKind::kFilteredNoiseBursts;
    src.speech.band_lo_hz = bands[static_cast<std::size_t>(s)][0];
    src.speech.band_hi_hz = bands[static_cast<std::size_t>(s)][1];
    src.speech.am_rate_hz = rng.uniform(2.5, 6.0);
    const double angle = base_angle + s * separation;
    const double radius = rng.uniform(0.9, 1.5);
    src.position = {radius * std::cos(angle), radius * std::sin(angle),
                    rng.uniform(1.0, 1.4)};
    src.onset_sec = 0.0;
    src.duration_sec = sim.duration_sec;
    src.level_db = rng.uniform(-1.5, 1.5);
    src.stream_tag = static_cast<std::uint64_t>(s + 1);
    scene.sources.push_back(src);
  }

  int transients = static_cast<int>(sim.transient_rate);
  if (rng.uniform() < sim.transient_rate - transients) ++transients;
  for (int t = 0; t < transients; ++t) {
    TransientEvent ev;
    ev.duration_sec = rng.uniform(0.08, 0.25);
    ev.onset_sec = rng.uniform(0.0, std::max(1e-3, sim.duration_sec - ev.duration_sec));
    ev.level_db = sim.stationary_noise_db + 6.0;
    scene.transient_noise.push_back(ev);
  }
  return scene;
}

LongformPlan make_longform_plan(const SimulateRunConfig& sim, std::uint64_t seed) {
  Rng rng = Rng(seed).fork(0x10f60000);
  LongformPlan plan;
  plan.duration_sec = sim.longform_duration_sec;
  plan.stationary_noise_db = sim.stationary_noise_db;

  const int speakers = std::max(2, sim.speakers);
  std::vector<Vec3> seats;
  std::vector<SpeechParams> voices;
  for (int s = 0; s < speakers; ++s) {
    const double angle = 2.0 * kPi * s / speakers + rng.uniform(-0.2, 0.2);
    const double radius = rng.uniform(1.0, 1.5);
    seats.push_back({radius * std::cos(angle), radius * std::sin(angle),
                     rng.uniform(1.0, 1.4)});
    SpeechParams voice;
    voice.kind = s % 2 == 0 ? SpeechKind::kAmTone : SpeechKind::kFilteredNoiseBursts;
    const auto& band = s % 2 == 0 ? sim.band_a : sim.band_b;
    voice.band_lo_hz = band[0];
    voice.band_hi_hz = band[1];
    voice.am_rate_hz = rng.uniform(2.5, 6.0);
    voices.push_back(voice);
  }

  double cursor = rng.uniform(0.0, 0.3);
  int prev_speaker = -1;
  double prev_end = cursor;
  while (true) {
    int speaker = static_cast<int>(rng.uniform_int(speakers));
    if (speaker == prev_speaker) speaker = (speaker + 1) % speakers;
    const double dur = rng.uniform(1.5, 3.0);
    double onset;
    if (prev_speaker >= 0 && rng.uniform() < sim.overlap_fraction) {
      onset = std::max(0.0, prev_end - rng.uniform(0.3, std::min(1.2, dur / 2.0)));
    } else {
      onset = prev_end + rng.uniform(0.1, 0.5);
    }
    if (onset + dur > plan.duration_sec - 0.05) break;
    UtterancePlan u;
    u.speaker = "spk" + std::to_string(speaker);
    u.speech = voices[static_cast<std::size_t>(speaker)];
    u.position = seats[static_cast<std::size_t>(speaker)];
    u.onset_sec = onset;
    u.duration_sec = dur;
    u.level_db = rng.uniform(-1.5, 1.5);
    plan.utterances.push_back(u);
    prev_speaker = speaker;
    prev_end = onset + dur;
  }
  require(plan.utterances.size() >= 2, ErrorCode::kConfig,
          "longform plan too short for the configured duration");
  return plan;
}

SimDataset procedural_dataset(const SimulateRunConfig& sim, const ArrayGeometry& geom,
                              std::uint64_t seed, int count, int sample_rate,
                              int index_offset) {
  SimDataset data;
  data.count = count;
  data.get = [sim, geom, seed, sample_rate, index_offset](int index) {
    const int i = index + index_offset;
    const Scene scene = dataset_scene(sim, seed, i);
    const std::uint64_t render_seed =
        Rng(seed).fork(0x8e4de4 + static_cast<std::uint64_t>(i)).seed();
    TrainingSample sample =
        render_scene(scene, geom, sim.duration_sec, sample_rate, render_seed);
    sample.quality_score = 2.0 + 2.0 * Rng(render_seed).fork(99).uniform();
    return sample;
  };
  return data;
}

SimDataset manifest_dataset(const std::string& manifest_path) {
  fs::path path(manifest_path);
  if (fs::is_directory(path)) path /= "manifest.json";
  require(fs::exists(path), ErrorCode::kIo, "manifest not found: ", path.string());
  std::ifstream in(path);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    raise(ErrorCode::kFormat, path.string(), ": bad manifest json: ", e.what());
  }
  const fs::path base = path.parent_path();
  auto entries = std::make_shared<json>(manifest.at("samples"));
  require(entries->is_array() && !entries->empty(), ErrorCode::kFormat,
          path.string(), ": manifest has no samples");

  SimDataset data;
  data.count = static_cast<int>(entries->size());
  data.get = [entries, base](int index) {
    const json& e = entries->at(static_cast<std::size_t>(index));
    TrainingSample sample;
    sample.mixture = wav_read((base / e.at("mixture").get<std::string>()).string());
    for (const auto& s : e.at("speech")) {
      sample.speech_images_ch0.push_back(
          mono_or_empty((base / s.get<std::string>()).string()));
    }
    sample.stationary_noise_ch0 =
        mono_or_empty((base / e.at("noise_stationary").get<std::string>()).string());
    sample.transient_noise_ch0 =
        mono_or_empty((base / e.at("noise_transient").get<std::string>()).string());
    if (e.contains("quality_score")) {
      sample.quality_score = e.at("quality_score").get<double>();
    }
    return sample;
  };
  return data;
}

void run_simulate(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  ensure_out_dir(opt);
  const ArrayGeometry geom = config_geometry(cfg.simulate);

  if (cfg.simulate.kind == "dataset") {
    const SimDataset data = procedural_dataset(cfg.simulate, geom, cfg.seed,
                                               cfg.simulate.num_samples,
                                               cfg.stft.sample_rate);
    json samples = json::array();
    for (int i = 0; i < data.count; ++i) {
      const TrainingSample sample = data.get(i);
      char stem[32];
      std::snprintf(stem, sizeof(stem), "sample_%05d", i);
      const std::string mix_name = std::string(stem) + "_mix.wav";
      wav_write(out_path(opt, mix_name), sample.mixture);
      json speech = json::array();
      for (std::size_t s = 0; s < sample.speech_images_ch0.size(); ++s) {
        const std::string name =
            std::string(stem) + "_src" + std::to_string(s) + ".wav";
        MultichannelWaveform img(sample.mixture.sample_rate, 1,
                                 sample.speech_images_ch0[s].size());
        img.channels[0] = sample.speech_images_ch0[s];
        wav_write(out_path(opt, name), img);
        speech.push_back(name);
      }
      auto write_mono = [&](const std::vector<double>& x, const std::string& name) {
        MultichannelWaveform img(sample.mixture.sample_rate, 1, x.size());
        img.channels[0] = x;
        wav_write(out_path(opt, name), img);
      };
      const std::string stat_name = std::string(stem) + "_noise_stationary.wav";
      const std::string trans_name = std::string(stem) + "_noise_transient.wav";
      write_mono(sample.stationary_noise_ch0, stat_name);
      write_mono(sample.transient_noise_ch0, trans_name);
      samples.push_back(json{{"mixture", mix_name},
                             {"speech", speech},
                             {"noise_stationary", stat_name},
                             {"noise_transient", trans_name},
                             {"quality_score", sample.quality_score}});
    }
    json manifest{{"sample_rate", cfg.stft.sample_rate},
                  {"duration_sec", cfg.simulate.duration_sec},
                  {"seed", cfg.seed},
                  {"samples", samples}};
    std::ofstream out(out_path(opt, "manifest.json"));
    out << manifest.dump(2) << "\n";
    std::cout << "simulated_samples=" << data.count << " out=" << opt.out_dir << "\n";
  } else {
    const LongformPlan plan = make_longform_plan(cfg.simulate, cfg.seed);
    const LongformRender render =
        render_longform(plan, geom, cfg.stft.sample_rate,
                        Rng(cfg.seed).fork(0x10f61111).seed());
    wav_write(out_path(opt, "session_mix.wav"), render.audio);
    write_annotation_file(out_path(opt, "session_diar.tsv"), render.diarization);
    json images = json::array();
    for (std::size_t s = 0; s < render.speakers.size(); ++s) {
      const std::string name = "session_" + render.speakers[s] + ".wav";
      MultichannelWaveform img(render.audio.sample_rate, 1,
                               render.speaker_images_ch0[s].size());
      img.channels[0] = render.speaker_images_ch0[s];
      wav_write(out_path(opt, name), img);
      images.push_back(name);
    }
    json session{{"mixture", "session_mix.wav"},
                 {"annotation", "session_diar.tsv"},
                 {"speakers", render.speakers},
                 {"speaker_images", images},
                 {"sample_rate", render.audio.sample_rate},
                 {"duration_sec", plan.duration_sec},
                 {"overlap_ratio", overlap_ratio(plan.utterances, plan.duration_sec)},
                 {"seed", cfg.seed}};
    std::ofstream out(out_path(opt, "session.json"));
    out << session.dump(2) << "\n";
    std::cout << "simulated_longform_sec=" << plan.duration_sec
              << " speakers=" << render.speakers.size() << " out=" << opt.out_dir
              << "\n";
  }
}

void run_segment(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  ensure_out_dir(opt);
  const auto& data = cfg.train.data;
  require(!data.annotation.empty(), ErrorCode::kConfig,
          "train.data.annotation: required by the segment command");

  std::vector<Segment> segments;
  if (data.segmentation == "cts") {
    segments = cts(read_annotation_file(data.annotation));
  } else {
    double total = 0.0;
    if (!data.longform_wav.empty()) {
      const MultichannelWaveform audio = wav_read(data.longform_wav);
      total = audio.duration_sec();
    } else {
      const auto diar = read_annotation_file(data.annotation);
      for (const auto& e : diar.entries) total = std::max(total, e.end);
    }
    segments = fws(total);
  }

  if (!data.scores.empty()) {
    std::ifstream in(data.scores);
    require(in.good(), ErrorCode::kIo, "cannot open scores file: ", data.scores);
    std::vector<double> scores;
    double v;
    while (in >> v) scores.push_back(v);
    require(scores.size() == segments.size(), ErrorCode::kConfig,
            "train.data.scores: ", scores.size(), " scores for ", segments.size(),
            " segments");
    for (std::size_t i = 0; i < segments.size(); ++i) {
      segments[i].quality_score = scores[i];
    }
  }
  if (data.quality_threshold.has_value()) {
    require(!data.scores.empty(), ErrorCode::kConfig,
            "train.data.scores: required when quality_threshold is set");
    segments = filter_by_quality(segments, *data.quality_threshold);
  }

  write_segments_file(out_path(opt, "segments.tsv"), segments);
  std::cout << "segments=" << segments.size() << " mode=" << data.segmentation
            << " out=" << opt.out_dir << "\n";
}

namespace {

MaskNet init_model(const RunConfig& cfg, const std::string& checkpoint_path,
                   Adam* adam, std::uint64_t init_seed) {
  if (!checkpoint_path.empty()) {
    MaskNet net = load_checkpoint(checkpoint_path, adam);
    return net;
  }
  return MaskNet::random_init(cfg.net, init_seed);
}

TrainerConfig trainer_config(const RunConfig& cfg) {
  TrainerConfig t;
  t.base_lr = cfg.train.base_lr;
  t.lr_decay = cfg.train.lr_decay;
  t.weight_decay = cfg.train.weight_decay;
  t.batch_size = cfg.train.batch_size;
  t.steps = cfg.train.steps;
  t.checkpoint_every = cfg.train.checkpoint_every;
  t.crop_sec = cfg.train.crop_sec;
  t.student_channels_min = cfg.train.student_channels_min;
  t.student_channels_max = cfg.train.student_channels_max;
  t.mix_sim_fraction = cfg.train.mix_sim_fraction;
  t.seed = Rng(cfg.seed).fork(0x7e41).seed();
  return t;
}

}  // namespace

void run_train(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  ensure_out_dir(opt);
  const TrainerConfig tcfg = trainer_config(cfg);

  Adam adam;
  MaskNet model = init_model(cfg, opt.student_path, &adam,
                             Rng(cfg.seed).fork(0x1417).seed());
  if (!opt.student_path.empty()) check_net_config(cfg.net, model.config());

  const CheckpointHook hook = [&](int completed) {
    char name[48];
    std::snprintf(name, sizeof(name), "checkpoint_%06d.ckpt", completed);
    save_checkpoint(out_path(opt, name), model, &adam);
  };

  TrainResult result;
  if (cfg.train.stage == 1) {
    SimDataset data;
    if (!cfg.train.data.sim_manifest.empty()) {
      data = manifest_dataset(cfg.train.data.sim_manifest);
    } else {
      data = procedural_dataset(cfg.simulate, config_geometry(cfg.simulate), cfg.seed,
                                cfg.simulate.num_samples, cfg.stft.sample_rate);
    }
    result = train_stage1(model, adam, data, cfg.stft, tcfg, hook);
  } else {
    require(!opt.teacher_path.empty(), ErrorCode::kConfig,
            "teacher: --teacher PATH is required for train --stage 2");
    const MaskNet teacher = load_checkpoint(opt.teacher_path);
    require(!cfg.train.data.longform_wav.empty(), ErrorCode::kConfig,
            "train.data.longform_wav: required for train --stage 2");
    const MultichannelWaveform longform_audio = wav_read(cfg.train.data.longform_wav);

    std::vector<Segment> segments;
    if (!cfg.train.data.segments.empty()) {
      segments = read_segments_file(cfg.train.data.segments);
    } else {
      require(!cfg.train.data.annotation.empty(), ErrorCode::kConfig,
              "train.data.annotation: required when no segment table is given");
      if (cfg.train.data.segmentation == "cts") {
        segments = cts(read_annotation_file(cfg.train.data.annotation));
      } else {
        segments = fws(longform_audio.duration_sec());
      }
    }
    if (cfg.train.data.quality_threshold.has_value()) {
      segments = filter_by_quality(segments, *cfg.train.data.quality_threshold);
    }
    segments = filter_min_length(segments, cfg.train.data.min_segment_sec);
    require(!segments.empty(), ErrorCode::kConfig,
            "train.data: no usable segments after filtering");

    LongformData longform;
    longform.audio = &longform_audio;
    longform.segments = segments;
    longform.two_speaker_factor = cfg.train.data.two_speaker_factor;

    SimDataset sim;
    const SimDataset* sim_ptr = nullptr;
    if (!cfg.train.data.sim_manifest.empty()) {
      sim = manifest_dataset(cfg.train.data.sim_manifest);
      sim_ptr = &sim;
    }
    result = train_stage2(teacher, model, adam, longform, sim_ptr, cfg.stft, tcfg, hook);
  }

  save_checkpoint(out_path(opt, "model.ckpt"), model, &adam);
  write_loss_curve_csv(out_path(opt, "loss_curve.csv"), result);
  const double final_loss = result.curve.empty() ? 0.0 : result.curve.back().loss;
  std::cout << "trained_steps=" << result.curve.size() << " final_loss=" << final_loss
            << " out=" << opt.out_dir << "\n";
}

void run_separate(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  ensure_out_dir(opt);
  require(!cfg.separate_input.empty(), ErrorCode::kConfig,
          "separate.input: input wav path is required");
  require(!opt.student_path.empty(), ErrorCode::kConfig,
          "student: --student PATH (model checkpoint) is required for separate");

  MultichannelWaveform audio = wav_read(cfg.separate_input);
  require(audio.sample_rate == cfg.stft.sample_rate, ErrorCode::kConfig,
          "separate.input: sample rate ", audio.sample_rate,
          " does not match stft.sample_rate ", cfg.stft.sample_rate);
  if (opt.channels.has_value()) {
    audio = subset_wave_channels(audio, *opt.channels, Rng(cfg.seed).fork(0xc4a).seed());
  }

  const MaskNet net = load_checkpoint(opt.student_path);
  require(net.config().bins == cfg.stft.bins(), ErrorCode::kConfig,
          "student checkpoint expects ", net.config().bins,
          " stft bins but the config produces ", cfg.stft.bins());
  const CssResult result =
      css_separate(audio, make_mask_estimator(net), cfg.stft, cfg.css);

  for (int s = 0; s < 2; ++s) {
    MultichannelWaveform stream(audio.sample_rate, 1,
                                result.streams[static_cast<std::size_t>(s)].size());
    stream.channels[0] = result.streams[static_cast<std::size_t>(s)];
    wav_write(out_path(opt, "separated_" + std::to_string(s) + ".wav"), stream);
  }
  {
    std::ofstream log(out_path(opt, "css_windows.log"));
    for (const auto& w : result.windows) {
      log << "window=" << w.index << " frames=[" << w.begin_frame << ","
          << w.end_frame << ") perm=" << (w.swapped ? "swap" : "identity")
          << " stitch_loss=" << w.stitch_loss << "\n";
    }
  }
  std::cout << "separated_streams=2 windows=" << result.windows.size()
            << " method=" << (cfg.css.method == OutputMethod::kMvdr ? "mvdr" : "masking")
          << " out=" << opt.out_dir << "\n";
}

void run_eval(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  ensure_out_dir(opt);

  json report;
  if (!cfg.eval.estimates.empty()) {
    // Direct est/ref comparison.
    json pairs = json::array();
    double mean = 0.0;
    for (std::size_t i = 0; i < cfg.eval.estimates.size(); ++i) {
      const auto est = wav_read(cfg.eval.estimates[i]);
      const auto ref = wav_read(cfg.eval.references[i]);
      require(est.num_samples() == ref.num_samples(), ErrorCode::kInvalidArgument,
              "eval: estimate/reference length mismatch in pair ", i);
      const double snr = si_snr_db(est.channels[0], ref.channels[0]);
      mean += snr;
      pairs.push_back(json{{"estimate", cfg.eval.estimates[i]},
                           {"reference", cfg.eval.references[i]},
                           {"si_snr_db", snr}});
      std::cout << "pair=" << i << " si_snr_db=" << snr << "\n";
    }
    mean /= static_cast<double>(cfg.eval.estimates.size());
    report = json{{"pairs", pairs}, {"mean_si_snr_db", mean}};
    std::cout << "mean_si_snr_db=" << mean << "\n";
  } else {
    require(!cfg.eval.manifest.empty(), ErrorCode::kConfig,
            "eval.manifest: required when no estimate/reference pairs are given");
    require(!opt.student_path.empty(), ErrorCode::kConfig,
            "student: --student PATH (model checkpoint) is required for eval");
    SimDataset data = manifest_dataset(cfg.eval.manifest);
    if (opt.channels.has_value()) {
      const int k = *opt.channels;
      const std::uint64_t seed = Rng(cfg.seed).fork(0xe7a1).seed();
      auto base = data.get;
      data.get = [base, k, seed](int i) {
        TrainingSample s = base(i);
        s.mixture = subset_wave_channels(s.mixture, k,
                                         Rng(seed).fork(static_cast<std::uint64_t>(i)).seed());
        return s;
      };
    }
    const MaskNet net = load_checkpoint(opt.student_path);
    const OutputMethod method =
        cfg.eval.method == "mvdr" ? OutputMethod::kMvdr : OutputMethod::kMasking;
    const EvalResult r = evaluate(net, data, method, cfg.stft);
    report = json{{"num_samples", r.num_samples},
                  {"method", cfg.eval.method},
                  {"si_snri_db", r.si_snri_db},
                  {"si_snri_ovlp_db", r.si_snri_ovlp_db},
                  {"si_snri_nonovlp_db", r.si_snri_nonovlp_db},
                  {"mask_mse_vs_irm", r.mask_mse_vs_irm},
                  {"irm_ceiling_si_snri_db", r.irm_si_snri_db}};
    std::cout << "si_snri_db=" << r.si_snri_db << " ovlp=" << r.si_snri_ovlp_db
              << " nonovlp=" << r.si_snri_nonovlp_db
              << " mask_mse=" << r.mask_mse_vs_irm
              << " irm_ceiling_db=" << r.irm_si_snri_db << "\n";
  }
  std::ofstream out(out_path(opt, "eval.json"));
  out << report.dump(2) << "\n";
}

}  // namespace csskit::pipeline
