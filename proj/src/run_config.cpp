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

#include "csskit/io/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace csskit {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(&j), path_(std::move(path)), errors_(&errors) {
    if (!j.is_object()) {
      fail("", "expected an object");
      j_ = nullptr;
    }
  }

  ~Reader() {
    if (j_ == nullptr) return;
    for (const auto& item : j_->items()) {
      if (!seen_.count(item.key())) {
        fail(item.key(), "unknown key");
      }
    }
  }

  bool has(const std::string& key) {
    if (j_ == nullptr) return false;
    return j_->contains(key);
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (j_ == nullptr || !j_->contains(key)) return;
    seen_.insert(key);
    try {
      out = j_->at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "wrong type");
    }
  }

  void get_uint64(const std::string& key, std::uint64_t& out) {
    if (j_ == nullptr || !j_->contains(key)) return;
    seen_.insert(key);
    const auto& v = j_->at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      out = v.get<std::uint64_t>();
    } else {
      fail(key, "expected a non-negative integer");
    }
  }

  const json* child(const std::string& key) {
    if (j_ == nullptr || !j_->contains(key)) return nullptr;
    seen_.insert(key);
    return &j_->at(key);
  }

  void fail(const std::string& key, const std::string& why) {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + key;
    errors_->push_back(where.empty() ? why : where + ": " + why);
  }

  const std::string& path() const { return path_; }

 private:
  const json* j_;
  std::string path_;
  std::vector<std::string>* errors_;
  std::set<std::string> seen_;
};

void check(std::vector<std::string>& errors, bool ok, const std::string& path,
           const std::string& why) {
  if (!ok) errors.push_back(path + ": " + why);
}

}  // namespace

ArrayGeometry default_geometry(int channels) {
  require(channels >= 1 && channels <= 16, ErrorCode::kConfig,
          "default_geometry: channels must be in [1,16]");
  ArrayGeometry geom;
  // Mics on an 8 cm-diameter ring at table height.
  const double radius = 0.04;
  for (int c = 0; c < channels; ++c) {
    const double ang = 2.0 * 3.14159265358979323846 * c / std::max(1, channels);
    geom.mics.push_back({radius * std::cos(ang), radius * std::sin(ang), 1.0});
  }
  return geom;
}

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorCode::kConfig, origin, ": invalid json: ", e.what());
  }

  RunConfig cfg;
  std::vector<std::string> errors;
  {
    Reader r(root, "", errors);
    r.get_uint64("seed", cfg.seed);
    r.get("threads", cfg.threads);

    if (const json* j = r.child("stft")) {
      Reader s(*j, "stft", errors);
      s.get("sample_rate", cfg.stft.sample_rate);
      s.get("window_len", cfg.stft.window_len);
      s.get("hop", cfg.stft.hop);
      s.get("fft_size", cfg.stft.fft_size);
      std::string window = "sqrt_hann";
      s.get("window", window);
      if (window != "sqrt_hann") s.fail("window", "unsupported window kind");
    }

    if (const json* j = r.child("net")) {
      Reader s(*j, "net", errors);
      s.get("num_blocks", cfg.net.num_blocks);
      s.get("layers_per_block", cfg.net.layers_per_block);
      s.get("model_dim", cfg.net.model_dim);
      s.get("attention_heads", cfg.net.attention_heads);
      s.get("conv_kernel", cfg.net.conv_kernel);
    }

    if (const json* j = r.child("train")) {
      Reader s(*j, "train", errors);
      s.get("stage", cfg.train.stage);
      s.get("base_lr", cfg.train.base_lr);
      s.get("lr_decay", cfg.train.lr_decay);
      s.get("weight_decay", cfg.train.weight_decay);
      s.get("batch_size", cfg.train.batch_size);
      s.get("steps", cfg.train.steps);
      s.get("checkpoint_every", cfg.train.checkpoint_every);
      s.get("crop_sec", cfg.train.crop_sec);
      s.get("student_channels_min", cfg.train.student_channels_min);
      s.get("student_channels_max", cfg.train.student_channels_max);
      s.get("mix_sim_fraction", cfg.train.mix_sim_fraction);
      s.get("holdout_fraction", cfg.train.holdout_fraction);
      if (const json* d = s.child("data")) {
        Reader t(*d, "train.data", errors);
        t.get("sim_manifest", cfg.train.data.sim_manifest);
        t.get("longform_wav", cfg.train.data.longform_wav);
        t.get("annotation", cfg.train.data.annotation);
        t.get("segments", cfg.train.data.segments);
        t.get("scores", cfg.train.data.scores);
        t.get("segmentation", cfg.train.data.segmentation);
        if (t.has("quality_threshold")) {
          double thr = 0.0;
          t.get("quality_threshold", thr);
          cfg.train.data.quality_threshold = thr;
        }
        t.get("min_segment_sec", cfg.train.data.min_segment_sec);
        t.get("two_speaker_factor", cfg.train.data.two_speaker_factor);
      }
    }

    if (const json* j = r.child("css")) {
      Reader s(*j, "css", errors);
      s.get("window_sec", cfg.css.window_sec);
      s.get("shift_sec", cfg.css.shift_sec);
      std::string method = "masking";
      s.get("method", method);
      if (method == "masking") {
        cfg.css.method = OutputMethod::kMasking;
      } else if (method == "mvdr") {
        cfg.css.method = OutputMethod::kMvdr;
      } else {
        s.fail("method", "must be 'masking' or 'mvdr'");
      }
    }

    if (const json* j = r.child("simulate")) {
      Reader s(*j, "simulate", errors);
      s.get("kind", cfg.simulate.kind);
      s.get("num_samples", cfg.simulate.num_samples);
      s.get("duration_sec", cfg.simulate.duration_sec);
      s.get("stationary_noise_db", cfg.simulate.stationary_noise_db);
      s.get("transient_rate", cfg.simulate.transient_rate);
      s.get("band_a", cfg.simulate.band_a);
      s.get("band_b", cfg.simulate.band_b);
      s.get("longform_duration_sec", cfg.simulate.longform_duration_sec);
      s.get("speakers", cfg.simulate.speakers);
      s.get("overlap_fraction", cfg.simulate.overlap_fraction);
      if (const json* g = s.child("geometry")) {
        if (!g->is_array()) {
          s.fail("geometry", "expected an array of [x,y,z] positions");
        } else {
          for (const auto& mic : *g) {
            if (!mic.is_array() || mic.size() != 3 || !mic[0].is_number() ||
                !mic[1].is_number() || !mic[2].is_number()) {
              s.fail("geometry", "each entry must be [x,y,z] numbers");
              break;
            }
            cfg.simulate.geometry.push_back(
                {mic[0].get<double>(), mic[1].get<double>(), mic[2].get<double>()});
          }
        }
      }
    }

    if (const json* j = r.child("separate")) {
      Reader s(*j, "separate", errors);
      s.get("input", cfg.separate_input);
    }

    if (const json* j = r.child("eval")) {
      Reader s(*j, "eval", errors);
      s.get("manifest", cfg.eval.manifest);
      s.get("estimates", cfg.eval.estimates);
      s.get("references", cfg.eval.references);
      s.get("method", cfg.eval.method);
      if (cfg.eval.method != "masking" && cfg.eval.method != "mvdr") {
        s.fail("method", "must be 'masking' or 'mvdr'");
      }
    }
  }

  // Cross-field validation, collected rather than thrown one by one.
  try {
    cfg.stft.validate();
  } catch (const Error& e) {
    errors.push_back(std::string("stft: ") + e.what());
  }
  cfg.net.bins = cfg.stft.bins();
  try {
    cfg.net.validate();
  } catch (const Error& e) {
    errors.push_back(std::string("net: ") + e.what());
  }
  try {
    cfg.css.validate();
  } catch (const Error& e) {
    errors.push_back(std::string("css: ") + e.what());
  }
  check(errors, cfg.threads >= 0, "threads", "must be >= 0");
  check(errors, cfg.train.stage == 1 || cfg.train.stage == 2, "train.stage",
        "must be 1 or 2");
  check(errors, cfg.train.base_lr > 0, "train.base_lr", "must be > 0");
  check(errors, cfg.train.lr_decay > 0 && cfg.train.lr_decay <= 1, "train.lr_decay",
        "must be in (0,1]");
  check(errors, cfg.train.weight_decay >= 0, "train.weight_decay", "must be >= 0");
  check(errors, cfg.train.batch_size >= 1, "train.batch_size", "must be >= 1");
  check(errors, cfg.train.steps >= 0, "train.steps", "must be >= 0");
  check(errors, cfg.train.checkpoint_every >= 1, "train.checkpoint_every",
        "must be >= 1");
  check(errors, cfg.train.crop_sec > 0, "train.crop_sec", "must be > 0");
  check(errors, cfg.train.student_channels_min >= 1, "train.student_channels_min",
        "must be >= 1");
  check(errors,
        cfg.train.student_channels_max == 0 ||
            cfg.train.student_channels_max >= cfg.train.student_channels_min,
        "train.student_channels_max", "must be 0 or >= student_channels_min");
  check(errors, cfg.train.mix_sim_fraction >= 0 && cfg.train.mix_sim_fraction <= 1,
        "train.mix_sim_fraction", "must be in [0,1]");
  check(errors, cfg.train.holdout_fraction >= 0 && cfg.train.holdout_fraction < 1,
        "train.holdout_fraction", "must be in [0,1)");
  check(errors,
        cfg.train.data.segmentation == "cts" || cfg.train.data.segmentation == "fws",
        "train.data.segmentation", "must be 'cts' or 'fws'");
  check(errors, cfg.simulate.kind == "dataset" || cfg.simulate.kind == "longform",
        "simulate.kind", "must be 'dataset' or 'longform'");
  check(errors, cfg.simulate.num_samples >= 1, "simulate.num_samples", "must be >= 1");
  check(errors, cfg.simulate.duration_sec > 0, "simulate.duration_sec", "must be > 0");
  check(errors, cfg.simulate.band_a[0] > 0 && cfg.simulate.band_a[1] > cfg.simulate.band_a[0],
        "simulate.band_a", "must be an increasing positive pair");
  check(errors, cfg.simulate.band_b[0] > 0 && cfg.simulate.band_b[1] > cfg.simulate.band_b[0],
        "simulate.band_b", "must be an increasing positive pair");
  check(errors, cfg.simulate.speakers >= 1, "simulate.speakers", "must be >= 1");
  check(errors,
        cfg.simulate.overlap_fraction >= 0 && cfg.simulate.overlap_fraction < 1,
        "simulate.overlap_fraction", "must be in [0,1)");
  check(errors, cfg.simulate.longform_duration_sec > 0,
        "simulate.longform_duration_sec", "must be > 0");
  check(errors, cfg.eval.estimates.size() == cfg.eval.references.size(),
        "eval.estimates", "estimates and references must pair up");

  if (!errors.empty()) {
    std::ostringstream msg;
    msg << origin << ": " << errors.size() << " config error(s):\n";
    for (const auto& e : errors) msg << "  - " << e << "\n";
    raise(ErrorCode::kConfig, msg.str());
  }
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open config: ", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str(), path);
}

}  // namespace csskit
