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

#include <cstring>
#include <filesystem>
#include <fstream>

#include "csskit/io/checkpoint.hpp"
#include "csskit/io/run_config.hpp"
#include "csskit/io/wav.hpp"
#include "csskit/rng.hpp"
#include "doctest.h"

using namespace csskit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::current_path() / "io_test_tmp";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("float32 wav round trip is bitwise") {
  MultichannelWaveform wave(16000, 3, 1000);
  Rng rng(3);
  for (auto& ch : wave.channels) {
    for (auto& v : ch) v = static_cast<double>(static_cast<float>(rng.uniform(-1, 1)));
  }
  const auto path = (temp_dir() / "roundtrip_f32.wav").string();
  wav_write(path, wave, WavFormat::kFloat32);
  const MultichannelWaveform back = wav_read(path);
  REQUIRE(back.num_channels() == 3);
  REQUIRE(back.num_samples() == 1000);
  CHECK(back.sample_rate == 16000);
  for (int c = 0; c < 3; ++c) {
    CHECK(back.channels[static_cast<std::size_t>(c)] ==
          wave.channels[static_cast<std::size_t>(c)]);
  }
}

TEST_CASE("pcm16 scaling maps -32768 to -1.0") {
  MultichannelWaveform wave(16000, 1, 4);
  wave.channels[0] = {-1.0, 0.0, 0.5, 32767.0 / 32768.0};
  const auto path = (temp_dir() / "pcm16.wav").string();
  wav_write(path, wave, WavFormat::kPcm16);
  const MultichannelWaveform back = wav_read(path);
  CHECK(back.channels[0][0] == -1.0);
  CHECK(back.channels[0][1] == 0.0);
  CHECK(back.channels[0][2] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(back.channels[0][3] == doctest::Approx(32767.0 / 32768.0).epsilon(1e-9));
}

TEST_CASE("seven-channel file preserves channel order") {
  MultichannelWaveform wave(16000, 7, 64);
  for (int c = 0; c < 7; ++c) {
    for (std::size_t i = 0; i < 64; ++i) {
      wave.channels[static_cast<std::size_t>(c)][i] = 0.1 * (c + 1);
    }
  }
  const auto path = (temp_dir() / "seven.wav").string();
  wav_write(path, wave);
  const MultichannelWaveform back = wav_read(path);
  REQUIRE(back.num_channels() == 7);
  for (int c = 0; c < 7; ++c) {
    CHECK(back.channels[static_cast<std::size_t>(c)][10] ==
          doctest::Approx(0.1 * (c + 1)).epsilon(1e-7));
  }
}

TEST_CASE("wav reader rejects malformed and unsupported files") {
  const auto bad_path = (temp_dir() / "bad.wav").string();
  {
    std::ofstream out(bad_path, std::ios::binary);
    out << "this is not a wav file at all";
  }
  CHECK_THROWS_WITH_AS(wav_read(bad_path), doctest::Contains("RIFF"), Error);

  // 8-bit PCM: unsupported codec.
  const auto codec_path = (temp_dir() / "codec.wav").string();
  {
    MultichannelWaveform wave(16000, 1, 8);
    wav_write(codec_path, wave, WavFormat::kPcm16);
    std::fstream f(codec_path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(34);  // bits-per-sample field
    const char bits8[2] = {8, 0};
    f.write(bits8, 2);
  }
  CHECK_THROWS_WITH_AS(wav_read(codec_path), doctest::Contains("unsupported codec"),
                       Error);

  CHECK_THROWS_AS(wav_read((temp_dir() / "missing.wav").string()), Error);
}

namespace {

NetConfig tiny_cfg() {
  NetConfig cfg;
  cfg.num_blocks = 1;
  cfg.layers_per_block = 1;
  cfg.model_dim = 8;
  cfg.attention_heads = 2;
  cfg.conv_kernel = 5;
  cfg.bins = 17;
  return cfg;
}

}  // namespace

TEST_CASE("checkpoint round trip is bitwise, with and without optimizer state") {
  const auto net = MaskNet::random_init(tiny_cfg(), 7);
  const auto path = (temp_dir() / "model.ckpt").string();

  save_checkpoint(path, net);
  const MaskNet back = load_checkpoint(path);
  CHECK(back.config() == net.config());
  REQUIRE(back.params().count() == net.params().count());
  CHECK(back.params().content_hash() == net.params().content_hash());
  CHECK(back.params().total_elements() == param_count(net.config()));

  // Optimizer state survives.
  Adam adam;
  auto trainable = MaskNet::random_init(tiny_cfg(), 7);
  Spectrogram spec(2, 17, 8);
  Rng rng(5);
  for (auto& v : spec.data) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  Tape tape;
  const auto masks = trainable.forward(tape, spec);
  auto loss = ops::l2_norm(tape, masks[0]);
  for (int m = 1; m < 4; ++m) {
    loss = ops::add(tape, loss, ops::l2_norm(tape, masks[static_cast<std::size_t>(m)]));
  }
  tape.backward(loss);
  adam.step(trainable.params(), 1e-3, 1e-5);

  save_checkpoint(path, trainable, &adam);
  Adam restored;
  const MaskNet back2 = load_checkpoint(path, &restored);
  CHECK(back2.params().content_hash() == trainable.params().content_hash());
  CHECK(restored.step_count() == adam.step_count());
  REQUIRE(restored.slots().size() == adam.slots().size());
  for (const auto& [name, slot] : adam.slots()) {
    const auto it = restored.slots().find(name);
    REQUIRE(it != restored.slots().end());
    CHECK(std::memcmp(it->second.m.data(), slot.m.data(),
                      slot.m.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(it->second.v.data(), slot.v.data(),
                      slot.v.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("checkpoint loader rejects damaged files") {
  const auto path = (temp_dir() / "damaged.ckpt").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "CSSKITXX garbage";
  }
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("magic"), Error);
}

TEST_CASE("architecture mismatch produces a field and shape diff") {
  NetConfig a = tiny_cfg();
  NetConfig b = tiny_cfg();
  b.model_dim = 16;
  try {
    check_net_config(a, b);
    FAIL("expected a mismatch error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("model_dim") != std::string::npos);
    CHECK(msg.find("expected 8") != std::string::npos);
    CHECK(msg.find("tensor") != std::string::npos);
  }
  CHECK_NOTHROW(check_net_config(a, a));
}

TEST_CASE("run config: defaults and derived bins") {
  const RunConfig cfg = parse_run_config_text(R"({"seed": 42})", "test");
  CHECK(cfg.seed == 42);
  CHECK(cfg.stft.window_len == 512);
  CHECK(cfg.net.bins == 257);
  CHECK(cfg.net.model_dim == 48);
  CHECK(cfg.css.window_sec == doctest::Approx(1.6));
  CHECK(cfg.css.shift_sec == doctest::Approx(0.4));
}

TEST_CASE("run config rejects unknown keys and lists every failure at once") {
  const std::string text = R"({
    "seed": 7,
    "mystery": 1,
    "stft": {"hop": 200, "bogus": true},
    "train": {"stage": 5, "batch_size": 0}
  })";
  try {
    parse_run_config_text(text, "test");
    FAIL("expected config errors");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(msg.find("mystery: unknown key") != std::string::npos);
    CHECK(msg.find("stft.bogus: unknown key") != std::string::npos);
    CHECK(msg.find("train.stage") != std::string::npos);
    CHECK(msg.find("train.batch_size") != std::string::npos);
    CHECK(msg.find("hop") != std::string::npos);  // 200 does not divide 512
  }
}

TEST_CASE("run config type and method validation") {
  CHECK_THROWS_AS(parse_run_config_text(R"({"seed": "text"})", "test"), Error);
  CHECK_THROWS_AS(parse_run_config_text(R"({"css": {"method": "magic"}})", "test"),
                  Error);
  CHECK_THROWS_AS(parse_run_config_text(R"(not json)", "test"), Error);
  CHECK_THROWS_AS(
      parse_run_config_text(R"({"simulate": {"geometry": [[1, 2]]}})", "test"), Error);
}
