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

#include "csskit/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "csskit/objectives.hpp"
#include "csskit/rng.hpp"
#include "doctest.h"
#include "oracle/finite_diff.hpp"
#include "oracle/report.hpp"

using namespace csskit;
namespace op = csskit::ops;

namespace {

NetConfig tiny_config() {
  NetConfig cfg;
  cfg.num_blocks = 2;
  cfg.layers_per_block = 1;
  cfg.model_dim = 8;
  cfg.attention_heads = 2;
  cfg.conv_kernel = 5;
  cfg.bins = 9;
  return cfg;
}

Spectrogram random_spec(int channels, int bins, int frames, std::uint64_t seed) {
  Spectrogram spec(channels, bins, frames);
  Rng rng(seed);
  for (auto& v : spec.data) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return spec;
}

Spectrogram permute_channels(const Spectrogram& spec, const std::vector<int>& order) {
  Spectrogram out(spec.channels, spec.bins, spec.frames);
  for (int c = 0; c < spec.channels; ++c) {
    for (int f = 0; f < spec.bins; ++f) {
      for (int n = 0; n < spec.frames; ++n) {
        out.at(c, f, n) = spec.at(order[static_cast<std::size_t>(c)], f, n);
      }
    }
  }
  return out;
}

double max_mask_diff(const MaskSet& a, const MaskSet& b) {
  double worst = 0.0;
  for (int m = 0; m < 4; ++m) {
    for (std::size_t i = 0; i < a.masks[static_cast<std::size_t>(m)].size(); ++i) {
      worst = std::max(worst, std::fabs(a.masks[static_cast<std::size_t>(m)][i] -
                                        b.masks[static_cast<std::size_t>(m)][i]));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("featurize conventions") {
  Spectrogram zero(2, 4, 3);
  auto feat = featurize<double>(zero);
  REQUIRE(feat.shape() == Shape{2, 3, 12});
  for (int c = 0; c < 2; ++c) {
    for (int n = 0; n < 3; ++n) {
      const std::size_t base = (static_cast<std::size_t>(c) * 3 + n) * 12;
      for (int f = 0; f < 4; ++f) {
        CHECK(feat.values()[base + static_cast<std::size_t>(f)] == 0.0);
        CHECK(feat.values()[base + static_cast<std::size_t>(4 + f)] == 1.0);
        CHECK(feat.values()[base + static_cast<std::size_t>(8 + f)] == 0.0);
      }
    }
  }
}

TEST_CASE("featurize is per-channel") {
  const Spectrogram spec = random_spec(3, 5, 4, 11);
  auto feat = featurize<double>(spec);

  // Permuting channels permutes features identically.
  const std::vector<int> order = {2, 0, 1};
  auto feat_perm = featurize<double>(permute_channels(spec, order));
  const std::size_t per_channel = feat.size() / 3;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < per_channel; ++i) {
      CHECK(feat_perm.values()[static_cast<std::size_t>(c) * per_channel + i] ==
            feat.values()[static_cast<std::size_t>(order[static_cast<std::size_t>(c)]) * per_channel + i]);
    }
  }

  // Changing channel 1 leaves channel 0's features untouched.
  Spectrogram tweaked = spec;
  for (int f = 0; f < 5; ++f) {
    for (int n = 0; n < 4; ++n) tweaked.at(1, f, n) *= 3.7;
  }
  auto feat_tweaked = featurize<double>(tweaked);
  for (std::size_t i = 0; i < per_channel; ++i) {
    CHECK(feat_tweaked.values()[i] == feat.values()[i]);
  }
  bool changed = false;
  for (std::size_t i = per_channel; i < 2 * per_channel; ++i) {
    changed = changed || feat_tweaked.values()[i] != feat.values()[i];
  }
  CHECK(changed);
}

TEST_CASE("featurize rejects empty input") {
  Spectrogram empty;
  CHECK_THROWS_AS(featurize<float>(empty), Error);
}

TEST_CASE("forward is invariant to channel permutations") {
  const NetConfig cfg = tiny_config();
  double worst = 0.0;
  for (std::uint64_t model_seed = 0; model_seed < 5; ++model_seed) {
    const auto net = MaskNet::random_init(cfg, model_seed);
    const int channels = 2 + static_cast<int>(model_seed % 5);
    const Spectrogram spec = random_spec(channels, cfg.bins, 8, 100 + model_seed);
    const MaskSet base = net.infer(spec);
    Rng rng(model_seed ^ 0x5eed);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> order(static_cast<std::size_t>(channels));
      for (int i = 0; i < channels; ++i) order[static_cast<std::size_t>(i)] = i;
      for (int i = channels - 1; i > 0; --i) {
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
      }
      const MaskSet permuted = net.infer(permute_channels(spec, order));
      worst = std::max(worst, max_mask_diff(base, permuted));
    }
  }
  CHECK(oracle::report_below("net.channel_permutation_max_diff", worst, 1e-5));
}

TEST_CASE("one parameter set runs on any channel count") {
  const NetConfig cfg = tiny_config();
  const auto net = MaskNet::random_init(cfg, 3);
  MaskSet first;
  for (int channels = 1; channels <= 8; ++channels) {
    const Spectrogram spec = random_spec(channels, cfg.bins, 8, 40 + channels);
    const MaskSet out = net.infer(spec);
    CHECK(out.bins == cfg.bins);
    CHECK(out.frames == 8);
    for (const auto& m : out.masks) {
      for (double v : m) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
      }
    }
  }
}

TEST_CASE("forward rejects too-short inputs") {
  const NetConfig cfg = tiny_config();
  const auto net = MaskNet::random_init(cfg, 3);
  const Spectrogram spec = random_spec(2, cfg.bins, cfg.min_frames() - 1, 9);
  CHECK_THROWS_WITH_AS(net.infer(spec), doctest::Contains("receptive-field"), Error);
}

TEST_CASE("tac layer degenerate single channel") {
  const int D = 4, N = 3;
  Rng rng(19);
  auto rand_t = [&](Shape s) {
    auto t = Tensor64::zeros(s);
    for (auto& v : t.values()) v = rng.uniform(-1, 1);
    return t;
  };
  const auto x = rand_t({1, N, D});
  const auto wt = rand_t({D, D});
  const auto bt = rand_t({D});
  const auto wp = rand_t({2 * D, D});
  const auto bp = rand_t({D});

  Tape64 tape;
  const auto out = tac_layer<double>(tape, x, wt, bt, wp, bp);

  // With one channel the mean is the transformed channel itself, so the layer
  // reduces to x + proj(concat(t(x), t(x))).
  Tape64 ref_tape;
  auto t = op::swish(ref_tape, op::add(ref_tape, op::matmul(ref_tape, x, wt), bt));
  auto cat = op::concat(ref_tape, {t, t}, 2);
  auto proj = op::swish(ref_tape, op::add(ref_tape, op::matmul(ref_tape, cat, wp), bp));
  auto expected = op::add(ref_tape, x, proj);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(out.values()[i] == doctest::Approx(expected.values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("tac layer symmetry and equivariance") {
  const int D = 5, N = 2, C = 3;
  Rng rng(29);
  auto rand_t = [&](Shape s) {
    auto t = Tensor64::zeros(s);
    for (auto& v : t.values()) v = rng.uniform(-1, 1);
    return t;
  };
  const auto wt = rand_t({D, D});
  const auto bt = rand_t({D});
  const auto wp = rand_t({2 * D, D});
  const auto bp = rand_t({D});

  // Duplicated channels produce identical outputs.
  {
    auto one = rand_t({1, N, D});
    std::vector<double> dup;
    dup.insert(dup.end(), one.values().begin(), one.values().end());
    dup.insert(dup.end(), one.values().begin(), one.values().end());
    auto x = Tensor64::from_data({2, N, D}, dup);
    Tape64 tape;
    auto out = tac_layer<double>(tape, x, wt, bt, wp, bp);
    const std::size_t half = out.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
      CHECK(out.values()[i] == doctest::Approx(out.values()[half + i]).epsilon(1e-12));
    }
  }

  // Permutation equivariance: tac(Px) == P tac(x).
  {
    auto x = rand_t({C, N, D});
    Tape64 t1;
    auto out = tac_layer<double>(t1, x, wt, bt, wp, bp);
    const std::vector<int> order = {1, 2, 0};
    std::vector<double> permuted(x.size());
    const std::size_t per = static_cast<std::size_t>(N) * D;
    for (int c = 0; c < C; ++c) {
      std::copy_n(x.values().begin() +
                      static_cast<std::ptrdiff_t>(static_cast<std::size_t>(order[static_cast<std::size_t>(c)]) * per),
                  per,
                  permuted.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(c) * per));
    }
    Tape64 t2;
    auto out_p = tac_layer<double>(t2, Tensor64::from_data({C, N, D}, permuted), wt, bt, wp, bp);
    double worst = 0.0;
    for (int c = 0; c < C; ++c) {
      for (std::size_t i = 0; i < per; ++i) {
        worst = std::max(
            worst,
            std::fabs(out_p.values()[static_cast<std::size_t>(c) * per + i] -
                      out.values()[static_cast<std::size_t>(order[static_cast<std::size_t>(c)]) * per + i]));
      }
    }
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("param_count matches a hand-summed minimal config") {
  NetConfig cfg;
  cfg.num_blocks = 1;
  cfg.layers_per_block = 1;
  cfg.model_dim = 1;
  cfg.attention_heads = 1;
  cfg.conv_kernel = 1;
  cfg.bins = 2;

  // Summed by module, d=1, h=4, f=2:
  std::size_t expected = 0;
  expected += 3 * 2 * 1 + 1;          // input projection
  expected += (1 + 1) + (2 + 1);      // tac transform + projection
  expected += 2 * (2 + (4 + 4) + (4 + 1));  // two half-ffns: ln, w1+b1, w2+b2
  expected += 2 + 4 * (1 + 1);        // attention ln + q/k/v/o
  expected += 2 + (2 + 2) + (1 + 1) + 2 + (1 + 1);  // conv ln, pw1, dw, norm, pw2
  expected += 2;                      // final layer norm
  expected += 4 * (2 + 2);            // four mask heads
  CHECK(param_count(cfg) == expected);

  const auto net = MaskNet::random_init(cfg, 0);
  CHECK(net.params().total_elements() == expected);
}

TEST_CASE("doubling model_dim quadruples the square-matrix parameter share") {
  NetConfig small = tiny_config();
  small.attention_heads = 1;
  NetConfig big = small;
  big.model_dim *= 2;

  auto square_share = [](const NetConfig& cfg) {
    std::size_t n = 0;
    for (const auto& [name, shape] : param_shapes(cfg)) {
      const bool square_like =
          shape.size() == 2 && shape[0] % cfg.model_dim == 0 && shape[1] % cfg.model_dim == 0;
      if (square_like) n += shape_numel(shape);
    }
    return n;
  };
  CHECK(square_share(big) == 4 * square_share(small));
}

TEST_CASE("select_channels") {
  const Spectrogram spec = random_spec(5, 3, 2, 77);

  // k == channels keeps the identity.
  {
    Rng rng(1);
    const Spectrogram out = select_channels(spec, 5, rng);
    CHECK(out.channels == 5);
    CHECK(std::equal(out.data.begin(), out.data.end(), spec.data.begin()));
  }

  // Fixed seed is deterministic.
  {
    const Spectrogram a = select_channels(spec, 2, std::uint64_t{99});
    const Spectrogram b = select_channels(spec, 2, std::uint64_t{99});
    CHECK(std::equal(a.data.begin(), a.data.end(), b.data.begin()));
  }

  // k = 1: each channel picked with frequency 1/C within a 3-sigma binomial bound.
  {
    Rng rng(12345);
    const int trials = 2000;
    std::vector<int> hits(5, 0);
    for (int t = 0; t < trials; ++t) {
      const Spectrogram out = select_channels(spec, 1, rng);
      for (int c = 0; c < 5; ++c) {
        if (out.at(0, 0, 0) == spec.at(c, 0, 0)) {
          hits[static_cast<std::size_t>(c)]++;
          break;
        }
      }
    }
    const double p = 1.0 / 5.0;
    const double sigma = std::sqrt(trials * p * (1 - p));
    for (int c = 0; c < 5; ++c) {
      CHECK(std::fabs(hits[static_cast<std::size_t>(c)] - trials * p) <= 3.0 * sigma);
    }
  }

  Rng rng(3);
  CHECK_THROWS_AS(select_channels(spec, 0, rng), Error);
  CHECK_THROWS_AS(select_channels(spec, 6, rng), Error);
}

TEST_CASE("selected channels preserve relative order") {
  Spectrogram spec(4, 1, 1);
  for (int c = 0; c < 4; ++c) spec.at(c, 0, 0) = {static_cast<double>(c), 0.0};
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Spectrogram out = select_channels(spec, 2, rng);
    CHECK(out.at(0, 0, 0).real() < out.at(1, 0, 0).real());
  }
}

TEST_CASE("every trainable tensor receives gradient from the stage-1 loss") {
  const NetConfig cfg = tiny_config();
  auto net = MaskNet::random_init(cfg, 21);
  const Spectrogram spec = random_spec(2, cfg.bins, 8, 5);

  Rng rng(55);
  const std::size_t n = static_cast<std::size_t>(cfg.bins) * 8;
  auto rand_mat = [&](double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
  };
  Stage1RefsT<float> refs;
  refs.speech_mag = {matrix_tensor<float>(rand_mat(0, 1), cfg.bins, 8),
                     matrix_tensor<float>(rand_mat(0, 1), cfg.bins, 8)};
  refs.noise_mag = {matrix_tensor<float>(rand_mat(0, 0.3), cfg.bins, 8),
                    matrix_tensor<float>(rand_mat(0, 0.3), cfg.bins, 8)};
  const auto y_mag = matrix_tensor<float>(rand_mat(0.2, 2.0), cfg.bins, 8);

  Tape tape;
  const auto masks = net.forward(tape, spec);
  const auto loss = stage1_loss<float>(tape, masks, y_mag, refs, LossWeights{});
  tape.backward(loss.loss);

  for (const auto& item : net.params().items()) {
    INFO(item.name);
    REQUIRE(item.tensor.has_grad());
    bool all_zero = true;
    for (float g : item.tensor.grad()) {
      REQUIRE(std::isfinite(g));
      all_zero = all_zero && g == 0.0f;
    }
    CHECK(!all_zero);
  }
}

TEST_CASE("end-to-end gradient matches finite differences on sampled parameters") {
  NetConfig cfg = tiny_config();
  auto net64 = to_double(MaskNet::random_init(cfg, 77));
  const Spectrogram spec = random_spec(2, cfg.bins, 8, 13);

  Rng rng(91);
  const std::size_t n = static_cast<std::size_t>(cfg.bins) * 8;
  auto rand_mat = [&](double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
  };
  Stage1RefsT<double> refs;
  refs.speech_mag = {matrix_tensor<double>(rand_mat(0, 1), cfg.bins, 8),
                     matrix_tensor<double>(rand_mat(0, 1), cfg.bins, 8)};
  refs.noise_mag = {matrix_tensor<double>(rand_mat(0, 0.3), cfg.bins, 8),
                    matrix_tensor<double>(rand_mat(0, 0.3), cfg.bins, 8)};
  const auto y_mag = matrix_tensor<double>(rand_mat(0.2, 2.0), cfg.bins, 8);

  auto eval_loss = [&]() {
    TapeT<double> tape(false);
    const auto masks = net64.forward(tape, spec);
    return stage1_loss<double>(tape, masks, y_mag, refs, LossWeights{}).loss.item();
  };

  TapeT<double> tape;
  const auto masks = net64.forward(tape, spec);
  const auto loss = stage1_loss<double>(tape, masks, y_mag, refs, LossWeights{});
  tape.backward(loss.loss);

  // Probe 10 randomly chosen parameters across distinct tensors.
  double worst = 0.0;
  const double eps = 1e-5;
  auto& items = net64.params().items();
  for (int probe = 0; probe < 10; ++probe) {
    auto& item = items[static_cast<std::size_t>(rng.uniform_int(
        static_cast<std::int64_t>(items.size())))];
    const std::size_t idx =
        static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(item.tensor.size())));
    const double saved = item.tensor.values()[idx];
    item.tensor.values()[idx] = saved + eps;
    const double hi = eval_loss();
    item.tensor.values()[idx] = saved - eps;
    const double lo = eval_loss();
    item.tensor.values()[idx] = saved;
    const double numeric = (hi - lo) / (2.0 * eps);
    const double analytic = item.tensor.grad()[idx];
    const double denom = std::max({1.0, std::fabs(numeric), std::fabs(analytic)});
    worst = std::max(worst, std::fabs(numeric - analytic) / denom);
  }
  CHECK(oracle::report_below("net.end_to_end_fd_rel_err", worst, 1e-3));
}

TEST_CASE("forward is bitwise deterministic") {
  const NetConfig cfg = tiny_config();
  const auto net = MaskNet::random_init(cfg, 99);
  const Spectrogram spec = random_spec(3, cfg.bins, 8, 123);
  const MaskSet a = net.infer(spec);
  const MaskSet b = net.infer(spec);
  for (int m = 0; m < 4; ++m) {
    CHECK(std::memcmp(a.masks[static_cast<std::size_t>(m)].data(),
                      b.masks[static_cast<std::size_t>(m)].data(),
                      a.masks[static_cast<std::size_t>(m)].size() * sizeof(double)) == 0);
  }
}
