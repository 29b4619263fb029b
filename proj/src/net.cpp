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

#include <cmath>

namespace csskit {

namespace {

constexpr int kFfnExpand = 4;
namespace op = csskit::ops;

}  // namespace

void NetConfig::validate() const {
  require(num_blocks > 0 && layers_per_block > 0, ErrorCode::kConfig,
          "net: num_blocks and layers_per_block must be > 0");
  require(model_dim > 0 && attention_heads > 0, ErrorCode::kConfig,
          "net: model_dim and attention_heads must be > 0");
  require(model_dim % attention_heads == 0, ErrorCode::kConfig, "net: model_dim (",
          model_dim, ") must be divisible by attention_heads (", attention_heads, ")");
  require(conv_kernel > 0 && conv_kernel % 2 == 1, ErrorCode::kConfig,
          "net: conv_kernel must be odd and positive, got ", conv_kernel);
  require(bins > 1, ErrorCode::kConfig, "net: bins must be > 1");
}

template <typename S>
TensorT<S> featurize(const Spectrogram& spec) {
  require(spec.channels >= 1 && spec.bins >= 1 && spec.frames >= 1,
          ErrorCode::kInvalidArgument, "featurize: empty spectrogram");
  const int c_count = spec.channels;
  const int bins = spec.bins;
  const int frames = spec.frames;
  auto feat = TensorT<S>::zeros({c_count, frames, 3 * bins});
  auto& fv = feat.values();
  const std::size_t row = static_cast<std::size_t>(3) * bins;
  for (int c = 0; c < c_count; ++c) {
    for (int n = 0; n < frames; ++n) {
      const std::size_t base =
          (static_cast<std::size_t>(c) * frames + n) * row;
      for (int f = 0; f < bins; ++f) {
        const std::complex<double> y = spec.at(c, f, n);
        const double mag = std::abs(y);
        fv[base + static_cast<std::size_t>(f)] = static_cast<S>(std::log1p(mag));
        if (mag > 0.0) {
          fv[base + static_cast<std::size_t>(bins + f)] = static_cast<S>(y.real() / mag);
          fv[base + static_cast<std::size_t>(2 * bins + f)] = static_cast<S>(y.imag() / mag);
        } else {
          fv[base + static_cast<std::size_t>(bins + f)] = S(1);
          fv[base + static_cast<std::size_t>(2 * bins + f)] = S(0);
        }
      }
    }
  }
  return feat;
}

Spectrogram select_channels(const Spectrogram& spec, int k, Rng& rng) {
  require(k >= 1 && k <= spec.channels, ErrorCode::kInvalidArgument,
          "select_channels: k=", k, " out of range [1,", spec.channels, "]");
  const std::vector<int> chosen = rng.sample_without_replacement(spec.channels, k);
  Spectrogram out(k, spec.bins, spec.frames);
  for (int i = 0; i < k; ++i) {
    const int c = chosen[static_cast<std::size_t>(i)];
    for (int f = 0; f < spec.bins; ++f) {
      for (int n = 0; n < spec.frames; ++n) {
        out.at(i, f, n) = spec.at(c, f, n);
      }
    }
  }
  return out;
}

Spectrogram select_channels(const Spectrogram& spec, int k, std::uint64_t seed) {
  Rng rng(seed);
  return select_channels(spec, k, rng);
}

template <typename S>
TensorT<S> tac_layer(TapeT<S>& tape, const TensorT<S>& x,
                     const TensorT<S>& transform_w, const TensorT<S>& transform_b,
                     const TensorT<S>& proj_w, const TensorT<S>& proj_b) {
  require(x.ndim() == 3, ErrorCode::kShapeMismatch,
          "tac_layer: expected (channels, frames, dim), got ", shape_str(x.shape()));
  const int channels = x.dim(0);
  auto t = op::swish(tape, op::add(tape, op::matmul(tape, x, transform_w), transform_b));
  auto avg = op::mean_axis(tape, t, 0);
  auto avg_e = op::expand0(tape, avg, channels);
  auto cat = op::concat(tape, {t, avg_e}, 2);
  auto proj = op::swish(tape, op::add(tape, op::matmul(tape, cat, proj_w), proj_b));
  return op::add(tape, x, proj);
}

std::vector<std::pair<std::string, Shape>> param_shapes(const NetConfig& cfg) {
  cfg.validate();
  const int d = cfg.model_dim;
  const int f = cfg.bins;
  const int h = d * kFfnExpand;
  std::vector<std::pair<std::string, Shape>> out;
  out.emplace_back("input_proj.w", Shape{3 * f, d});
  out.emplace_back("input_proj.b", Shape{d});
  for (int b = 0; b < cfg.num_blocks; ++b) {
    const std::string bp = "block" + std::to_string(b) + ".";
    out.emplace_back(bp + "tac.transform.w", Shape{d, d});
    out.emplace_back(bp + "tac.transform.b", Shape{d});
    out.emplace_back(bp + "tac.proj.w", Shape{2 * d, d});
    out.emplace_back(bp + "tac.proj.b", Shape{d});
    for (int l = 0; l < cfg.layers_per_block; ++l) {
      const std::string lp = bp + "layer" + std::to_string(l) + ".";
      for (const char* ffn : {"ffn1.", "ffn2."}) {
        out.emplace_back(lp + ffn + "ln.g", Shape{d});
        out.emplace_back(lp + ffn + "ln.b", Shape{d});
        out.emplace_back(lp + ffn + "w1", Shape{d, h});
        out.emplace_back(lp + ffn + "b1", Shape{h});
        out.emplace_back(lp + ffn + "w2", Shape{h, d});
        out.emplace_back(lp + ffn + "b2", Shape{d});
      }
      out.emplace_back(lp + "attn.ln.g", Shape{d});
      out.emplace_back(lp + "attn.ln.b", Shape{d});
      for (const char* w : {"wq", "wk", "wv", "wo"}) {
        out.emplace_back(lp + "attn." + w + ".w", Shape{d, d});
        out.emplace_back(lp + "attn." + w + ".b", Shape{d});
      }
      out.emplace_back(lp + "conv.ln.g", Shape{d});
      out.emplace_back(lp + "conv.ln.b", Shape{d});
      out.emplace_back(lp + "conv.pw1.w", Shape{d, 2 * d});
      out.emplace_back(lp + "conv.pw1.b", Shape{2 * d});
      out.emplace_back(lp + "conv.dw.w", Shape{d, cfg.conv_kernel});
      out.emplace_back(lp + "conv.dw.b", Shape{d});
      out.emplace_back(lp + "conv.norm.g", Shape{d});
      out.emplace_back(lp + "conv.norm.b", Shape{d});
      out.emplace_back(lp + "conv.pw2.w", Shape{d, d});
      out.emplace_back(lp + "conv.pw2.b", Shape{d});
      out.emplace_back(lp + "final_ln.g", Shape{d});
      out.emplace_back(lp + "final_ln.b", Shape{d});
    }
  }
  for (int m = 0; m < NetConfig::kMaskOutputs; ++m) {
    const std::string hp = "head" + std::to_string(m) + ".";
    out.emplace_back(hp + "w", Shape{d, f});
    out.emplace_back(hp + "b", Shape{f});
  }
  return out;
}

std::size_t param_count(const NetConfig& cfg) {
  std::size_t n = 0;
  for (const auto& [name, shape] : param_shapes(cfg)) n += shape_numel(shape);
  return n;
}

namespace {

bool is_layer_norm_gain(const std::string& name) {
  return name.size() >= 2 && (name.ends_with("ln.g") || name.ends_with("norm.g"));
}

bool is_bias_like(const std::string& name) {
  return name.ends_with(".b") || name.ends_with(".b1") || name.ends_with(".b2");
}

template <typename S>
ParamSetT<S> init_params(const NetConfig& cfg, std::uint64_t seed) {
  ParamSetT<S> params;
  Rng rng(seed);
  for (const auto& [name, shape] : param_shapes(cfg)) {
    auto t = TensorT<S>::zeros(shape);
    if (is_layer_norm_gain(name)) {
      for (auto& v : t.values()) v = S(1);
    } else if (!is_bias_like(name)) {
      // Glorot uniform on weight matrices; kernels use (dim, kernel) fan.
      const int fan_in = shape.size() == 2 ? shape[0] : shape.back();
      const int fan_out = shape.back();
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (auto& v : t.values()) v = static_cast<S>(rng.uniform(-limit, limit));
    }
    params.add(name, std::move(t));
  }
  return params;
}

template <typename S>
TensorT<S> positional_encoding(int frames, int dim) {
  auto pe = TensorT<S>::zeros({frames, dim});
  auto& v = pe.values();
  for (int n = 0; n < frames; ++n) {
    for (int i = 0; i < dim; i += 2) {
      const double rate = std::pow(10000.0, -static_cast<double>(i) / dim);
      const double ang = n * rate;
      v[static_cast<std::size_t>(n) * dim + i] = static_cast<S>(std::sin(ang));
      if (i + 1 < dim) {
        v[static_cast<std::size_t>(n) * dim + i + 1] = static_cast<S>(std::cos(ang));
      }
    }
  }
  return pe;
}

}  // namespace

template <typename S>
MaskNetT<S>::MaskNetT(NetConfig cfg, ParamSetT<S> params)
    : cfg_(cfg), params_(std::move(params)) {
  cfg_.validate();
  const auto expected = param_shapes(cfg_);
  require(expected.size() == params_.count(), ErrorCode::kShapeMismatch,
          "model has ", params_.count(), " tensors, config implies ", expected.size());
  for (const auto& [name, shape] : expected) {
    require(params_.contains(name), ErrorCode::kShapeMismatch,
            "model is missing tensor ", name);
    require(params_.at(name).shape() == shape, ErrorCode::kShapeMismatch,
            "model tensor ", name, " has shape ", shape_str(params_.at(name).shape()),
            ", config implies ", shape_str(shape));
  }
}

template <typename S>
MaskNetT<S> MaskNetT<S>::random_init(const NetConfig& cfg, std::uint64_t seed) {
  return MaskNetT<S>(cfg, init_params<S>(cfg, seed));
}

template <typename S>
std::array<TensorT<S>, NetConfig::kMaskOutputs> MaskNetT<S>::forward(
    TapeT<S>& tape, const Spectrogram& spec) const {
  require(spec.channels >= 1, ErrorCode::kInvalidArgument,
          "forward: spectrogram has no channels");
  require(spec.bins == cfg_.bins, ErrorCode::kShapeMismatch, "forward: input has ",
          spec.bins, " bins, model expects ", cfg_.bins);
  require(spec.frames >= cfg_.min_frames(), ErrorCode::kInvalidArgument,
          "forward: ", spec.frames, " frames shorter than receptive-field minimum ",
          cfg_.min_frames());

  const int channels = spec.channels;
  const int frames = spec.frames;
  const int d = cfg_.model_dim;
  const int heads = cfg_.attention_heads;
  const int dh = d / heads;
  const auto& p = params_;

  auto x = featurize<S>(spec);
  x = op::add(tape, op::matmul(tape, x, p.at("input_proj.w")), p.at("input_proj.b"));
  x = op::add(tape, x, positional_encoding<S>(frames, d));

  for (int b = 0; b < cfg_.num_blocks; ++b) {
    const std::string bp = "block" + std::to_string(b) + ".";
    x = tac_layer(tape, x, p.at(bp + "tac.transform.w"), p.at(bp + "tac.transform.b"),
                  p.at(bp + "tac.proj.w"), p.at(bp + "tac.proj.b"));
    for (int l = 0; l < cfg_.layers_per_block; ++l) {
      const std::string lp = bp + "layer" + std::to_string(l) + ".";
      auto ffn = [&](const std::string& fp, const TensorT<S>& in) {
        auto h = op::layer_norm(tape, in, p.at(fp + "ln.g"), p.at(fp + "ln.b"));
        h = op::swish(tape, op::add(tape, op::matmul(tape, h, p.at(fp + "w1")),
                                    p.at(fp + "b1")));
        h = op::add(tape, op::matmul(tape, h, p.at(fp + "w2")), p.at(fp + "b2"));
        return op::add(tape, in, op::scale(tape, h, S(0.5)));
      };

      x = ffn(lp + "ffn1.", x);

      {  // multi-head self-attention over frames, per channel
        auto h = op::layer_norm(tape, x, p.at(lp + "attn.ln.g"), p.at(lp + "attn.ln.b"));
        auto project = [&](const char* which) {
          auto y = op::add(tape,
                           op::matmul(tape, h, p.at(lp + "attn." + std::string(which) + ".w")),
                           p.at(lp + "attn." + std::string(which) + ".b"));
          y = op::reshape(tape, y, {channels, frames, heads, dh});
          return op::transpose(tape, y, {0, 2, 1, 3});  // (C, H, N, dh)
        };
        auto q = project("wq");
        auto k = project("wk");
        auto v = project("wv");
        auto kt = op::transpose(tape, k, {0, 1, 3, 2});
        auto scores = op::scale(tape, op::matmul(tape, q, kt),
                                static_cast<S>(1.0 / std::sqrt(static_cast<double>(dh))));
        auto ctx = op::matmul(tape, op::softmax(tape, scores), v);  // (C, H, N, dh)
        ctx = op::transpose(tape, ctx, {0, 2, 1, 3});
        ctx = op::reshape(tape, ctx, {channels, frames, d});
        auto out = op::add(tape, op::matmul(tape, ctx, p.at(lp + "attn.wo.w")),
                           p.at(lp + "attn.wo.b"));
        x = op::add(tape, x, out);
      }

      {  // convolution module: pointwise + GLU, depthwise, norm, swish, pointwise
        auto h = op::layer_norm(tape, x, p.at(lp + "conv.ln.g"), p.at(lp + "conv.ln.b"));
        h = op::add(tape, op::matmul(tape, h, p.at(lp + "conv.pw1.w")),
                    p.at(lp + "conv.pw1.b"));
        auto gate = op::sigmoid(tape, op::slice(tape, h, 2, d, 2 * d));
        h = op::mul(tape, op::slice(tape, h, 2, 0, d), gate);
        h = op::conv1d_depthwise(tape, h, p.at(lp + "conv.dw.w"), p.at(lp + "conv.dw.b"));
        h = op::layer_norm(tape, h, p.at(lp + "conv.norm.g"), p.at(lp + "conv.norm.b"));
        h = op::swish(tape, h);
        h = op::add(tape, op::matmul(tape, h, p.at(lp + "conv.pw2.w")),
                    p.at(lp + "conv.pw2.b"));
        x = op::add(tape, x, h);
      }

      x = ffn(lp + "ffn2.", x);
      x = op::layer_norm(tape, x, p.at(lp + "final_ln.g"), p.at(lp + "final_ln.b"));
    }
  }

  auto pooled = op::mean_axis(tape, x, 0);  // (N, D)
  std::array<TensorT<S>, NetConfig::kMaskOutputs> masks;
  for (int m = 0; m < NetConfig::kMaskOutputs; ++m) {
    const std::string hp = "head" + std::to_string(m) + ".";
    auto logits = op::add(tape, op::matmul(tape, pooled, p.at(hp + "w")), p.at(hp + "b"));
    masks[static_cast<std::size_t>(m)] =
        op::transpose(tape, op::sigmoid(tape, logits), {1, 0});  // (F, N)
  }
  return masks;
}

template <typename S>
MaskSet MaskNetT<S>::infer(const Spectrogram& spec) const {
  TapeT<S> tape(false);
  const auto out = forward(tape, spec);
  MaskSet set(spec.bins, spec.frames);
  for (int m = 0; m < NetConfig::kMaskOutputs; ++m) {
    const auto& v = out[static_cast<std::size_t>(m)].values();
    auto& dst = set.masks[static_cast<std::size_t>(m)];
    for (std::size_t i = 0; i < v.size(); ++i) dst[i] = static_cast<double>(v[i]);
  }
  return set;
}

MaskNetT<double> to_double(const MaskNetT<float>& net) {
  ParamSetT<double> params;
  for (const auto& item : net.params().items()) {
    std::vector<double> data(item.tensor.values().begin(), item.tensor.values().end());
    params.add(item.name, TensorT<double>::from_data(item.tensor.shape(), std::move(data)));
  }
  return MaskNetT<double>(net.config(), std::move(params));
}

template TensorT<float> featurize<float>(const Spectrogram&);
template TensorT<double> featurize<double>(const Spectrogram&);
template TensorT<float> tac_layer<float>(TapeT<float>&, const TensorT<float>&,
                                         const TensorT<float>&, const TensorT<float>&,
                                         const TensorT<float>&, const TensorT<float>&);
template TensorT<double> tac_layer<double>(TapeT<double>&, const TensorT<double>&,
                                           const TensorT<double>&, const TensorT<double>&,
                                           const TensorT<double>&, const TensorT<double>&);
template class MaskNetT<float>;
template class MaskNetT<double>;

}  // namespace csskit
