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

#include "csskit/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace csskit::ops {

namespace {

template <typename S>
using Impl = detail::TensorImpl<S>;

template <typename S>
using RowMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using MatMap = Eigen::Map<RowMat<S>>;
template <typename S>
using ConstMatMap = Eigen::Map<const RowMat<S>>;

template <typename S>
void ensure_grad(Impl<S>* t) {
  if (t->grad.empty()) t->grad.assign(t->data.size(), S(0));
}

template <typename S>
TensorT<S> make_result(TapeT<S>& tape, Shape shape, bool any_requires_grad) {
  auto out = TensorT<S>::zeros(std::move(shape));
  out.set_requires_grad(tape.recording() && any_requires_grad);
  return out;
}

std::size_t prod(const Shape& s, std::size_t begin, std::size_t end) {
  std::size_t p = 1;
  for (std::size_t i = begin; i < end; ++i) p *= static_cast<std::size_t>(s[i]);
  return p;
}

int norm_axis(int axis, int ndim) {
  if (axis < 0) axis += ndim;
  require(axis >= 0 && axis < ndim, ErrorCode::kInvalidArgument,
          "axis ", axis, " out of range for ", ndim, "-d tensor");
  return axis;
}

template <typename S>
void check_same_shape(const TensorT<S>& a, const TensorT<S>& b, const char* op) {
  require(a.shape() == b.shape(), ErrorCode::kShapeMismatch, op,
          ": shape mismatch ", shape_str(a.shape()), " vs ", shape_str(b.shape()));
}

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  const std::size_t off = big.size() - small.size();
  for (std::size_t i = 0; i < small.size(); ++i) {
    if (small[i] != big[off + i]) return false;
  }
  return true;
}

}  // namespace

template <typename S>
TensorT<S> add(TapeT<S>& tape, const TensorT<S>& a, const TensorT<S>& b) {
  const bool broadcast = a.shape() != b.shape();
  if (broadcast) {
    require(is_suffix(b.shape(), a.shape()), ErrorCode::kShapeMismatch,
            "add: shape mismatch ", shape_str(a.shape()), " vs ",
            shape_str(b.shape()));
  }
  auto out = make_result(tape, a.shape(), a.requires_grad() || b.requires_grad());
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& ov = out.values();
  const std::size_t bn = bv.size();
  for (std::size_t i = 0; i < av.size(); ++i) ov[i] = av[i] + bv[i % bn];
  if (out.requires_grad()) {
    tape.record(out, [a, b, out]() {
      const auto& g = out.impl()->grad;
      if (a.requires_grad()) {
        ensure_grad(a.impl());
        auto& ga = a.impl()->grad;
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      if (b.requires_grad()) {
        ensure_grad(b.impl());
        auto& gb = b.impl()->grad;
        const std::size_t bn2 = gb.size();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i % bn2] += g[i];
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> sub(TapeT<S>& tape, const TensorT<S>& a, const TensorT<S>& b) {
  check_same_shape(a, b, "sub");
  auto out = make_result(tape, a.shape(), a.requires_grad() || b.requires_grad());
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < av.size(); ++i) ov[i] = av[i] - bv[i];
  if (out.requires_grad()) {
    tape.record(out, [a, b, out]() {
      const auto& g = out.impl()->grad;
      if (a.requires_grad()) {
        ensure_grad(a.impl());
        auto& ga = a.impl()->grad;
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      if (b.requires_grad()) {
        ensure_grad(b.impl());
        auto& gb = b.impl()->grad;
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> mul(TapeT<S>& tape, const TensorT<S>& a, const TensorT<S>& b) {
  check_same_shape(a, b, "mul");
  auto out = make_result(tape, a.shape(), a.requires_grad() || b.requires_grad());
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < av.size(); ++i) ov[i] = av[i] * bv[i];
  if (out.requires_grad()) {
    tape.record(out, [a, b, out]() {
      const auto& g = out.impl()->grad;
      if (a.requires_grad()) {
        ensure_grad(a.impl());
        auto& ga = a.impl()->grad;
        const auto& bv2 = b.values();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv2[i];
      }
      if (b.requires_grad()) {
        ensure_grad(b.impl());
        auto& gb = b.impl()->grad;
        const auto& av2 = a.values();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av2[i];
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> scale(TapeT<S>& tape, const TensorT<S>& a, S c) {
  auto out = make_result(tape, a.shape(), a.requires_grad());
  const auto& av = a.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < av.size(); ++i) ov[i] = av[i] * c;
  if (out.requires_grad()) {
    tape.record(out, [a, out, c]() {
      ensure_grad(a.impl());
      auto& ga = a.impl()->grad;
      const auto& g = out.impl()->grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
    });
  }
  return out;
}

template <typename S>
TensorT<S> matmul(TapeT<S>& tape, const TensorT<S>& a, const TensorT<S>& b) {
  require(a.ndim() >= 2 && b.ndim() >= 2, ErrorCode::kShapeMismatch,
          "matmul: need >=2-d operands, got ", shape_str(a.shape()), " and ",
          shape_str(b.shape()));
  const int m = a.dim(-2);
  const int k = a.dim(-1);
  require(b.dim(-2) == k, ErrorCode::kShapeMismatch, "matmul: inner dims differ, ",
          shape_str(a.shape()), " vs ", shape_str(b.shape()));
  const int n = b.dim(-1);
  const bool b_shared = b.ndim() == 2;
  if (!b_shared) {
    require(std::equal(a.shape().begin(), a.shape().end() - 2, b.shape().begin(),
                       b.shape().end() - 2) &&
                a.ndim() == b.ndim(),
            ErrorCode::kShapeMismatch, "matmul: leading dims differ, ",
            shape_str(a.shape()), " vs ", shape_str(b.shape()));
  }
  Shape out_shape(a.shape().begin(), a.shape().end() - 1);
  out_shape.push_back(n);
  const std::size_t batch = prod(a.shape(), 0, a.shape().size() - 2);

  auto out = make_result(tape, out_shape, a.requires_grad() || b.requires_grad());
  const std::size_t a_step = static_cast<std::size_t>(m) * k;
  const std::size_t b_step = b_shared ? 0 : static_cast<std::size_t>(k) * n;
  const std::size_t o_step = static_cast<std::size_t>(m) * n;
  for (std::size_t i = 0; i < batch; ++i) {
    ConstMatMap<S> ma(a.values().data() + i * a_step, m, k);
    ConstMatMap<S> mb(b.values().data() + i * b_step, k, n);
    MatMap<S> mo(out.values().data() + i * o_step, m, n);
    mo.noalias() = ma * mb;
  }
  if (out.requires_grad()) {
    tape.record(out, [a, b, out, m, k, n, batch, a_step, b_step, o_step]() {
      const auto& g = out.impl()->grad;
      if (a.requires_grad()) {
        ensure_grad(a.impl());
        for (std::size_t i = 0; i < batch; ++i) {
          ConstMatMap<S> mg(g.data() + i * o_step, m, n);
          ConstMatMap<S> mb(b.values().data() + i * b_step, k, n);
          MatMap<S> mga(a.impl()->grad.data() + i * a_step, m, k);
          mga.noalias() += mg * mb.transpose();
        }
      }
      if (b.requires_grad()) {
        ensure_grad(b.impl());
        for (std::size_t i = 0; i < batch; ++i) {
          ConstMatMap<S> mg(g.data() + i * o_step, m, n);
          ConstMatMap<S> ma(a.values().data() + i * a_step, m, k);
          MatMap<S> mgb(b.impl()->grad.data() + i * b_step, k, n);
          mgb.noalias() += ma.transpose() * mg;
        }
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> conv1d_depthwise(TapeT<S>& tape, const TensorT<S>& x,
                            const TensorT<S>& weight, const TensorT<S>& bias) {
  require(x.ndim() >= 2, ErrorCode::kShapeMismatch,
          "conv1d_depthwise: input must be (..., frames, dim), got ",
          shape_str(x.shape()));
  const int frames = x.dim(-2);
  const int dim = x.dim(-1);
  require(weight.ndim() == 2 && weight.dim(0) == dim, ErrorCode::kShapeMismatch,
          "conv1d_depthwise: weight ", shape_str(weight.shape()),
          " does not match input dim ", dim);
  const int kernel = weight.dim(1);
  require(kernel % 2 == 1, ErrorCode::kInvalidArgument,
          "conv1d_depthwise: kernel must be odd, got ", kernel);
  const int pad = (kernel - 1) / 2;
  require(frames >= pad + 1, ErrorCode::kInvalidArgument,
          "conv1d_depthwise: ", frames, " frames shorter than receptive-field minimum ",
          pad + 1);
  require(bias.ndim() == 1 && bias.dim(0) == dim, ErrorCode::kShapeMismatch,
          "conv1d_depthwise: bias ", shape_str(bias.shape()), " does not match dim ",
          dim);

  const std::size_t batch = prod(x.shape(), 0, x.shape().size() - 2);
  const std::size_t step = static_cast<std::size_t>(frames) * dim;
  auto out = make_result(
      tape, x.shape(),
      x.requires_grad() || weight.requires_grad() || bias.requires_grad());
  const auto& xv = x.values();
  const auto& wv = weight.values();
  const auto& bv = bias.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < batch; ++i) {
    const S* xi = xv.data() + i * step;
    S* oi = ov.data() + i * step;
    for (int t = 0; t < frames; ++t) {
      for (int d = 0; d < dim; ++d) {
        S acc = bv[static_cast<std::size_t>(d)];
        const int k_lo = std::max(0, pad - t);
        const int k_hi = std::min(kernel, frames + pad - t);
        for (int k = k_lo; k < k_hi; ++k) {
          acc += wv[static_cast<std::size_t>(d) * kernel + k] *
                 xi[static_cast<std::size_t>(t + k - pad) * dim + d];
        }
        oi[static_cast<std::size_t>(t) * dim + d] = acc;
      }
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [x, weight, bias, out, frames, dim, kernel, pad, batch, step]() {
      const auto& g = out.impl()->grad;
      const auto& xv2 = x.values();
      const auto& wv2 = weight.values();
      if (x.requires_grad()) ensure_grad(x.impl());
      if (weight.requires_grad()) ensure_grad(weight.impl());
      if (bias.requires_grad()) ensure_grad(bias.impl());
      for (std::size_t i = 0; i < batch; ++i) {
        const S* gi = g.data() + i * step;
        for (int t = 0; t < frames; ++t) {
          for (int d = 0; d < dim; ++d) {
            const S gtd = gi[static_cast<std::size_t>(t) * dim + d];
            if (bias.requires_grad()) {
              bias.impl()->grad[static_cast<std::size_t>(d)] += gtd;
            }
            const int k_lo = std::max(0, pad - t);
            const int k_hi = std::min(kernel, frames + pad - t);
            for (int k = k_lo; k < k_hi; ++k) {
              const std::size_t xoff =
                  i * step + static_cast<std::size_t>(t + k - pad) * dim + d;
              if (weight.requires_grad()) {
                weight.impl()->grad[static_cast<std::size_t>(d) * kernel + k] +=
                    gtd * xv2[xoff];
              }
              if (x.requires_grad()) {
                x.impl()->grad[xoff] +=
                    gtd * wv2[static_cast<std::size_t>(d) * kernel + k];
              }
            }
          }
        }
      }
    });
  }
  return out;
}

namespace {

template <typename S>
S sigmoid_val(S x) {
  if (x >= S(0)) return S(1) / (S(1) + std::exp(-x));
  const S e = std::exp(x);
  return e / (S(1) + e);
}

}  // namespace

template <typename S>
TensorT<S> sigmoid(TapeT<S>& tape, const TensorT<S>& x) {
  auto out = make_result(tape, x.shape(), x.requires_grad());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < xv.size(); ++i) ov[i] = sigmoid_val(xv[i]);
  if (out.requires_grad()) {
    tape.record(out, [x, out]() {
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const auto& g = out.impl()->grad;
      const auto& ov2 = out.values();
      for (std::size_t i = 0; i < g.size(); ++i) {
        gx[i] += g[i] * ov2[i] * (S(1) - ov2[i]);
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> swish(TapeT<S>& tape, const TensorT<S>& x) {
  auto out = make_result(tape, x.shape(), x.requires_grad());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < xv.size(); ++i) ov[i] = xv[i] * sigmoid_val(xv[i]);
  if (out.requires_grad()) {
    tape.record(out, [x, out]() {
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const auto& g = out.impl()->grad;
      const auto& xv2 = x.values();
      for (std::size_t i = 0; i < g.size(); ++i) {
        const S s = sigmoid_val(xv2[i]);
        gx[i] += g[i] * (s + xv2[i] * s * (S(1) - s));
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> relu(TapeT<S>& tape, const TensorT<S>& x) {
  auto out = make_result(tape, x.shape(), x.requires_grad());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < xv.size(); ++i) ov[i] = xv[i] > S(0) ? xv[i] : S(0);
  if (out.requires_grad()) {
    tape.record(out, [x, out]() {
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const auto& g = out.impl()->grad;
      const auto& xv2 = x.values();
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (xv2[i] > S(0)) gx[i] += g[i];
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> layer_norm(TapeT<S>& tape, const TensorT<S>& x, const TensorT<S>& gain,
                      const TensorT<S>& bias, S eps) {
  const int d = x.dim(-1);
  require(gain.ndim() == 1 && gain.dim(0) == d && bias.ndim() == 1 && bias.dim(0) == d,
          ErrorCode::kShapeMismatch, "layer_norm: gain/bias must be (", d,
          "), got ", shape_str(gain.shape()), " and ", shape_str(bias.shape()));
  const std::size_t rows = x.size() / static_cast<std::size_t>(d);
  auto out = make_result(
      tape, x.shape(),
      x.requires_grad() || gain.requires_grad() || bias.requires_grad());
  // Normalized values are saved for the backward pass.
  auto xhat = TensorT<S>::zeros(x.shape());
  auto inv_std = TensorT<S>::zeros({static_cast<int>(rows)});
  const auto& xv = x.values();
  const auto& gv = gain.values();
  const auto& bv = bias.values();
  auto& ov = out.values();
  auto& hv = xhat.values();
  auto& sv = inv_std.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const S* xr = xv.data() + r * static_cast<std::size_t>(d);
    double mean = 0.0;
    for (int i = 0; i < d; ++i) mean += static_cast<double>(xr[i]);
    mean /= d;
    double var = 0.0;
    for (int i = 0; i < d; ++i) {
      const double c = static_cast<double>(xr[i]) - mean;
      var += c * c;
    }
    var /= d;
    const S istd = static_cast<S>(1.0 / std::sqrt(var + static_cast<double>(eps)));
    sv[r] = istd;
    for (int i = 0; i < d; ++i) {
      const std::size_t off = r * static_cast<std::size_t>(d) + i;
      hv[off] = (xr[i] - static_cast<S>(mean)) * istd;
      ov[off] = hv[off] * gv[static_cast<std::size_t>(i)] + bv[static_cast<std::size_t>(i)];
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [x, gain, bias, out, xhat, inv_std, d, rows]() {
      const auto& g = out.impl()->grad;
      const auto& hv2 = xhat.values();
      const auto& gv2 = gain.values();
      const auto& sv2 = inv_std.values();
      if (gain.requires_grad()) ensure_grad(gain.impl());
      if (bias.requires_grad()) ensure_grad(bias.impl());
      if (x.requires_grad()) ensure_grad(x.impl());
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t base = r * static_cast<std::size_t>(d);
        if (gain.requires_grad() || bias.requires_grad()) {
          for (int i = 0; i < d; ++i) {
            if (gain.requires_grad()) {
              gain.impl()->grad[static_cast<std::size_t>(i)] +=
                  g[base + i] * hv2[base + i];
            }
            if (bias.requires_grad()) {
              bias.impl()->grad[static_cast<std::size_t>(i)] += g[base + i];
            }
          }
        }
        if (x.requires_grad()) {
          double mean_dh = 0.0;
          double mean_dh_h = 0.0;
          for (int i = 0; i < d; ++i) {
            const double dh = static_cast<double>(g[base + i]) * gv2[static_cast<std::size_t>(i)];
            mean_dh += dh;
            mean_dh_h += dh * static_cast<double>(hv2[base + i]);
          }
          mean_dh /= d;
          mean_dh_h /= d;
          auto& gx = x.impl()->grad;
          for (int i = 0; i < d; ++i) {
            const double dh = static_cast<double>(g[base + i]) * gv2[static_cast<std::size_t>(i)];
            gx[base + i] += static_cast<S>(
                static_cast<double>(sv2[r]) *
                (dh - mean_dh - static_cast<double>(hv2[base + i]) * mean_dh_h));
          }
        }
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> softmax(TapeT<S>& tape, const TensorT<S>& x) {
  const int d = x.dim(-1);
  const std::size_t rows = x.size() / static_cast<std::size_t>(d);
  auto out = make_result(tape, x.shape(), x.requires_grad());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t base = r * static_cast<std::size_t>(d);
    S mx = xv[base];
    for (int i = 1; i < d; ++i) mx = std::max(mx, xv[base + i]);
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
      const double e = std::exp(static_cast<double>(xv[base + i] - mx));
      ov[base + i] = static_cast<S>(e);
      sum += e;
    }
    const S inv = static_cast<S>(1.0 / sum);
    for (int i = 0; i < d; ++i) ov[base + i] *= inv;
  }
  if (out.requires_grad()) {
    tape.record(out, [x, out, d, rows]() {
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const auto& g = out.impl()->grad;
      const auto& ov2 = out.values();
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t base = r * static_cast<std::size_t>(d);
        double dot = 0.0;
        for (int i = 0; i < d; ++i) {
          dot += static_cast<double>(g[base + i]) * ov2[base + i];
        }
        for (int i = 0; i < d; ++i) {
          gx[base + i] += static_cast<S>(
              ov2[base + i] * (static_cast<double>(g[base + i]) - dot));
        }
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> mean_axis(TapeT<S>& tape, const TensorT<S>& x, int axis) {
  const int nd = x.ndim();
  require(nd >= 1, ErrorCode::kInvalidArgument, "mean_axis: 0-d input");
  axis = norm_axis(axis, nd);
  const auto& s = x.shape();
  const std::size_t outer = prod(s, 0, static_cast<std::size_t>(axis));
  const std::size_t count = static_cast<std::size_t>(s[static_cast<std::size_t>(axis)]);
  const std::size_t inner = prod(s, static_cast<std::size_t>(axis) + 1, s.size());
  Shape out_shape;
  for (int i = 0; i < nd; ++i) {
    if (i != axis) out_shape.push_back(s[static_cast<std::size_t>(i)]);
  }
  if (out_shape.empty()) out_shape.push_back(1);
  auto out = make_result(tape, out_shape, x.requires_grad());
  const auto& xv = x.values();
  auto& ov = out.values();
  const S inv = S(1) / static_cast<S>(count);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      S acc = S(0);
      for (std::size_t c = 0; c < count; ++c) {
        acc += xv[(o * count + c) * inner + i];
      }
      ov[o * inner + i] = acc * inv;
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [x, out, outer, count, inner, inv]() {
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const auto& g = out.impl()->grad;
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) {
          const S gv = g[o * inner + i] * inv;
          for (std::size_t c = 0; c < count; ++c) {
            gx[(o * count + c) * inner + i] += gv;
          }
        }
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> concat(TapeT<S>& tape, const std::vector<TensorT<S>>& inputs, int axis) {
  require(!inputs.empty(), ErrorCode::kInvalidArgument, "concat: no inputs");
  const int nd = inputs.front().ndim();
  axis = norm_axis(axis, nd);
  Shape out_shape = inputs.front().shape();
  bool any_rg = inputs.front().requires_grad();
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    const auto& s = inputs[i].shape();
    require(static_cast<int>(s.size()) == nd, ErrorCode::kShapeMismatch,
            "concat: rank mismatch ", shape_str(out_shape), " vs ", shape_str(s));
    for (int d = 0; d < nd; ++d) {
      if (d == axis) continue;
      require(s[static_cast<std::size_t>(d)] == out_shape[static_cast<std::size_t>(d)],
              ErrorCode::kShapeMismatch, "concat: shape mismatch ",
              shape_str(inputs.front().shape()), " vs ", shape_str(s));
    }
    out_shape[static_cast<std::size_t>(axis)] += s[static_cast<std::size_t>(axis)];
    any_rg = any_rg || inputs[i].requires_grad();
  }
  const std::size_t outer = prod(out_shape, 0, static_cast<std::size_t>(axis));
  const std::size_t inner = prod(out_shape, static_cast<std::size_t>(axis) + 1,
                                 out_shape.size());
  auto out = make_result(tape, out_shape, any_rg);
  auto& ov = out.values();
  const std::size_t out_axis = static_cast<std::size_t>(out_shape[static_cast<std::size_t>(axis)]);
  std::size_t offset = 0;
  for (const auto& in : inputs) {
    const std::size_t len =
        static_cast<std::size_t>(in.shape()[static_cast<std::size_t>(axis)]);
    const auto& iv = in.values();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy(iv.begin() + static_cast<std::ptrdiff_t>(o * len * inner),
                iv.begin() + static_cast<std::ptrdiff_t>((o + 1) * len * inner),
                ov.begin() + static_cast<std::ptrdiff_t>((o * out_axis + offset) * inner));
    }
    offset += len;
  }
  if (out.requires_grad()) {
    tape.record(out, [inputs, out, outer, inner, out_axis, axis]() {
      const auto& g = out.impl()->grad;
      std::size_t off = 0;
      for (const auto& in : inputs) {
        const std::size_t len =
            static_cast<std::size_t>(in.shape()[static_cast<std::size_t>(axis)]);
        if (in.requires_grad()) {
          ensure_grad(in.impl());
          auto& gi = in.impl()->grad;
          for (std::size_t o = 0; o < outer; ++o) {
            const std::size_t src = (o * out_axis + off) * inner;
            const std::size_t dst = o * len * inner;
            for (std::size_t i = 0; i < len * inner; ++i) gi[dst + i] += g[src + i];
          }
        }
        off += len;
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> slice(TapeT<S>& tape, const TensorT<S>& x, int axis, int begin, int end) {
  const int nd = x.ndim();
  axis = norm_axis(axis, nd);
  const int len = x.shape()[static_cast<std::size_t>(axis)];
  require(begin >= 0 && begin < end && end <= len, ErrorCode::kInvalidArgument,
          "slice: bad range [", begin, ",", end, ") for axis length ", len);
  Shape out_shape = x.shape();
  out_shape[static_cast<std::size_t>(axis)] = end - begin;
  const std::size_t outer = prod(x.shape(), 0, static_cast<std::size_t>(axis));
  const std::size_t inner =
      prod(x.shape(), static_cast<std::size_t>(axis) + 1, x.shape().size());
  const std::size_t span = static_cast<std::size_t>(end - begin);
  auto out = make_result(tape, out_shape, x.requires_grad());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t src = (o * static_cast<std::size_t>(len) +
                             static_cast<std::size_t>(begin)) *
                            inner;
    std::copy(xv.begin() + static_cast<std::ptrdiff_t>(src),
              xv.begin() + static_cast<std::ptrdiff_t>(src + span * inner),
              ov.begin() + static_cast<std::ptrdiff_t>(o * span * inner));
  }
  if (out.requires_grad()) {
    tape.record(out, [x, out, outer, inner, span, len, begin]() {
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const auto& g = out.impl()->grad;
      for (std::size_t o = 0; o < outer; ++o) {
        const std::size_t dst = (o * static_cast<std::size_t>(len) +
                                 static_cast<std::size_t>(begin)) *
                                inner;
        const std::size_t src = o * span * inner;
        for (std::size_t i = 0; i < span * inner; ++i) gx[dst + i] += g[src + i];
      }
    });
  }
  return out;
}

namespace {

// out multi-index k corresponds to input axis perm[k].
template <typename S>
void permute_into(const std::vector<S>& src, const Shape& in_shape,
                  const std::vector<int>& perm, std::vector<S>& dst, bool add) {
  const int nd = static_cast<int>(in_shape.size());
  std::vector<std::size_t> in_strides(static_cast<std::size_t>(nd), 1);
  for (int i = nd - 2; i >= 0; --i) {
    in_strides[static_cast<std::size_t>(i)] =
        in_strides[static_cast<std::size_t>(i + 1)] *
        static_cast<std::size_t>(in_shape[static_cast<std::size_t>(i + 1)]);
  }
  Shape out_shape(static_cast<std::size_t>(nd));
  std::vector<std::size_t> out_strides_for_in(static_cast<std::size_t>(nd), 0);
  std::vector<std::size_t> out_strides(static_cast<std::size_t>(nd), 1);
  for (int k = 0; k < nd; ++k) {
    out_shape[static_cast<std::size_t>(k)] =
        in_shape[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
  }
  for (int k = nd - 2; k >= 0; --k) {
    out_strides[static_cast<std::size_t>(k)] =
        out_strides[static_cast<std::size_t>(k + 1)] *
        static_cast<std::size_t>(out_shape[static_cast<std::size_t>(k + 1)]);
  }
  for (int k = 0; k < nd; ++k) {
    out_strides_for_in[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] =
        out_strides[static_cast<std::size_t>(k)];
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(nd), 0);
  std::size_t out_off = 0;
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    if (add) {
      dst[out_off] += src[lin];
    } else {
      dst[out_off] = src[lin];
    }
    for (int d = nd - 1; d >= 0; --d) {
      idx[static_cast<std::size_t>(d)]++;
      out_off += out_strides_for_in[static_cast<std::size_t>(d)];
      if (idx[static_cast<std::size_t>(d)] <
          static_cast<std::size_t>(in_shape[static_cast<std::size_t>(d)])) {
        break;
      }
      out_off -= out_strides_for_in[static_cast<std::size_t>(d)] *
                 static_cast<std::size_t>(in_shape[static_cast<std::size_t>(d)]);
      idx[static_cast<std::size_t>(d)] = 0;
    }
  }
}

}  // namespace

template <typename S>
TensorT<S> transpose(TapeT<S>& tape, const TensorT<S>& x, const std::vector<int>& perm) {
  const int nd = x.ndim();
  require(static_cast<int>(perm.size()) == nd, ErrorCode::kInvalidArgument,
          "transpose: perm rank ", perm.size(), " vs tensor rank ", nd);
  std::vector<bool> seen(static_cast<std::size_t>(nd), false);
  for (int p : perm) {
    require(p >= 0 && p < nd && !seen[static_cast<std::size_t>(p)],
            ErrorCode::kInvalidArgument, "transpose: invalid permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }
  Shape out_shape(static_cast<std::size_t>(nd));
  for (int k = 0; k < nd; ++k) {
    out_shape[static_cast<std::size_t>(k)] =
        x.shape()[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
  }
  auto out = make_result(tape, out_shape, x.requires_grad());
  permute_into(x.values(), x.shape(), perm, out.values(), false);
  if (out.requires_grad()) {
    tape.record(out, [x, out, perm]() {
      ensure_grad(x.impl());
      // The gradient flows through the inverse permutation; reuse the same
      // mapping by scattering from the output-gradient into input order.
      const int nd2 = static_cast<int>(perm.size());
      std::vector<int> inv(static_cast<std::size_t>(nd2));
      for (int k = 0; k < nd2; ++k) {
        inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = k;
      }
      permute_into(out.impl()->grad, out.shape(), inv, x.impl()->grad, true);
    });
  }
  return out;
}

template <typename S>
TensorT<S> reshape(TapeT<S>& tape, const TensorT<S>& x, Shape new_shape) {
  require(shape_numel(new_shape) == x.size(), ErrorCode::kShapeMismatch,
          "reshape: ", shape_str(x.shape()), " -> ", shape_str(new_shape),
          " changes element count");
  auto out = make_result(tape, new_shape, x.requires_grad());
  out.values() = x.values();
  if (out.requires_grad()) {
    tape.record(out, [x, out]() {
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const auto& g = out.impl()->grad;
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    });
  }
  return out;
}

template <typename S>
TensorT<S> expand0(TapeT<S>& tape, const TensorT<S>& x, int count) {
  require(count > 0, ErrorCode::kInvalidArgument, "expand0: count must be > 0");
  Shape out_shape;
  out_shape.push_back(count);
  for (int d : x.shape()) out_shape.push_back(d);
  auto out = make_result(tape, out_shape, x.requires_grad());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (int c = 0; c < count; ++c) {
    std::copy(xv.begin(), xv.end(),
              ov.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(c) * xv.size()));
  }
  if (out.requires_grad()) {
    tape.record(out, [x, out, count]() {
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const auto& g = out.impl()->grad;
      const std::size_t n = gx.size();
      for (int c = 0; c < count; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * n;
        for (std::size_t i = 0; i < n; ++i) gx[i] += g[base + i];
      }
    });
  }
  return out;
}

template <typename S>
TensorT<S> sum_all(TapeT<S>& tape, const TensorT<S>& x) {
  auto out = make_result(tape, {1}, x.requires_grad());
  double acc = 0.0;
  for (const S v : x.values()) acc += static_cast<double>(v);
  out.values()[0] = static_cast<S>(acc);
  if (out.requires_grad()) {
    tape.record(out, [x, out]() {
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const S g = out.impl()->grad[0];
      for (auto& v : gx) v += g;
    });
  }
  return out;
}

template <typename S>
TensorT<S> l2_norm(TapeT<S>& tape, const TensorT<S>& x) {
  auto out = make_result(tape, {1}, x.requires_grad());
  double acc = 0.0;
  for (const S v : x.values()) acc += static_cast<double>(v) * static_cast<double>(v);
  const double norm = std::sqrt(acc);
  out.values()[0] = static_cast<S>(norm);
  if (out.requires_grad()) {
    tape.record(out, [x, out]() {
      const double norm2 = static_cast<double>(out.values()[0]);
      if (norm2 <= 0.0) return;  // subgradient 0 at the origin
      ensure_grad(x.impl());
      auto& gx = x.impl()->grad;
      const auto& xv = x.values();
      const double g = static_cast<double>(out.impl()->grad[0]);
      for (std::size_t i = 0; i < gx.size(); ++i) {
        gx[i] += static_cast<S>(g * static_cast<double>(xv[i]) / norm2);
      }
    });
  }
  return out;
}

#define CSSKIT_INSTANTIATE_OPS(S)                                                   \
  template TensorT<S> add<S>(TapeT<S>&, const TensorT<S>&, const TensorT<S>&);      \
  template TensorT<S> sub<S>(TapeT<S>&, const TensorT<S>&, const TensorT<S>&);      \
  template TensorT<S> mul<S>(TapeT<S>&, const TensorT<S>&, const TensorT<S>&);      \
  template TensorT<S> scale<S>(TapeT<S>&, const TensorT<S>&, S);                    \
  template TensorT<S> matmul<S>(TapeT<S>&, const TensorT<S>&, const TensorT<S>&);   \
  template TensorT<S> conv1d_depthwise<S>(TapeT<S>&, const TensorT<S>&,             \
                                          const TensorT<S>&, const TensorT<S>&);    \
  template TensorT<S> sigmoid<S>(TapeT<S>&, const TensorT<S>&);                     \
  template TensorT<S> swish<S>(TapeT<S>&, const TensorT<S>&);                       \
  template TensorT<S> relu<S>(TapeT<S>&, const TensorT<S>&);                        \
  template TensorT<S> layer_norm<S>(TapeT<S>&, const TensorT<S>&, const TensorT<S>&, \
                                    const TensorT<S>&, S);                          \
  template TensorT<S> softmax<S>(TapeT<S>&, const TensorT<S>&);                     \
  template TensorT<S> mean_axis<S>(TapeT<S>&, const TensorT<S>&, int);              \
  template TensorT<S> concat<S>(TapeT<S>&, const std::vector<TensorT<S>>&, int);    \
  template TensorT<S> slice<S>(TapeT<S>&, const TensorT<S>&, int, int, int);        \
  template TensorT<S> transpose<S>(TapeT<S>&, const TensorT<S>&,                    \
                                   const std::vector<int>&);                        \
  template TensorT<S> reshape<S>(TapeT<S>&, const TensorT<S>&, Shape);              \
  template TensorT<S> expand0<S>(TapeT<S>&, const TensorT<S>&, int);                \
  template TensorT<S> sum_all<S>(TapeT<S>&, const TensorT<S>&);                     \
  template TensorT<S> l2_norm<S>(TapeT<S>&, const TensorT<S>&);

CSSKIT_INSTANTIATE_OPS(float)
CSSKIT_INSTANTIATE_OPS(double)

#undef CSSKIT_INSTANTIATE_OPS

}  // namespace csskit::ops
