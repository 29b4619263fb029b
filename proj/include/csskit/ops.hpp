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

#ifndef CSSKIT_OPS_HPP_
#define CSSKIT_OPS_HPP_

#include <vector>

#include "csskit/tape.hpp"
#include "csskit/tensor.hpp"

// Differentiable tensor primitives. Every op evaluates eagerly and, when the
// tape is recording and any input requires a gradient, registers its backward
// closure. Shape errors report both shapes.
namespace csskit::ops {

// Elementwise sum. b may match a's shape exactly or be a trailing-shape
// broadcast (bias add).
template <typename S>
TensorT<S> add(TapeT<S>& tape, const TensorT<S>& a, const TensorT<S>& b);

template <typename S>
TensorT<S> sub(TapeT<S>& tape, const TensorT<S>& a, const TensorT<S>& b);

// Elementwise product, same shapes.
template <typename S>
TensorT<S> mul(TapeT<S>& tape, const TensorT<S>& a, const TensorT<S>& b);

// Multiplication by a plain constant.
template <typename S>
TensorT<S> scale(TapeT<S>& tape, const TensorT<S>& a, S c);

// a: (..., m, k); b: (k, n) shared across leading dims, or (..., k, n) with
// identical leading dims.
template <typename S>
TensorT<S> matmul(TapeT<S>& tape, const TensorT<S>& a, const TensorT<S>& b);

// Depthwise temporal convolution. x: (..., frames, dim); weight: (dim, kernel)
// with odd kernel; bias: (dim). Zero padding keeps the frame count.
template <typename S>
TensorT<S> conv1d_depthwise(TapeT<S>& tape, const TensorT<S>& x,
                            const TensorT<S>& weight, const TensorT<S>& bias);

template <typename S>
TensorT<S> sigmoid(TapeT<S>& tape, const TensorT<S>& x);

template <typename S>
TensorT<S> swish(TapeT<S>& tape, const TensorT<S>& x);

template <typename S>
TensorT<S> relu(TapeT<S>& tape, const TensorT<S>& x);

// Normalization over the last axis with learned gain and bias (both 1-D of
// that axis length).
template <typename S>
TensorT<S> layer_norm(TapeT<S>& tape, const TensorT<S>& x, const TensorT<S>& gain,
                      const TensorT<S>& bias, S eps = S(1e-5));

// Softmax over the last axis.
template <typename S>
TensorT<S> softmax(TapeT<S>& tape, const TensorT<S>& x);

template <typename S>
TensorT<S> mean_axis(TapeT<S>& tape, const TensorT<S>& x, int axis);

template <typename S>
TensorT<S> concat(TapeT<S>& tape, const std::vector<TensorT<S>>& inputs, int axis);

// Copy of the range [begin, end) along an axis.
template <typename S>
TensorT<S> slice(TapeT<S>& tape, const TensorT<S>& x, int axis, int begin, int end);

template <typename S>
TensorT<S> transpose(TapeT<S>& tape, const TensorT<S>& x, const std::vector<int>& perm);

template <typename S>
TensorT<S> reshape(TapeT<S>& tape, const TensorT<S>& x, Shape new_shape);

// Replicates x along a new leading axis.
template <typename S>
TensorT<S> expand0(TapeT<S>& tape, const TensorT<S>& x, int count);

template <typename S>
TensorT<S> sum_all(TapeT<S>& tape, const TensorT<S>& x);

// Euclidean norm of all elements as a scalar; the gradient at the origin is
// taken as zero.
template <typename S>
TensorT<S> l2_norm(TapeT<S>& tape, const TensorT<S>& x);

}  // namespace csskit::ops

#endif  // CSSKIT_OPS_HPP_
