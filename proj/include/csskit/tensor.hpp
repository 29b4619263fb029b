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

#ifndef CSSKIT_TENSOR_HPP_
#define CSSKIT_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "csskit/common.hpp"

namespace csskit {

using Shape = std::vector<int>;

inline std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    require(d > 0, ErrorCode::kInvalidArgument, "shape dimensions must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

inline std::string shape_str(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  s += ")";
  return s;
}

namespace detail {

template <typename S>
struct TensorImpl {
  Shape shape;
  std::vector<S> data;
  bool requires_grad = false;
  std::vector<S> grad;  // empty until backward touches this tensor
};

}  // namespace detail

// Dense row-major real tensor with an optional gradient buffer. Copies are
// shallow; two copies of the same tensor share storage and identity for
// autodiff purposes.
template <typename S>
class TensorT {
 public:
  using Scalar = S;

  TensorT() = default;

  static TensorT zeros(Shape shape) {
    TensorT t;
    const std::size_t n = shape_numel(shape);
    t.impl_ = std::make_shared<detail::TensorImpl<S>>();
    t.impl_->shape = std::move(shape);
    t.impl_->data.assign(n, S(0));
    return t;
  }

  static TensorT full(Shape shape, S value) {
    TensorT t = zeros(std::move(shape));
    for (auto& v : t.impl_->data) v = value;
    return t;
  }

  static TensorT from_data(Shape shape, std::vector<S> data) {
    const std::size_t n = shape_numel(shape);
    require(n == data.size(), ErrorCode::kShapeMismatch, "from_data: shape ",
            shape_str(shape), " implies ", n, " elements, got ", data.size());
    TensorT t;
    t.impl_ = std::make_shared<detail::TensorImpl<S>>();
    t.impl_->shape = std::move(shape);
    t.impl_->data = std::move(data);
    return t;
  }

  static TensorT scalar(S value) { return from_data({1}, {value}); }

  bool defined() const { return impl_ != nullptr; }

  const Shape& shape() const { return impl_->shape; }
  int ndim() const { return static_cast<int>(impl_->shape.size()); }
  int dim(int i) const {
    const int nd = ndim();
    if (i < 0) i += nd;
    require(i >= 0 && i < nd, ErrorCode::kInvalidArgument, "dim index out of range");
    return impl_->shape[static_cast<std::size_t>(i)];
  }
  std::size_t size() const { return impl_->data.size(); }

  std::vector<S>& values() { return impl_->data; }
  const std::vector<S>& values() const { return impl_->data; }
  S item() const {
    require(size() == 1, ErrorCode::kInvalidArgument,
            "item(): tensor is not scalar, shape ", shape_str(shape()));
    return impl_->data[0];
  }

  bool requires_grad() const { return impl_->requires_grad; }
  TensorT& set_requires_grad(bool v) {
    impl_->requires_grad = v;
    if (!v) impl_->grad.clear();
    return *this;
  }

  bool has_grad() const { return !impl_->grad.empty(); }
  std::vector<S>& grad() {
    require(has_grad(), ErrorCode::kState, "tensor has no gradient buffer");
    return impl_->grad;
  }
  const std::vector<S>& grad() const {
    require(has_grad(), ErrorCode::kState, "tensor has no gradient buffer");
    return impl_->grad;
  }
  void zero_grad() {
    if (has_grad()) impl_->grad.assign(size(), S(0));
  }
  void alloc_grad() {
    if (!has_grad()) impl_->grad.assign(size(), S(0));
  }
  void drop_grad() { impl_->grad.clear(); }

  // Deep copy; the result shares nothing with this tensor.
  TensorT clone() const {
    TensorT t = from_data(impl_->shape, impl_->data);
    t.impl_->requires_grad = impl_->requires_grad;
    return t;
  }

  // Same values, no grad tracking; used to treat a value as a constant.
  TensorT detached() const {
    TensorT t = from_data(impl_->shape, impl_->data);
    return t;
  }

  detail::TensorImpl<S>* impl() const { return impl_.get(); }
  std::shared_ptr<detail::TensorImpl<S>> impl_ptr() const { return impl_; }

 private:
  std::shared_ptr<detail::TensorImpl<S>> impl_;
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

}  // namespace csskit

#endif  // CSSKIT_TENSOR_HPP_
