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

#ifndef CSSKIT_PARAMS_HPP_
#define CSSKIT_PARAMS_HPP_

#include <cstring>
#include <string>
#include <unordered_map>
#include <vector>

#include "csskit/tensor.hpp"

namespace csskit {

// Named trainable tensors in a deterministic (insertion) order.
template <typename S>
class ParamSetT {
 public:
  struct Item {
    std::string name;
    TensorT<S> tensor;
  };

  TensorT<S>& add(const std::string& name, TensorT<S> t) {
    require(!index_.count(name), ErrorCode::kInvalidArgument,
            "duplicate parameter name: ", name);
    t.set_requires_grad(true);
    index_[name] = items_.size();
    items_.push_back(Item{name, std::move(t)});
    return items_.back().tensor;
  }

  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  TensorT<S>& at(const std::string& name) {
    auto it = index_.find(name);
    require(it != index_.end(), ErrorCode::kInvalidArgument,
            "unknown parameter: ", name);
    return items_[it->second].tensor;
  }
  const TensorT<S>& at(const std::string& name) const {
    auto it = index_.find(name);
    require(it != index_.end(), ErrorCode::kInvalidArgument,
            "unknown parameter: ", name);
    return items_[it->second].tensor;
  }

  std::vector<Item>& items() { return items_; }
  const std::vector<Item>& items() const { return items_; }
  std::size_t count() const { return items_.size(); }

  std::size_t total_elements() const {
    std::size_t n = 0;
    for (const auto& it : items_) n += it.tensor.size();
    return n;
  }

  void zero_grad() {
    for (auto& it : items_) it.tensor.zero_grad();
  }

  // Deep copy; gradients are not copied.
  ParamSetT clone() const {
    ParamSetT out;
    for (const auto& it : items_) {
      out.add(it.name, TensorT<S>::from_data(it.tensor.shape(), it.tensor.values()));
    }
    return out;
  }

  void copy_values_from(const ParamSetT& other) {
    require(count() == other.count(), ErrorCode::kShapeMismatch,
            "copy_values_from: parameter count mismatch (", count(), " vs ",
            other.count(), ")");
    for (std::size_t i = 0; i < items_.size(); ++i) {
      require(items_[i].name == other.items_[i].name &&
                  items_[i].tensor.shape() == other.items_[i].tensor.shape(),
              ErrorCode::kShapeMismatch, "copy_values_from: parameter ",
              items_[i].name, " does not match");
      items_[i].tensor.values() = other.items_[i].tensor.values();
    }
  }

  // FNV-1a over names and raw value bytes; used to assert immutability.
  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* p, std::size_t n) {
      const auto* bytes = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
      }
    };
    for (const auto& it : items_) {
      mix(it.name.data(), it.name.size());
      mix(it.tensor.values().data(), it.tensor.values().size() * sizeof(S));
    }
    return h;
  }

 private:
  std::vector<Item> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

using ParamSet = ParamSetT<float>;

}  // namespace csskit

#endif  // CSSKIT_PARAMS_HPP_
