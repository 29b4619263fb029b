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

#ifndef CSSKIT_TAPE_HPP_
#define CSSKIT_TAPE_HPP_

#include <functional>
#include <unordered_set>
#include <vector>

#include "csskit/tensor.hpp"

namespace csskit {

// Define-by-run gradient tape. A tape is built per training step, owned by a
// single thread, and consumed by exactly one backward() call. Ops executed
// against a non-recording tape behave as plain forward evaluation.
template <typename S>
class TapeT {
 public:
  explicit TapeT(bool recording = true) : recording_(recording) {}

  TapeT(const TapeT&) = delete;
  TapeT& operator=(const TapeT&) = delete;

  bool recording() const { return recording_; }

  // Called by ops: registers the backward closure for one primitive. The
  // closure reads output.grad and accumulates into the inputs' grads.
  void record(const TensorT<S>& output, std::function<void()> backward_fn) {
    if (!recording_) return;
    outputs_.insert(output.impl());
    nodes_.push_back(Node{output.impl_ptr(), std::move(backward_fn)});
  }

  bool owns(const TensorT<S>& t) const { return outputs_.count(t.impl()) > 0; }

  // Reverse sweep from a scalar loss. Populates grad buffers of every
  // requires_grad tensor reachable from the loss; each node is visited once.
  void backward(const TensorT<S>& loss) {
    require(!consumed_, ErrorCode::kState,
            "backward() called twice on the same tape");
    require(loss.size() == 1, ErrorCode::kInvalidArgument,
            "backward() needs a scalar loss, got shape ", shape_str(loss.shape()));
    require(owns(loss), ErrorCode::kState,
            "backward(): loss is detached from this tape");
    consumed_ = true;
    loss.impl()->grad.assign(1, S(1));
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      if (!it->output->grad.empty()) it->backward();
    }
  }

  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    std::shared_ptr<detail::TensorImpl<S>> output;
    std::function<void()> backward;
  };

  bool recording_;
  bool consumed_ = false;
  std::vector<Node> nodes_;
  std::unordered_set<const detail::TensorImpl<S>*> outputs_;
};

using Tape = TapeT<float>;
using Tape64 = TapeT<double>;

}  // namespace csskit

#endif  // CSSKIT_TAPE_HPP_
