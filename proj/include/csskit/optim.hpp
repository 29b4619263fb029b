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

#ifndef CSSKIT_OPTIM_HPP_
#define CSSKIT_OPTIM_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "csskit/params.hpp"

namespace csskit {

// step 0 returns base_lr unchanged; decay is applied per optimizer step.
inline double lr_schedule(std::int64_t step, double base_lr, double decay) {
  require(step >= 0, ErrorCode::kInvalidArgument, "lr_schedule: step must be >= 0");
  return base_lr * std::pow(decay, static_cast<double>(step));
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with decoupled weight decay. Moment state is kept in double and keyed
// by parameter name so it survives checkpoint round-trips.
template <typename S>
class AdamT {
 public:
  struct Slot {
    std::vector<double> m;
    std::vector<double> v;
  };

  explicit AdamT(AdamConfig cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return step_; }
  void set_step_count(std::int64_t s) { step_ = s; }

  std::unordered_map<std::string, Slot>& slots() { return slots_; }
  const std::unordered_map<std::string, Slot>& slots() const { return slots_; }

  void step(ParamSetT<S>& params, double lr, double weight_decay) {
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (auto& item : params.items()) {
      require(item.tensor.has_grad(), ErrorCode::kState,
              "adam_step: parameter ", item.name, " has no gradient");
      auto& slot = slots_[item.name];
      if (slot.m.empty()) {
        slot.m.assign(item.tensor.size(), 0.0);
        slot.v.assign(item.tensor.size(), 0.0);
      }
      auto& values = item.tensor.values();
      const auto& grad = item.tensor.grad();
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double g = static_cast<double>(grad[i]);
        slot.m[i] = cfg_.beta1 * slot.m[i] + (1.0 - cfg_.beta1) * g;
        slot.v[i] = cfg_.beta2 * slot.v[i] + (1.0 - cfg_.beta2) * g * g;
        const double mhat = slot.m[i] / bc1;
        const double vhat = slot.v[i] / bc2;
        double p = static_cast<double>(values[i]);
        p -= lr * weight_decay * p;
        p -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        values[i] = static_cast<S>(p);
      }
    }
  }

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  std::unordered_map<std::string, Slot> slots_;
};

using Adam = AdamT<float>;

}  // namespace csskit

#endif  // CSSKIT_OPTIM_HPP_
