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

#ifndef CSSKIT_WAVE_HPP_
#define CSSKIT_WAVE_HPP_

#include <cstddef>
#include <vector>

#include "csskit/common.hpp"

namespace csskit {

// Time-domain audio, one sample vector per channel, all equal length.
struct MultichannelWaveform {
  int sample_rate = 16000;
  std::vector<std::vector<double>> channels;

  MultichannelWaveform() = default;
  MultichannelWaveform(int rate, int num_channels, std::size_t num_samples)
      : sample_rate(rate),
        channels(static_cast<std::size_t>(num_channels),
                 std::vector<double>(num_samples, 0.0)) {}

  int num_channels() const { return static_cast<int>(channels.size()); }

  std::size_t num_samples() const {
    return channels.empty() ? 0 : channels.front().size();
  }

  double duration_sec() const {
    return static_cast<double>(num_samples()) / sample_rate;
  }

  void validate() const {
    require(!channels.empty(), ErrorCode::kInvalidArgument, "waveform has no channels");
    const std::size_t len = channels.front().size();
    require(len > 0, ErrorCode::kInvalidArgument, "waveform has no samples");
    for (std::size_t c = 1; c < channels.size(); ++c) {
      require(channels[c].size() == len, ErrorCode::kInvalidArgument,
              "channel length mismatch: channel 0 has ", len, " samples, channel ",
              c, " has ", channels[c].size());
    }
  }
};

inline void add_into(std::vector<double>& dst, const std::vector<double>& src,
                     std::size_t offset = 0) {
  require(offset + src.size() <= dst.size(), ErrorCode::kInvalidArgument,
          "add_into: source does not fit (", offset, "+", src.size(), " > ",
          dst.size(), ")");
  for (std::size_t i = 0; i < src.size(); ++i) dst[offset + i] += src[i];
}

inline void add_into(MultichannelWaveform& dst, const MultichannelWaveform& src,
                     std::size_t offset = 0) {
  require(dst.num_channels() == src.num_channels(), ErrorCode::kInvalidArgument,
          "add_into: channel count mismatch (", dst.num_channels(), " vs ",
          src.num_channels(), ")");
  for (int c = 0; c < dst.num_channels(); ++c) {
    add_into(dst.channels[static_cast<std::size_t>(c)],
             src.channels[static_cast<std::size_t>(c)], offset);
  }
}

}  // namespace csskit

#endif  // CSSKIT_WAVE_HPP_
