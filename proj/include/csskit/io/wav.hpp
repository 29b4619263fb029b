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

#ifndef CSSKIT_IO_WAV_HPP_
#define CSSKIT_IO_WAV_HPP_

#include <string>

#include "csskit/wave.hpp"

namespace csskit {

enum class WavFormat { kPcm16, kFloat32 };

// RIFF/WAVE reader: PCM16 or IEEE float32, any channel count. PCM16 samples
// map to [-1, 1) via division by 32768; float32 is lossless.
MultichannelWaveform wav_read(const std::string& path);

void wav_write(const std::string& path, const MultichannelWaveform& wave,
               WavFormat format = WavFormat::kFloat32);

}  // namespace csskit

#endif  // CSSKIT_IO_WAV_HPP_
