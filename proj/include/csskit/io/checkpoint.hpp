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

#ifndef CSSKIT_IO_CHECKPOINT_HPP_
#define CSSKIT_IO_CHECKPOINT_HPP_

#include <string>

#include "csskit/net.hpp"
#include "csskit/optim.hpp"

namespace csskit {

// On-disk model format: an 8-byte magic, a version integer, a JSON header
// (net config, tensor directory, optional optimizer directory) and raw
// little-endian tensor payloads. Raw bytes round-trip bit-exactly.
void save_checkpoint(const std::string& path, const MaskNet& net,
                     const Adam* optimizer = nullptr);

MaskNet load_checkpoint(const std::string& path, Adam* optimizer = nullptr);

// Fails with a field/shape diff report when the stored model does not match
// the expected architecture.
void check_net_config(const NetConfig& expected, const NetConfig& actual);

}  // namespace csskit

#endif  // CSSKIT_IO_CHECKPOINT_HPP_
