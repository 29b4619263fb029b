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

#ifndef CSSKIT_THREADING_HPP_
#define CSSKIT_THREADING_HPP_

#include <functional>

namespace csskit {

// Worker cap: CSSKIT_THREADS if set, else any programmatic cap, else
// hardware concurrency (>= 1).
int worker_count();

// Programmatic cap (e.g. from a run config); the environment variable wins.
void set_worker_cap(int cap);

// Runs fn(i) for i in [0, n). Work items must be independent; results keyed
// by index stay deterministic regardless of the worker count. Exceptions from
// workers are rethrown on the calling thread.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace csskit

#endif  // CSSKIT_THREADING_HPP_
