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

#ifndef CSSKIT_PIPELINE_HPP_
#define CSSKIT_PIPELINE_HPP_

#include <optional>
#include <string>

#include "csskit/io/run_config.hpp"
#include "csskit/trainer.hpp"

namespace csskit::pipeline {

// Command options: the run config plus the flag overrides every subcommand
// accepts. Each subcommand is a pure function of config + inputs.
struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> stage;
  std::optional<std::string> method;  // masking | mvdr
  std::string out_dir;
  std::string teacher_path;
  std::string student_path;
  std::optional<int> channels;
};

void run_simulate(const Options& opt);
void run_segment(const Options& opt);
void run_train(const Options& opt);
void run_separate(const Options& opt);
void run_eval(const Options& opt);

// Shared helpers (also used by tests and the acceptance suite).

// Procedural two-speaker scene for sample `index` of a dataset.
Scene dataset_scene(const SimulateRunConfig& sim, std::uint64_t seed, int index);

// Deterministic conversation plan from the longform settings.
LongformPlan make_longform_plan(const SimulateRunConfig& sim, std::uint64_t seed);

// Procedural dataset backed by render_scene; samples render on demand.
SimDataset procedural_dataset(const SimulateRunConfig& sim, const ArrayGeometry& geom,
                              std::uint64_t seed, int count, int sample_rate,
                              int index_offset = 0);

// Dataset loaded from a simulate manifest (directory with manifest.json).
SimDataset manifest_dataset(const std::string& manifest_path);

}  // namespace csskit::pipeline

#endif  // CSSKIT_PIPELINE_HPP_
