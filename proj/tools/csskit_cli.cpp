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

// Command-line front end. Talks to the toolkit exclusively through the C API
// in csskit/csskit.h.

#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "csskit/csskit.h"

namespace {

struct SessionDeleter {
  void operator()(csskit_session* s) const { csskit_session_destroy(s); }
};

// One machine-readable error line on stderr: newlines collapsed.
void print_error(const csskit_session* session, csskit_status status) {
  std::string msg = csskit_last_error(session);
  for (auto& c : msg) {
    if (c == '\n') c = ';';
  }
  std::fprintf(stderr, "error: status=%d %s\n", static_cast<int>(status), msg.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous speech separation toolkit"};
  app.set_version_flag("--version", csskit_version());
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::string teacher;
  std::string student;
  std::string method;
  long long seed = -1;
  int stage = 0;
  int channels = 0;

  const char* commands[] = {"simulate", "segment", "train", "separate", "eval"};
  const char* descriptions[] = {
      "render simulated mixtures or a long-form session",
      "segment long-form audio from a diarization annotation",
      "run stage-1 or stage-2 training",
      "separate a long-form recording into two streams",
      "score separation quality",
  };
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], descriptions[i]);
    sub->add_option("--config", config, "run configuration (json)")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--teacher", teacher, "teacher model checkpoint");
    sub->add_option("--student", student, "student/model checkpoint");
    sub->add_option("--channels", channels, "run on a channel subset of this size");
    if (std::string(commands[i]) == "train") {
      sub->add_option("--stage", stage, "training stage (1 or 2)");
    }
    if (std::string(commands[i]) == "separate" || std::string(commands[i]) == "eval") {
      sub->add_option("--method", method, "output method: masking or mvdr");
    }
  }

  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<csskit_session, SessionDeleter> session(csskit_session_create());
  if (!session) {
    std::fprintf(stderr, "error: status=%d out of memory\n", CSSKIT_ERR_INTERNAL);
    return CSSKIT_ERR_INTERNAL;
  }

  auto set = [&](const char* key, const std::string& value) {
    if (value.empty()) return static_cast<csskit_status>(CSSKIT_OK);
    return csskit_set_option(session.get(), key, value.c_str());
  };

  csskit_status status = csskit_set_config(session.get(), config.c_str());
  if (status == CSSKIT_OK && seed >= 0) {
    status = set("seed", std::to_string(seed));
  }
  if (status == CSSKIT_OK && stage > 0) status = set("stage", std::to_string(stage));
  if (status == CSSKIT_OK && channels > 0) {
    status = set("channels", std::to_string(channels));
  }
  if (status == CSSKIT_OK) status = set("method", method);
  if (status == CSSKIT_OK) status = set("out", out_dir);
  if (status == CSSKIT_OK) status = set("teacher", teacher);
  if (status == CSSKIT_OK) status = set("student", student);
  if (status != CSSKIT_OK) {
    print_error(session.get(), status);
    return static_cast<int>(status);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  status = csskit_run(session.get(), command.c_str());
  if (status != CSSKIT_OK) {
    print_error(session.get(), status);
    return static_cast<int>(status);
  }
  return 0;
}
