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

#include "csskit/csskit.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::current_path() / "capi_test_tmp" / name;
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& body) {
  const fs::path path = dir / "config.json";
  std::ofstream out(path);
  out << body;
  return path.string();
}

struct Session {
  csskit_session* s = csskit_session_create();
  ~Session() { csskit_session_destroy(s); }
};

}  // namespace

TEST_CASE("version and session lifecycle") {
  CHECK(std::string(csskit_version()).find('.') != std::string::npos);
  Session session;
  REQUIRE(session.s != nullptr);
  CHECK(std::string(csskit_last_error(session.s)).empty());
}

TEST_CASE("option validation through the C surface") {
  Session session;
  CHECK(csskit_set_option(session.s, "seed", "12") == CSSKIT_OK);
  CHECK(csskit_set_option(session.s, "seed", "banana") ==
        CSSKIT_ERR_INVALID_ARGUMENT);
  CHECK(std::string(csskit_last_error(session.s)).find("seed") != std::string::npos);
  CHECK(csskit_set_option(session.s, "stage", "3") == CSSKIT_ERR_INVALID_ARGUMENT);
  CHECK(csskit_set_option(session.s, "method", "magic") ==
        CSSKIT_ERR_INVALID_ARGUMENT);
  CHECK(csskit_set_option(session.s, "nope", "1") == CSSKIT_ERR_INVALID_ARGUMENT);
  CHECK(csskit_run(session.s, "fly") == CSSKIT_ERR_INVALID_ARGUMENT);
  CHECK(csskit_run(nullptr, "train") == CSSKIT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("missing config is a config error") {
  Session session;
  const csskit_status status = csskit_run(session.s, "simulate");
  CHECK(status == CSSKIT_ERR_CONFIG);
  CHECK(std::string(csskit_last_error(session.s)).find("--config") !=
        std::string::npos);
}

TEST_CASE("simulate runs end to end through the C API") {
  const fs::path dir = temp_dir("simulate");
  const std::string config = write_config(dir, R"({
    "seed": 7,
    "simulate": {"kind": "dataset", "num_samples": 2, "duration_sec": 0.3}
  })");

  Session session;
  REQUIRE(csskit_set_config(session.s, config.c_str()) == CSSKIT_OK);
  REQUIRE(csskit_set_option(session.s, "out", (dir / "out").string().c_str()) ==
          CSSKIT_OK);
  const csskit_status status = csskit_run(session.s, "simulate");
  INFO(csskit_last_error(session.s));
  REQUIRE(status == CSSKIT_OK);
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  CHECK(fs::exists(dir / "out" / "sample_00000_mix.wav"));
  CHECK(fs::exists(dir / "out" / "sample_00001_src1.wav"));
}

TEST_CASE("train stage 2 without a teacher names the missing field") {
  const fs::path dir = temp_dir("train_missing_teacher");
  const std::string config = write_config(dir, R"({
    "seed": 7,
    "train": {"stage": 2}
  })");

  Session session;
  REQUIRE(csskit_set_config(session.s, config.c_str()) == CSSKIT_OK);
  REQUIRE(csskit_set_option(session.s, "out", (dir / "out").string().c_str()) ==
          CSSKIT_OK);
  const csskit_status status = csskit_run(session.s, "train");
  CHECK(status == CSSKIT_ERR_CONFIG);
  const std::string msg = csskit_last_error(session.s);
  CHECK(msg.find("teacher") != std::string::npos);
}

TEST_CASE("config errors surface verbatim") {
  const fs::path dir = temp_dir("bad_config");
  const std::string config = write_config(dir, R"({"surprise": 1})");
  Session session;
  REQUIRE(csskit_set_config(session.s, config.c_str()) == CSSKIT_OK);
  csskit_set_option(session.s, "out", (dir / "out").string().c_str());
  CHECK(csskit_run(session.s, "simulate") == CSSKIT_ERR_CONFIG);
  CHECK(std::string(csskit_last_error(session.s)).find("surprise") !=
        std::string::npos);
}
