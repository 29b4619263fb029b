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

#include <charconv>
#include <string>

#include "csskit/pipeline.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

csskit_status map_code(csskit::ErrorCode code) {
  switch (code) {
    case csskit::ErrorCode::kInvalidArgument: return CSSKIT_ERR_INVALID_ARGUMENT;
    case csskit::ErrorCode::kShapeMismatch: return CSSKIT_ERR_SHAPE_MISMATCH;
    case csskit::ErrorCode::kIo: return CSSKIT_ERR_IO;
    case csskit::ErrorCode::kFormat: return CSSKIT_ERR_FORMAT;
    case csskit::ErrorCode::kConfig: return CSSKIT_ERR_CONFIG;
    case csskit::ErrorCode::kState: return CSSKIT_ERR_STATE;
    case csskit::ErrorCode::kInternal: return CSSKIT_ERR_INTERNAL;
  }
  return CSSKIT_ERR_INTERNAL;
}

bool parse_int64(const std::string& text, std::int64_t& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

}  // namespace

struct csskit_session {
  csskit::pipeline::Options options;
  std::string last_error;

  csskit_status fail(csskit_status status, std::string message) {
    last_error = std::move(message);
    return status;
  }

  template <typename Fn>
  csskit_status guard(Fn&& fn) {
    try {
      fn();
      last_error.clear();
      return CSSKIT_OK;
    } catch (const csskit::Error& e) {
      return fail(map_code(e.code()), e.what());
    } catch (const std::exception& e) {
      return fail(CSSKIT_ERR_INTERNAL, e.what());
    } catch (...) {
      return fail(CSSKIT_ERR_INTERNAL, "unknown error");
    }
  }
};

extern "C" {

const char* csskit_version(void) { return kVersion; }

csskit_session* csskit_session_create(void) { return new (std::nothrow) csskit_session; }

void csskit_session_destroy(csskit_session* session) { delete session; }

const char* csskit_last_error(const csskit_session* session) {
  return session == nullptr ? "null session" : session->last_error.c_str();
}

csskit_status csskit_set_config(csskit_session* session, const char* path) {
  if (session == nullptr) return CSSKIT_ERR_INVALID_ARGUMENT;
  session->options.config_path = path == nullptr ? "" : path;
  session->last_error.clear();
  return CSSKIT_OK;
}

csskit_status csskit_set_option(csskit_session* session, const char* key,
                                const char* value) {
  if (session == nullptr || key == nullptr) return CSSKIT_ERR_INVALID_ARGUMENT;
  const std::string k = key;
  const std::string v = value == nullptr ? "" : value;
  auto& opt = session->options;
  return session->guard([&]() {
    if (k == "seed") {
      if (v.empty()) {
        opt.seed.reset();
      } else {
        std::int64_t parsed = 0;
        csskit::require(parse_int64(v, parsed) && parsed >= 0,
                        csskit::ErrorCode::kInvalidArgument,
                        "seed: expected a non-negative integer, got '", v, "'");
        opt.seed = static_cast<std::uint64_t>(parsed);
      }
    } else if (k == "stage") {
      if (v.empty()) {
        opt.stage.reset();
      } else {
        std::int64_t parsed = 0;
        csskit::require(parse_int64(v, parsed) && (parsed == 1 || parsed == 2),
                        csskit::ErrorCode::kInvalidArgument,
                        "stage: must be 1 or 2, got '", v, "'");
        opt.stage = static_cast<int>(parsed);
      }
    } else if (k == "method") {
      if (v.empty()) {
        opt.method.reset();
      } else {
        csskit::require(v == "masking" || v == "mvdr",
                        csskit::ErrorCode::kInvalidArgument,
                        "method: must be 'masking' or 'mvdr', got '", v, "'");
        opt.method = v;
      }
    } else if (k == "out") {
      opt.out_dir = v;
    } else if (k == "teacher") {
      opt.teacher_path = v;
    } else if (k == "student") {
      opt.student_path = v;
    } else if (k == "channels") {
      if (v.empty()) {
        opt.channels.reset();
      } else {
        std::int64_t parsed = 0;
        csskit::require(parse_int64(v, parsed) && parsed >= 1,
                        csskit::ErrorCode::kInvalidArgument,
                        "channels: expected a positive integer, got '", v, "'");
        opt.channels = static_cast<int>(parsed);
      }
    } else {
      csskit::raise(csskit::ErrorCode::kInvalidArgument, "unknown option: ", k);
    }
  });
}

csskit_status csskit_run(csskit_session* session, const char* command) {
  if (session == nullptr || command == nullptr) return CSSKIT_ERR_INVALID_ARGUMENT;
  const std::string cmd = command;
  return session->guard([&]() {
    if (cmd == "simulate") {
      csskit::pipeline::run_simulate(session->options);
    } else if (cmd == "segment") {
      csskit::pipeline::run_segment(session->options);
    } else if (cmd == "train") {
      csskit::pipeline::run_train(session->options);
    } else if (cmd == "separate") {
      csskit::pipeline::run_separate(session->options);
    } else if (cmd == "eval") {
      csskit::pipeline::run_eval(session->options);
    } else {
      csskit::raise(csskit::ErrorCode::kInvalidArgument, "unknown command: ", cmd);
    }
  });
}

}  // extern "C"
