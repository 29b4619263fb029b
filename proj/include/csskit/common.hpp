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

#ifndef CSSKIT_COMMON_HPP_
#define CSSKIT_COMMON_HPP_

#include <sstream>
#include <stdexcept>
#include <string>

namespace csskit {

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kIo,
  kFormat,
  kConfig,
  kState,
  kInternal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {
inline void append_all(std::ostringstream&) {}
template <typename T, typename... Rest>
void append_all(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  append_all(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string str_cat(const Args&... args) {
  std::ostringstream os;
  detail::append_all(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void raise(ErrorCode code, const Args&... args) {
  throw Error(code, str_cat(args...));
}

template <typename... Args>
void require(bool cond, ErrorCode code, const Args&... args) {
  if (!cond) raise(code, args...);
}

}  // namespace csskit

#endif  // CSSKIT_COMMON_HPP_
