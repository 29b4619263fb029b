/* Copyright 2026 The csskit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the continuous speech separation toolkit.
 *
 * A session collects a run-configuration path and per-command options, then
 * executes pipeline commands. All functions are synchronous. Every call
 * returns CSSKIT_OK or an error code; csskit_last_error() holds the message
 * of the most recent failure on the session.
 */

#ifndef CSSKIT_CSSKIT_H_
#define CSSKIT_CSSKIT_H_

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csskit_status {
  CSSKIT_OK = 0,
  CSSKIT_ERR_INVALID_ARGUMENT = 1,
  CSSKIT_ERR_SHAPE_MISMATCH = 2,
  CSSKIT_ERR_IO = 3,
  CSSKIT_ERR_FORMAT = 4,
  CSSKIT_ERR_CONFIG = 5,
  CSSKIT_ERR_STATE = 6,
  CSSKIT_ERR_INTERNAL = 7
} csskit_status;

typedef struct csskit_session csskit_session;

const char* csskit_version(void);

csskit_session* csskit_session_create(void);
void csskit_session_destroy(csskit_session* session);

/* Message of the most recent failure on this session; empty string if none.
 * The pointer stays valid until the next call on the session. */
const char* csskit_last_error(const csskit_session* session);

/* Path to the JSON run configuration. */
csskit_status csskit_set_config(csskit_session* session, const char* path);

/* Option keys: "seed", "stage" (1|2), "method" (masking|mvdr), "out",
 * "teacher", "student", "channels". Passing NULL or "" clears the option. */
csskit_status csskit_set_option(csskit_session* session, const char* key,
                                const char* value);

/* Commands: "simulate", "segment", "train", "separate", "eval". */
csskit_status csskit_run(csskit_session* session, const char* command);

#ifdef __cplusplus
}
#endif

#endif /* CSSKIT_CSSKIT_H_ */
