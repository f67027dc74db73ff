/* Copyright 2026 The cmdshim Authors.
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

/* C interface to libcmdshim.
 *
 * Every call returns a cmdshim_status. On failure, cmdshim_last_error()
 * describes it until the next call on the same thread. Strings returned
 * through char** out-parameters are heap allocated, NUL terminated, and
 * released with cmdshim_string_free. Handles are not thread safe unless
 * noted; a normalizer may be shared across threads.
 */

#ifndef CMDSHIM_CMDSHIM_H_
#define CMDSHIM_CMDSHIM_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define CMDSHIM_API __attribute__((visibility("default")))
#else
#define CMDSHIM_API
#endif

typedef enum cmdshim_status {
  CMDSHIM_OK = 0,
  CMDSHIM_INVALID_ARGUMENT = 1, /* bad handle, flag value or config JSON */
  CMDSHIM_PARSE_ERROR = 2,      /* input text or file contents malformed */
  CMDSHIM_IO_ERROR = 3,         /* file missing, unreadable or unwritable */
  CMDSHIM_INFEASIBLE = 4,       /* dataset spec cannot be satisfied */
  CMDSHIM_UNAVAILABLE = 5,      /* address already in use */
  CMDSHIM_INTERNAL = 6,
} cmdshim_status;

typedef enum cmdshim_result_kind {
  CMDSHIM_RESULT_PASS_THROUGH = 0,
  CMDSHIM_RESULT_CORRECTED = 1,
  CMDSHIM_RESULT_CLARIFY = 2,
  CMDSHIM_RESULT_SUGGEST = 3,
} cmdshim_result_kind;

typedef enum cmdshim_format {
  CMDSHIM_FORMAT_JSON = 0,
  CMDSHIM_FORMAT_TABLE = 1,
} cmdshim_format;

CMDSHIM_API const char* cmdshim_version(void);
CMDSHIM_API const char* cmdshim_status_string(cmdshim_status status);
CMDSHIM_API const char* cmdshim_last_error(void);
CMDSHIM_API void cmdshim_string_free(char* s);

/* Normalizer. backend is "rule" or "stub". lexicon_path may be NULL for
 * the built-in lexicon. threshold < 0 keeps the lexicon's own. */
typedef struct cmdshim_normalizer cmdshim_normalizer;

CMDSHIM_API cmdshim_status cmdshim_normalizer_new(const char* backend, const char* lexicon_path,
                                                  int threshold, cmdshim_normalizer** out);
CMDSHIM_API void cmdshim_normalizer_free(cmdshim_normalizer* n);

/* selection may be NULL or empty. history lists recent canonical commands,
 * most recent first. out_json receives the NormalizationResult. */
CMDSHIM_API cmdshim_status cmdshim_normalize(const cmdshim_normalizer* n, const char* utterance,
                                             const char* selection, const char* const* history,
                                             size_t history_len, cmdshim_result_kind* out_kind,
                                             char** out_json);

/* out_json receives {"command": <canonical>, "template": <name>}. A
 * non-canonical input returns CMDSHIM_PARSE_ERROR. */
CMDSHIM_API cmdshim_status cmdshim_parse_canonical(const char* text, char** out_json);

/* Session over the simulated VUI. normalizer may be NULL for the default
 * rule backend. config_json may be NULL or
 * {"window_ms": int, "terminators": [word, ...]}. corrections_path may be
 * NULL for the built-in correction list. */
typedef struct cmdshim_session cmdshim_session;

CMDSHIM_API cmdshim_status cmdshim_session_new(const cmdshim_normalizer* n,
                                               const char* initial_text, const char* config_json,
                                               const char* corrections_path,
                                               cmdshim_session** out);
CMDSHIM_API void cmdshim_session_free(cmdshim_session* s);
/* Each returns the emitted session events as a JSON array. */
CMDSHIM_API cmdshim_status cmdshim_session_utter(cmdshim_session* s, const char* utterance,
                                                 char** out_json);
CMDSHIM_API cmdshim_status cmdshim_session_push_token(cmdshim_session* s, const char* token,
                                                      int64_t at_ms, char** out_json);
CMDSHIM_API cmdshim_status cmdshim_session_tick(cmdshim_session* s, int64_t now_ms,
                                                char** out_json);
/* {"buffer", "selection", "history", "pending_question"}. */
CMDSHIM_API cmdshim_status cmdshim_session_state(const cmdshim_session* s, char** out_json);

/* Writes train/val/test.jsonl and manifest.json under out_dir. spec_json may
 * be NULL or override "seed", "train", "val", "test". out_manifest may be
 * NULL. */
CMDSHIM_API cmdshim_status cmdshim_generate_dataset(const char* spec_json, const char* out_dir,
                                                    char** out_manifest);

/* Scores a normalizer against a JSONL dataset file. */
CMDSHIM_API cmdshim_status cmdshim_evaluate(const cmdshim_normalizer* n, const char* data_path,
                                            cmdshim_format format, char** out);

/* Replays a JSONL utterance corpus through the legacy and shimmed
 * pipelines. config_json may be NULL or set "seed", "jitter_min_ms",
 * "jitter_max_ms", "legacy_window_ms", "shim_window_ms". */
CMDSHIM_API cmdshim_status cmdshim_replay(const cmdshim_normalizer* n, const char* corpus_path,
                                          const char* config_json, cmdshim_format format,
                                          char** out);

/* WebSocket gateway. Port 0 picks a free port. config_json as for
 * cmdshim_session_new. Stop may be called from any thread. */
typedef struct cmdshim_gateway cmdshim_gateway;

CMDSHIM_API cmdshim_status cmdshim_gateway_start(const cmdshim_normalizer* n, const char* address,
                                                 uint16_t port, const char* config_json,
                                                 const char* corrections_path,
                                                 cmdshim_gateway** out);
CMDSHIM_API uint16_t cmdshim_gateway_port(const cmdshim_gateway* g);
CMDSHIM_API void cmdshim_gateway_wait(cmdshim_gateway* g);
CMDSHIM_API void cmdshim_gateway_stop(cmdshim_gateway* g);
CMDSHIM_API void cmdshim_gateway_free(cmdshim_gateway* g);

#ifdef __cplusplus
}
#endif

#endif /* CMDSHIM_CMDSHIM_H_ */
