// Copyright 2026 The cmdshim Authors.
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

#include "cmdshim/cmdshim.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "cmdshim/dataset.h"
#include "cmdshim/eval.h"
#include "cmdshim/gateway.h"
#include "cmdshim/json_codec.h"
#include "cmdshim/normalizer.h"
#include "cmdshim/session.h"
#include "cmdshim/version.h"

struct cmdshim_normalizer {
  std::shared_ptr<const cmdshim::NormalizerBackend> backend;
};

struct cmdshim_session {
  std::unique_ptr<cmdshim::Session> session;
};

struct cmdshim_gateway {
  std::unique_ptr<cmdshim::Gateway> gateway;
};

namespace {

using cmdshim::Result;
using json = nlohmann::json;

thread_local std::string last_error;

// Carries a status out of helpers that would otherwise need Result<void>.
struct Failure {
  cmdshim_status status;
  std::string message;
};

cmdshim_status Fail(cmdshim_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

cmdshim_status Fail(const Failure& f) { return Fail(f.status, f.message); }

cmdshim_status Ok() {
  last_error.clear();
  return CMDSHIM_OK;
}

char* CopyOut(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cmdshim_status Emit(const std::string& s, char** out) {
  if (out) *out = CopyOut(s);
  return Ok();
}

// Runs `body`, mapping stray exceptions to CMDSHIM_INTERNAL.
template <typename F>
cmdshim_status Guard(F&& body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    return Fail(CMDSHIM_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return Fail(CMDSHIM_INTERNAL, e.what());
  }
}

Result<json, Failure> ParseConfig(const char* config_json) {
  if (!config_json || !*config_json) return json::object();
  json j = json::parse(config_json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return Failure{CMDSHIM_INVALID_ARGUMENT, "config must be a JSON object"};
  }
  return j;
}

Result<cmdshim::CorrectionLexicon, Failure> Corrections(const char* path) {
  if (!path || !*path) return cmdshim::DefaultCorrectionLexicon();
  try {
    return cmdshim::LoadCorrectionLexicon(path);
  } catch (const std::exception& e) {
    return Failure{CMDSHIM_IO_ERROR, e.what()};
  }
}

Result<cmdshim::SessionConfig, Failure> SessionConfigFrom(const char* config_json) {
  auto j = ParseConfig(config_json);
  if (!j.ok()) return j.error();
  cmdshim::SessionConfig config;
  if (auto err = cmdshim::ApplySessionConfigJson(*j, &config)) {
    return Failure{CMDSHIM_INVALID_ARGUMENT, *err};
  }
  return config;
}

std::shared_ptr<const cmdshim::NormalizerBackend> BackendOf(const cmdshim_normalizer* n) {
  if (n) return n->backend;
  return std::make_shared<cmdshim::RuleBackend>();
}

cmdshim_status EmitEvents(const std::vector<cmdshim::SessionEvent>& events, char** out) {
  json arr = json::array();
  for (const auto& e : events) arr.push_back(cmdshim::ToJson(e));
  return Emit(arr.dump(), out);
}

cmdshim_status FromDatasetError(const cmdshim::DatasetError& e) {
  switch (e.kind) {
    case cmdshim::DatasetError::Kind::kInfeasibleSpec:
      return Fail(CMDSHIM_INFEASIBLE, e.ToString());
    case cmdshim::DatasetError::Kind::kIo:
      return Fail(CMDSHIM_IO_ERROR, e.ToString());
    case cmdshim::DatasetError::Kind::kMalformed:
      return Fail(CMDSHIM_PARSE_ERROR, e.ToString());
  }
  return Fail(CMDSHIM_INTERNAL, e.ToString());
}

// Reads a non-negative integer field into *out when present.
template <typename T>
std::optional<std::string> ReadCount(const json& j, const char* key, T* out) {
  auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  if (!it->is_number_unsigned()) return std::string(key) + " must be a non-negative integer";
  *out = it->get<T>();
  return std::nullopt;
}

std::optional<std::string> CheckKeys(const json& j, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok |= key == a;
    if (!ok) return "unknown config key " + key;
  }
  return std::nullopt;
}

}  // namespace

extern "C" {

const char* cmdshim_version(void) { return cmdshim::Version().data(); }

const char* cmdshim_status_string(cmdshim_status status) {
  switch (status) {
    case CMDSHIM_OK:
      return "ok";
    case CMDSHIM_INVALID_ARGUMENT:
      return "invalid argument";
    case CMDSHIM_PARSE_ERROR:
      return "parse error";
    case CMDSHIM_IO_ERROR:
      return "i/o error";
    case CMDSHIM_INFEASIBLE:
      return "infeasible";
    case CMDSHIM_UNAVAILABLE:
      return "unavailable";
    case CMDSHIM_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* cmdshim_last_error(void) { return last_error.c_str(); }

void cmdshim_string_free(char* s) { std::free(s); }

cmdshim_status cmdshim_normalizer_new(const char* backend, const char* lexicon_path,
                                      int threshold, cmdshim_normalizer** out) {
  return Guard([&] {
    if (!out) return Fail(CMDSHIM_INVALID_ARGUMENT, "out is null");
    *out = nullptr;
    cmdshim::Lexicon lexicon = cmdshim::Lexicon::Default();
    if (lexicon_path && *lexicon_path) {
      auto loaded = cmdshim::Lexicon::Load(lexicon_path);
      if (!loaded.ok()) {
        const bool unreadable = loaded.error().rfind("cannot read", 0) == 0;
        return Fail(unreadable ? CMDSHIM_IO_ERROR : CMDSHIM_PARSE_ERROR, loaded.error());
      }
      lexicon = std::move(*loaded);
    }
    if (threshold >= 0) {
      if (threshold > 100) return Fail(CMDSHIM_INVALID_ARGUMENT, "threshold must be 0..100");
      lexicon.threshold = threshold;
    }
    const std::string name = backend && *backend ? backend : "rule";
    std::shared_ptr<const cmdshim::NormalizerBackend> b =
        cmdshim::MakeBackend(name, std::move(lexicon));
    if (!b) return Fail(CMDSHIM_INVALID_ARGUMENT, "unknown backend " + name);
    *out = new cmdshim_normalizer{std::move(b)};
    return Ok();
  });
}

void cmdshim_normalizer_free(cmdshim_normalizer* n) { delete n; }

cmdshim_status cmdshim_normalize(const cmdshim_normalizer* n, const char* utterance,
                                 const char* selection, const char* const* history,
                                 size_t history_len, cmdshim_result_kind* out_kind,
                                 char** out_json) {
  return Guard([&] {
    if (!n || !utterance) return Fail(CMDSHIM_INVALID_ARGUMENT, "normalizer and utterance required");
    if (history_len > 0 && !history) return Fail(CMDSHIM_INVALID_ARGUMENT, "history is null");
    cmdshim::NormalizeRequest req;
    req.utterance = cmdshim::TokenizeUtterance(utterance);
    if (req.utterance.empty()) return Fail(CMDSHIM_INVALID_ARGUMENT, "utterance has no words");
    if (selection) req.ctx.selected = cmdshim::TokenizeUtterance(selection);
    for (size_t i = 0; i < history_len; ++i) {
      if (history[i]) req.history.emplace_back(history[i]);
    }
    const cmdshim::NormalizationResult r = n->backend->Normalize(req);
    if (out_kind) {
      *out_kind = static_cast<cmdshim_result_kind>(
          std::visit(
              [](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, cmdshim::PassThrough>) {
                  return CMDSHIM_RESULT_PASS_THROUGH;
                } else if constexpr (std::is_same_v<T, cmdshim::Corrected>) {
                  return CMDSHIM_RESULT_CORRECTED;
                } else if constexpr (std::is_same_v<T, cmdshim::Clarify>) {
                  return CMDSHIM_RESULT_CLARIFY;
                } else {
                  return CMDSHIM_RESULT_SUGGEST;
                }
              },
              r));
    }
    return Emit(cmdshim::ToJson(r).dump(), out_json);
  });
}

cmdshim_status cmdshim_parse_canonical(const char* text, char** out_json) {
  return Guard([&] {
    if (!text) return Fail(CMDSHIM_INVALID_ARGUMENT, "text is null");
    auto parsed = cmdshim::ParseCanonical(std::string_view(text));
    if (!parsed.ok()) return Fail(CMDSHIM_PARSE_ERROR, parsed.error().ToString());
    json j = {{"command", cmdshim::SerializeCanonical(*parsed)},
              {"template", cmdshim::TemplateName(cmdshim::TemplateOf(*parsed))}};
    return Emit(j.dump(), out_json);
  });
}

cmdshim_status cmdshim_session_new(const cmdshim_normalizer* n, const char* initial_text,
                                   const char* config_json, const char* corrections_path,
                                   cmdshim_session** out) {
  return Guard([&] {
    if (!out) return Fail(CMDSHIM_INVALID_ARGUMENT, "out is null");
    *out = nullptr;
    auto config = SessionConfigFrom(config_json);
    if (!config.ok()) return Fail(config.error());
    auto corrections = Corrections(corrections_path);
    if (!corrections.ok()) return Fail(corrections.error());
    auto session = std::make_unique<cmdshim::Session>(initial_text ? initial_text : "",
                                                      std::move(*corrections),
                                                      std::move(*config), BackendOf(n));
    *out = new cmdshim_session{std::move(session)};
    return Ok();
  });
}

void cmdshim_session_free(cmdshim_session* s) { delete s; }

cmdshim_status cmdshim_session_utter(cmdshim_session* s, const char* utterance, char** out_json) {
  return Guard([&] {
    if (!s || !utterance) return Fail(CMDSHIM_INVALID_ARGUMENT, "session and utterance required");
    return EmitEvents(s->session->Utter(utterance), out_json);
  });
}

cmdshim_status cmdshim_session_push_token(cmdshim_session* s, const char* token, int64_t at_ms,
                                          char** out_json) {
  return Guard([&] {
    if (!s || !token) return Fail(CMDSHIM_INVALID_ARGUMENT, "session and token required");
    return EmitEvents(s->session->PushToken(token, at_ms), out_json);
  });
}

cmdshim_status cmdshim_session_tick(cmdshim_session* s, int64_t now_ms, char** out_json) {
  return Guard([&] {
    if (!s) return Fail(CMDSHIM_INVALID_ARGUMENT, "session is null");
    return EmitEvents(s->session->Tick(now_ms), out_json);
  });
}

cmdshim_status cmdshim_session_state(const cmdshim_session* s, char** out_json) {
  return Guard([&] {
    if (!s) return Fail(CMDSHIM_INVALID_ARGUMENT, "session is null");
    const cmdshim::Session& session = *s->session;
    json j;
    j["buffer"] = session.sim().buffer_text();
    const auto& sel = session.sim().selection();
    j["selection"] = sel ? json::array({sel->begin, sel->end}) : json(nullptr);
    j["history"] = session.history();
    const auto& pending = session.pending_clarification();
    j["pending_question"] = pending ? json(pending->question) : json(nullptr);
    return Emit(j.dump(), out_json);
  });
}

cmdshim_status cmdshim_generate_dataset(const char* spec_json, const char* out_dir,
                                        char** out_manifest) {
  return Guard([&] {
    if (!out_dir || !*out_dir) return Fail(CMDSHIM_INVALID_ARGUMENT, "out_dir required");
    auto j = ParseConfig(spec_json);
    if (!j.ok()) return Fail(j.error());
    cmdshim::DistributionSpec spec = cmdshim::DistributionSpec::Default();
    for (auto err : {CheckKeys(*j, {"seed", "train", "val", "test"}),
                     ReadCount(*j, "seed", &spec.seed), ReadCount(*j, "train", &spec.train),
                     ReadCount(*j, "val", &spec.val), ReadCount(*j, "test", &spec.test)}) {
      if (err) return Fail(CMDSHIM_INVALID_ARGUMENT, *err);
    }
    auto data = cmdshim::Generate(spec);
    if (!data.ok()) return FromDatasetError(data.error());
    if (auto err = cmdshim::WriteDataset(out_dir, spec, *data)) return FromDatasetError(*err);
    return Emit(cmdshim::ManifestJson(spec, *data).dump(2), out_manifest);
  });
}

cmdshim_status cmdshim_evaluate(const cmdshim_normalizer* n, const char* data_path,
                                cmdshim_format format, char** out) {
  return Guard([&] {
    if (!n || !data_path) return Fail(CMDSHIM_INVALID_ARGUMENT, "normalizer and data required");
    auto samples = cmdshim::ReadJsonl(data_path);
    if (!samples.ok()) return FromDatasetError(samples.error());
    auto report = cmdshim::Evaluate(*n->backend, *samples);
    return Emit(format == CMDSHIM_FORMAT_TABLE ? report.ToTable() : report.ToJson().dump(2), out);
  });
}

cmdshim_status cmdshim_replay(const cmdshim_normalizer* n, const char* corpus_path,
                              const char* config_json, cmdshim_format format, char** out) {
  return Guard([&] {
    if (!corpus_path) return Fail(CMDSHIM_INVALID_ARGUMENT, "corpus path required");
    auto j = ParseConfig(config_json);
    if (!j.ok()) return Fail(j.error());
    cmdshim::ReplayConfig config;
    uint64_t jmin = config.jitter_min_ms, jmax = config.jitter_max_ms;
    uint64_t legacy = config.legacy.window_ms, shim = config.shim.window_ms;
    for (auto err : {CheckKeys(*j, {"seed", "jitter_min_ms", "jitter_max_ms",
                                    "legacy_window_ms", "shim_window_ms"}),
                     ReadCount(*j, "seed", &config.seed), ReadCount(*j, "jitter_min_ms", &jmin),
                     ReadCount(*j, "jitter_max_ms", &jmax),
                     ReadCount(*j, "legacy_window_ms", &legacy),
                     ReadCount(*j, "shim_window_ms", &shim)}) {
      if (err) return Fail(CMDSHIM_INVALID_ARGUMENT, *err);
    }
    if (legacy == 0 || shim == 0) return Fail(CMDSHIM_INVALID_ARGUMENT, "windows must be > 0");
    config.jitter_min_ms = static_cast<int64_t>(jmin);
    config.jitter_max_ms = static_cast<int64_t>(jmax);
    config.legacy = cmdshim::LegacyVuiSegmenterConfig(static_cast<int64_t>(legacy));
    config.shim = cmdshim::SegmenterConfig::Shim(static_cast<int64_t>(shim));
    config.backend = BackendOf(n);
    auto corpus = cmdshim::LoadReplayCorpus(corpus_path);
    if (!corpus.ok()) {
      const bool unreadable = corpus.error().rfind("cannot read", 0) == 0;
      return Fail(unreadable ? CMDSHIM_IO_ERROR : CMDSHIM_PARSE_ERROR, corpus.error());
    }
    if (corpus->empty()) return Fail(CMDSHIM_PARSE_ERROR, "replay corpus is empty");
    auto report = cmdshim::ReplayCompare(*corpus, config);
    return Emit(format == CMDSHIM_FORMAT_TABLE ? report.ToTable() : report.ToJson().dump(2), out);
  });
}

cmdshim_status cmdshim_gateway_start(const cmdshim_normalizer* n, const char* address,
                                     uint16_t port, const char* config_json,
                                     const char* corrections_path, cmdshim_gateway** out) {
  return Guard([&] {
    if (!out) return Fail(CMDSHIM_INVALID_ARGUMENT, "out is null");
    *out = nullptr;
    cmdshim::GatewayOptions options;
    if (address && *address) options.address = address;
    options.port = port;
    options.backend = BackendOf(n);
    auto config = SessionConfigFrom(config_json);
    if (!config.ok()) return Fail(config.error());
    options.session = std::move(*config);
    auto corrections = Corrections(corrections_path);
    if (!corrections.ok()) return Fail(corrections.error());
    options.corrections = std::move(*corrections);
    auto started = cmdshim::Gateway::Start(std::move(options));
    if (!started.ok()) {
      const bool bad_address = started.error().rfind("bad address", 0) == 0;
      return Fail(bad_address ? CMDSHIM_INVALID_ARGUMENT : CMDSHIM_UNAVAILABLE, started.error());
    }
    *out = new cmdshim_gateway{std::move(*started)};
    return Ok();
  });
}

uint16_t cmdshim_gateway_port(const cmdshim_gateway* g) { return g ? g->gateway->port() : 0; }

void cmdshim_gateway_wait(cmdshim_gateway* g) {
  if (g) g->gateway->Wait();
}

void cmdshim_gateway_stop(cmdshim_gateway* g) {
  if (g) g->gateway->Stop();
}

void cmdshim_gateway_free(cmdshim_gateway* g) { delete g; }

}  // extern "C"
