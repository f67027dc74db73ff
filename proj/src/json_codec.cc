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

#include "cmdshim/json_codec.h"

namespace cmdshim {
namespace {

using nlohmann::json;

json ArgJson(const std::optional<ArgValue>& arg) {
  if (!arg) return nullptr;
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Phrase>) {
          return Join(v.words);
        } else if constexpr (std::is_same_v<T, Number>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, Deictic>) {
          return "THAT";
        } else {
          return v.direction == Direction::kNext ? "NEXT WORD" : "PREVIOUS WORD";
        }
      },
      *arg);
}

json RangeJson(const std::optional<WordRange>& r) {
  if (!r) return nullptr;
  return json::array({r->begin, r->end});
}

json SuggestionsJson(const std::vector<Suggestion>& s) {
  json out = json::array();
  for (const Suggestion& x : s) out.push_back({{"text", x.text}, {"reason", x.reason}});
  return out;
}

json TraceJson(const RepairTrace& trace) {
  json out = json::array();
  for (const Repair& r : trace) {
    out.push_back({{"category", RepairCategoryName(r.category)}, {"tokens", r.tokens}});
  }
  return out;
}

}  // namespace

json ToJson(const PartialCommand& p) {
  return {{"op", OperationName(p.op)},
          {"cmd_arg", ArgJson(p.cmd_arg)},
          {"ctx", p.ctx ? json(ContextKeywordText(*p.ctx)) : json(nullptr)},
          {"ctx_arg", ArgJson(p.ctx_arg)},
          {"missing", p.missing == ComponentKind::kCmdArg ? "cmd_arg" : "ctx_arg"},
          {"question", p.question}};
}

json ToJson(const NormalizationResult& r) {
  json j = {{"kind", ResultKindName(r)}};
  if (const auto* c = std::get_if<Corrected>(&r)) {
    j["command"] = SerializeCanonical(c->command);
    j["confidence"] = c->confidence;
    j["repairs"] = TraceJson(c->trace);
  } else if (const auto* p = std::get_if<PassThrough>(&r)) {
    j["command"] = SerializeCanonical(p->command);
    j["confidence"] = 100;
  } else if (const auto* q = std::get_if<Clarify>(&r)) {
    j["question"] = q->question;
    j["partial"] = ToJson(q->partial);
  } else {
    j["suggestions"] = SuggestionsJson(std::get<Suggest>(r).suggestions);
  }
  return j;
}

json ToJson(const Outcome& o) {
  json j = {{"outcome", OutcomeKindName(o.kind)},
            {"buffer", o.buffer},
            {"selection", RangeJson(o.selection)}};
  if (o.reason) j["reason"] = FailureReasonName(*o.reason);
  if (!o.candidates.empty()) {
    json cands = json::array();
    for (size_t i = 0; i < o.candidates.size(); ++i) {
      cands.push_back({{"n", i + 1},
                       {"text", o.candidates[i]},
                       {"begin", o.candidate_ranges[i].begin},
                       {"end", o.candidate_ranges[i].end}});
    }
    j["candidates"] = std::move(cands);
  }
  return j;
}

json ToJson(const SessionEvent& e) {
  json j = {{"type", EventTypeName(e.type)}};
  switch (e.type) {
    case SessionEvent::Type::kListening:
      j["on"] = e.listening;
      break;
    case SessionEvent::Type::kTranscript:
      j["text"] = e.text;
      break;
    case SessionEvent::Type::kNormalized:
      j["result"] = ToJson(*e.normalized);
      break;
    case SessionEvent::Type::kRelayed:
      j["command"] = e.text;
      j["heard"] = Join(e.heard);
      break;
    case SessionEvent::Type::kVuiOutcome:
      j.update(ToJson(*e.outcome));
      break;
    case SessionEvent::Type::kClarificationAsked:
      j["question"] = e.text;
      break;
    case SessionEvent::Type::kSuggestionShown:
      j["suggestions"] = SuggestionsJson(e.suggestions);
      break;
  }
  return j;
}

std::optional<std::string> ApplySessionConfigJson(const json& config, SessionConfig* out) {
  if (!config.is_object()) return "config must be an object";
  for (const auto& [key, value] : config.items()) {
    if (key == "window_ms") {
      if (!value.is_number_integer() || value.get<int64_t>() <= 0) {
        return "window_ms must be a positive integer";
      }
      out->segmenter.window_ms = value.get<int64_t>();
    } else if (key == "terminators") {
      if (!value.is_array()) return "terminators must be an array of words";
      out->segmenter.terminator_phrases.clear();
      for (const auto& t : value) {
        if (!t.is_string()) return "terminators must be an array of words";
        out->segmenter.terminator_phrases.push_back(t.get<std::string>());
      }
    } else {
      return "unknown config key " + key;
    }
  }
  if (!out->segmenter.Valid()) return "invalid segmenter config";
  return std::nullopt;
}

std::string ToNdjson(const std::vector<SessionEvent>& events) {
  std::string out;
  for (const SessionEvent& e : events) {
    out += ToJson(e).dump();
    out += '\n';
  }
  return out;
}

}  // namespace cmdshim
