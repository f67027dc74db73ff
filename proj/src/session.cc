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

#include "cmdshim/session.h"

#include <stdexcept>

namespace cmdshim {
namespace {

SessionEvent Listening(bool on) {
  SessionEvent e{SessionEvent::Type::kListening};
  e.listening = on;
  return e;
}

}  // namespace

std::string_view EventTypeName(SessionEvent::Type t) {
  switch (t) {
    case SessionEvent::Type::kListening:
      return "listening";
    case SessionEvent::Type::kTranscript:
      return "transcript";
    case SessionEvent::Type::kNormalized:
      return "normalized";
    case SessionEvent::Type::kRelayed:
      return "relayed";
    case SessionEvent::Type::kVuiOutcome:
      return "vui_outcome";
    case SessionEvent::Type::kClarificationAsked:
      return "clarification_asked";
    case SessionEvent::Type::kSuggestionShown:
      return "suggestion_shown";
  }
  return "?";
}

Words IdentityTransport::Deliver(const std::string& canonical) {
  return SplitWords(canonical);
}

FaultyTransport::FaultyTransport(double rate, uint64_t seed) : rate_(rate), rng_(seed) {}

Words FaultyTransport::Deliver(const std::string& canonical) {
  Words words = SplitWords(canonical);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng_) >= rate_) return words;
  // Only lowercase words are argument words; keywords are uppercase.
  std::vector<size_t> args;
  for (size_t i = 0; i < words.size(); ++i) {
    if (words[i] != ToUpper(words[i])) args.push_back(i);
  }
  if (args.empty()) return words;
  std::string& w = words[args[rng_() % args.size()]];
  w = w.size() > 1 ? w.substr(0, w.size() - 1) : w + w;
  return words;
}

Session::Session(std::string_view initial_text, CorrectionLexicon lexicon,
                 SessionConfig config,
                 std::shared_ptr<const NormalizerBackend> backend,
                 std::shared_ptr<Transport> transport)
    : sim_(SimState::Init(initial_text, std::move(lexicon))),
      config_(std::move(config)),
      segmenter_(config_.segmenter),
      backend_(backend ? std::move(backend) : std::make_shared<RuleBackend>()),
      transport_(transport ? std::move(transport)
                           : std::make_shared<IdentityTransport>()) {}

std::vector<SessionEvent> Session::Utter(std::string_view utterance) {
  Words words = TokenizeUtterance(utterance);
  if (words.empty()) throw std::invalid_argument("empty utterance");
  std::vector<SessionEvent> events;
  events.push_back(Listening(true));
  SessionEvent transcript{SessionEvent::Type::kTranscript};
  transcript.text = Join(SplitWords(utterance));
  events.push_back(std::move(transcript));

  NormalizationResult result =
      pending_clarification_
          ? backend_->ApplyClarification(*pending_clarification_, words)
          : backend_->Normalize(NormalizeRequest{words, cache_, history_});
  pending_clarification_.reset();

  SessionEvent normalized{SessionEvent::Type::kNormalized};
  normalized.normalized = result;
  events.push_back(std::move(normalized));

  if (auto cmd = RelayableCommand(result)) {
    SessionEvent relayed{SessionEvent::Type::kRelayed};
    relayed.text = SerializeCanonical(*cmd);
    relayed.heard = transport_->Deliver(relayed.text);
    Outcome outcome = sim_.Execute(Join(relayed.heard));
    if (!outcome.failed()) {
      history_.insert(history_.begin(), relayed.text);
      if (history_.size() > kHistorySize) history_.resize(kHistorySize);
    }
    cache_.selected = sim_.selected_words();
    events.push_back(std::move(relayed));
    SessionEvent vui{SessionEvent::Type::kVuiOutcome};
    vui.outcome = std::move(outcome);
    events.push_back(std::move(vui));
  } else if (const auto* clarify = std::get_if<Clarify>(&result)) {
    pending_clarification_ = clarify->partial;
    SessionEvent ask{SessionEvent::Type::kClarificationAsked};
    ask.text = clarify->question;
    events.push_back(std::move(ask));
  } else {
    SessionEvent shown{SessionEvent::Type::kSuggestionShown};
    shown.suggestions = std::get<Suggest>(result).suggestions;
    events.push_back(std::move(shown));
  }
  events.push_back(Listening(false));
  return events;
}

std::vector<SessionEvent> Session::HandleSegments(const std::vector<SegmentEvent>& segs) {
  std::vector<SessionEvent> events;
  for (const SegmentEvent& s : segs) {
    if (s.kind != SegmentEvent::Kind::kUtteranceComplete) continue;
    std::string text = Join(s.words());
    if (TokenizeUtterance(text).empty()) continue;
    auto batch = Utter(text);
    events.insert(events.end(), batch.begin(), batch.end());
  }
  return events;
}

std::vector<SessionEvent> Session::PushToken(std::string token, int64_t at_ms) {
  auto segs = segmenter_.Push(std::move(token), at_ms);
  if (!segs.ok()) throw std::invalid_argument("token timestamps must not decrease");
  return HandleSegments(*segs);
}

std::vector<SessionEvent> Session::Tick(int64_t now_ms) {
  return HandleSegments(segmenter_.Tick(now_ms));
}

}  // namespace cmdshim
