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

// One shimmed editing session: utterance -> normalizer -> transport ->
// simulated VUI, with the selection cache, a five-command history and a
// single pending clarification.
//
// Event order per utterance:
//   listening(on), transcript, normalized,
//   then relayed + vui_outcome | clarification_asked | suggestion_shown,
//   listening(off).

#ifndef CMDSHIM_SESSION_H_
#define CMDSHIM_SESSION_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cmdshim/normalizer.h"
#include "cmdshim/segmenter.h"
#include "cmdshim/vui_sim.h"

namespace cmdshim {

inline constexpr size_t kHistorySize = 5;

// What the legacy VUI hears when the shim speaks a command.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Words Deliver(const std::string& canonical) = 0;
};

class IdentityTransport : public Transport {
 public:
  Words Deliver(const std::string& canonical) override;
};

// Mishears one argument word with probability `rate` per delivery by
// truncating it, standing in for re-recognition errors on the relay.
class FaultyTransport : public Transport {
 public:
  FaultyTransport(double rate, uint64_t seed);
  Words Deliver(const std::string& canonical) override;

 private:
  double rate_;
  std::mt19937_64 rng_;
};

struct SessionEvent {
  enum class Type : uint8_t {
    kListening,
    kTranscript,
    kNormalized,
    kRelayed,
    kVuiOutcome,
    kClarificationAsked,
    kSuggestionShown,
  };
  SessionEvent() = default;
  explicit SessionEvent(Type t) : type(t) {}

  Type type = Type::kListening;
  bool listening = false;
  std::string text;  // transcript, relayed command, or question
  Words heard;       // relayed: what the VUI received
  std::optional<NormalizationResult> normalized;
  std::optional<Outcome> outcome;
  std::vector<Suggestion> suggestions;

  bool terminal() const {
    return type == Type::kVuiOutcome || type == Type::kClarificationAsked ||
           type == Type::kSuggestionShown;
  }
};

std::string_view EventTypeName(SessionEvent::Type t);

struct SessionConfig {
  SegmenterConfig segmenter = SegmenterConfig::Shim();
};

class Session {
 public:
  Session(std::string_view initial_text, CorrectionLexicon lexicon = {},
          SessionConfig config = {},
          std::shared_ptr<const NormalizerBackend> backend = nullptr,
          std::shared_ptr<Transport> transport = nullptr);

  // Handles one complete utterance. Throws std::invalid_argument when the
  // utterance has no words.
  std::vector<SessionEvent> Utter(std::string_view utterance);

  // Streaming input through the session's segmenter; completed utterances
  // are handled as by Utter.
  std::vector<SessionEvent> PushToken(std::string token, int64_t at_ms);
  std::vector<SessionEvent> Tick(int64_t now_ms);

  // Most recent first, at most kHistorySize entries.
  const std::vector<std::string>& history() const { return history_; }
  const SelectionContext& cache() const { return cache_; }
  const SimState& sim() const { return sim_; }
  const std::optional<PartialCommand>& pending_clarification() const {
    return pending_clarification_;
  }
  const SessionConfig& config() const { return config_; }

 private:
  std::vector<SessionEvent> HandleSegments(const std::vector<SegmentEvent>& segs);

  SimState sim_;
  SessionConfig config_;
  Segmenter segmenter_;
  std::shared_ptr<const NormalizerBackend> backend_;
  std::shared_ptr<Transport> transport_;
  SelectionContext cache_;
  std::vector<std::string> history_;
  std::optional<PartialCommand> pending_clarification_;
};

}  // namespace cmdshim

#endif  // CMDSHIM_SESSION_H_
