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

// Splits a timestamped token stream into utterances.
//
// One silence window governs every gap, between components and inside a
// multi-word argument alike. When the window elapses the legacy VUI throws
// the partial command away and treats later speech as a new command; the
// shim instead finalizes what it has heard. A configured completion word
// ("over") ends an utterance immediately in either mode.

#ifndef CMDSHIM_SEGMENTER_H_
#define CMDSHIM_SEGMENTER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cmdshim/result.h"
#include "cmdshim/text.h"

namespace cmdshim {

enum class SegmenterMode : uint8_t { kLegacy, kShim };

inline constexpr int64_t kLegacyWindowMs = 1500;
inline constexpr int64_t kShimWindowMs = 3000;

struct SegmenterConfig {
  SegmenterMode mode = SegmenterMode::kShim;
  int64_t window_ms = kShimWindowMs;
  Words terminator_phrases;
  // Legacy mode only. When set, a timed-out utterance that this predicate
  // accepts is finalized instead of discarded (the VUI heard a whole
  // command before the pause). Unset means every timeout discards.
  std::function<bool(std::span<const std::string>)> accepts_complete;

  static SegmenterConfig Legacy(int64_t window_ms = kLegacyWindowMs);
  static SegmenterConfig Shim(int64_t window_ms = kShimWindowMs);

  // window > 0 and every terminator is a single token.
  bool Valid() const;
};

struct TimedToken {
  std::string token;
  int64_t at_ms = 0;
  friend bool operator==(const TimedToken&, const TimedToken&) = default;
};

struct SegmentEvent {
  enum class Kind : uint8_t { kUtteranceComplete, kDiscarded };
  Kind kind;
  std::vector<TimedToken> tokens;

  Words words() const;
  friend bool operator==(const SegmentEvent&, const SegmentEvent&) = default;
};

struct SegmenterError {
  enum class Kind : uint8_t { kNonMonotonicTimestamp };
  Kind kind;
  int64_t at_ms;
  int64_t last_ms;
};

class Segmenter {
 public:
  explicit Segmenter(SegmenterConfig config);

  // Appends a token heard at `at_ms`. A gap longer than the window first
  // closes the pending utterance; a terminator closes it (terminator
  // excluded) right away.
  Result<std::vector<SegmentEvent>, SegmenterError> Push(std::string token,
                                                         int64_t at_ms);

  // Advances the clock. Closes the pending utterance when the silence since
  // the last token exceeds the window.
  std::vector<SegmentEvent> Tick(int64_t now_ms);

  const SegmenterConfig& config() const { return config_; }
  const std::vector<TimedToken>& pending() const { return pending_; }
  const std::vector<SegmentEvent>& log() const { return log_; }
  // Timestamp of the newest token, or INT64_MIN before any token.
  int64_t last_arrival_ms() const { return last_ms_; }

 private:
  bool IsTerminator(const std::string& token) const;
  void CloseOnTimeout(std::vector<SegmentEvent>* out);
  void Emit(SegmentEvent::Kind kind, std::vector<SegmentEvent>* out);

  SegmenterConfig config_;
  std::vector<TimedToken> pending_;
  int64_t last_ms_;
  std::vector<SegmentEvent> log_;
};

}  // namespace cmdshim

#endif  // CMDSHIM_SEGMENTER_H_
