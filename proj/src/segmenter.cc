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

#include "cmdshim/segmenter.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cmdshim {

SegmenterConfig SegmenterConfig::Legacy(int64_t window_ms) {
  SegmenterConfig c;
  c.mode = SegmenterMode::kLegacy;
  c.window_ms = window_ms;
  return c;
}

SegmenterConfig SegmenterConfig::Shim(int64_t window_ms) {
  SegmenterConfig c;
  c.mode = SegmenterMode::kShim;
  c.window_ms = window_ms;
  return c;
}

bool SegmenterConfig::Valid() const {
  if (window_ms <= 0) return false;
  return std::all_of(
      terminator_phrases.begin(), terminator_phrases.end(),
      [](const std::string& t) { return SplitWords(t).size() == 1; });
}

Words SegmentEvent::words() const {
  Words out;
  out.reserve(tokens.size());
  for (const TimedToken& t : tokens) out.push_back(t.token);
  return out;
}

Segmenter::Segmenter(SegmenterConfig config)
    : config_(std::move(config)),
      last_ms_(std::numeric_limits<int64_t>::min()) {
  if (!config_.Valid()) throw std::invalid_argument("invalid segmenter config");
  for (std::string& t : config_.terminator_phrases) t = NormalizeWord(t);
}

bool Segmenter::IsTerminator(const std::string& token) const {
  const std::string norm = NormalizeWord(token);
  return std::find(config_.terminator_phrases.begin(),
                   config_.terminator_phrases.end(),
                   norm) != config_.terminator_phrases.end();
}

void Segmenter::Emit(SegmentEvent::Kind kind, std::vector<SegmentEvent>* out) {
  SegmentEvent ev{kind, std::move(pending_)};
  pending_.clear();
  log_.push_back(ev);
  out->push_back(std::move(ev));
}

void Segmenter::CloseOnTimeout(std::vector<SegmentEvent>* out) {
  if (pending_.empty()) return;
  auto kind = SegmentEvent::Kind::kUtteranceComplete;
  if (config_.mode == SegmenterMode::kLegacy) {
    Words heard;
    for (const TimedToken& t : pending_) heard.push_back(t.token);
    bool complete = config_.accepts_complete && config_.accepts_complete(heard);
    if (!complete) kind = SegmentEvent::Kind::kDiscarded;
  }
  Emit(kind, out);
}

Result<std::vector<SegmentEvent>, SegmenterError> Segmenter::Push(
    std::string token, int64_t at_ms) {
  if (at_ms < last_ms_) {
    return SegmenterError{SegmenterError::Kind::kNonMonotonicTimestamp, at_ms,
                          last_ms_};
  }
  std::vector<SegmentEvent> events;
  if (!pending_.empty() && at_ms - last_ms_ > config_.window_ms) {
    CloseOnTimeout(&events);
  }
  last_ms_ = at_ms;
  if (IsTerminator(token)) {
    if (!pending_.empty()) {
      Emit(SegmentEvent::Kind::kUtteranceComplete, &events);
    }
    return events;
  }
  pending_.push_back(TimedToken{std::move(token), at_ms});
  return events;
}

std::vector<SegmentEvent> Segmenter::Tick(int64_t now_ms) {
  std::vector<SegmentEvent> events;
  if (!pending_.empty() && now_ms > last_ms_ &&
      now_ms - last_ms_ > config_.window_ms) {
    CloseOnTimeout(&events);
  }
  return events;
}

}  // namespace cmdshim
