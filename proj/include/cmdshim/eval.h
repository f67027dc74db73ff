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

// Scoring normalizer backends against dataset samples, and replaying an
// utterance corpus against the bare legacy VUI and the shimmed pipeline.

#ifndef CMDSHIM_EVAL_H_
#define CMDSHIM_EVAL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmdshim/dataset.h"
#include "cmdshim/normalizer.h"
#include "cmdshim/segmenter.h"
#include "cmdshim/vui_sim.h"
#include "json.hpp"

namespace cmdshim {

// Token sequences equal after case folding and whitespace collapsing.
bool ExactMatch(std::string_view pred, std::string_view gold);

// Token-level LCS F-score (beta = 1), case-folded. 0 when either side is
// empty.
double RougeL(std::string_view pred, std::string_view gold);

// What a backend answers for one sample: the final canonical command,
// "ASK: <question>", or "" for suggestions. Two-turn samples apply the
// recorded answer to the backend's clarification.
struct SamplePrediction {
  std::string text;
  // Two-turn samples only: whether the backend asked the recorded question.
  std::optional<bool> question_matched;
  std::string error;  // set when the backend threw
};
SamplePrediction PredictSample(const NormalizerBackend& backend, const DatasetSample& s);

struct AccuracyCell {
  size_t n = 0;
  size_t exact = 0;
  double rouge_sum = 0;
  double accuracy() const { return n ? static_cast<double>(exact) / n : 0.0; }
  double rouge() const { return n ? rouge_sum / n : 0.0; }
};

struct EvalFailure {
  size_t index;
  std::string input;
  std::string predicted;
  std::string gold;
  std::string category;
};

struct EvalReport {
  std::string backend;
  size_t n = 0;
  double exact_match = 0;
  double rouge_l = 0;
  // Two-turn clarification samples: how many asked the recorded question.
  size_t question_checks = 0;
  size_t questions_matched = 0;
  std::map<std::string, AccuracyCell> per_op;
  std::map<std::string, AccuracyCell> per_category;
  std::vector<EvalFailure> failures;

  nlohmann::ordered_json ToJson() const;
  std::string ToTable() const;
};

EvalReport Evaluate(const NormalizerBackend& backend, std::span<const DatasetSample> samples);

// One replayed utterance: the buffer it is spoken against, canonical
// commands that prepare the buffer and selection, and optional recorded
// inter-token gaps (one fewer than the tokens).
struct ReplayCase {
  std::string utterance;
  std::string buffer;
  std::vector<std::string> setup;
  std::vector<int64_t> gaps_ms;
};

// JSONL with fields utterance, buffer, and optional setup and gaps_ms.
Result<std::vector<ReplayCase>, std::string> LoadReplayCorpus(const std::string& path);
Result<std::vector<ReplayCase>, std::string> ParseReplayCorpus(std::string_view text);

// The legacy VUI's segmenter: a timed-out utterance survives only when it
// already parses as a complete command.
SegmenterConfig LegacyVuiSegmenterConfig(int64_t window_ms = kLegacyWindowMs);

struct ReplayConfig {
  int64_t jitter_min_ms = 200;
  int64_t jitter_max_ms = 2500;
  uint64_t seed = 1;
  SegmenterConfig legacy = LegacyVuiSegmenterConfig();
  SegmenterConfig shim = SegmenterConfig::Shim();
  CorrectionLexicon corrections = DefaultCorrectionLexicon();
  std::shared_ptr<const NormalizerBackend> backend;  // rule backend if null
};

enum class ReplayOutcome : uint8_t {
  kSucceeded,
  kClarified,    // shim asked a question; not a failure
  kTimeout,      // the VUI discarded a partial command
  kSyntax,       // unrecognized, or the shim could only suggest
  kRecognition,  // recognized but the target or selection was missing
};
std::string_view ReplayOutcomeName(ReplayOutcome o);

struct ConditionCounts {
  size_t cases = 0;
  size_t succeeded = 0;
  size_t clarified = 0;
  size_t timeout = 0;
  size_t syntax = 0;
  size_t recognition = 0;
  size_t failures() const { return timeout + syntax + recognition; }
  void Add(ReplayOutcome o);
};

struct FailureReport {
  ConditionCounts legacy;  // condition A: legacy segmenter into the VUI
  ConditionCounts shim;    // condition B: shim segmenter and session
  std::vector<ReplayOutcome> legacy_outcomes;
  std::vector<ReplayOutcome> shim_outcomes;

  nlohmann::ordered_json ToJson() const;
  std::string ToTable() const;
};

// Both conditions hear the same seeded gaps. Throws std::invalid_argument
// on an empty corpus or an inverted jitter range.
FailureReport ReplayCompare(std::span<const ReplayCase> corpus, const ReplayConfig& config = {});

}  // namespace cmdshim

#endif  // CMDSHIM_EVAL_H_
