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

// A desk-scale stand-in for a legacy fixed-syntax VUI editing a text
// buffer.
//
// Only canonical commands are accepted; anything else fails as
// Unrecognized and leaves the state untouched. When a target phrase occurs
// more than once the candidates are numbered 1..n left to right and the
// in-flight operation waits for CHOOSE <n>. A selection lives until the
// next command: THAT consumes it, and commands naming an explicit phrase
// ignore it and search the buffer again.

#ifndef CMDSHIM_VUI_SIM_H_
#define CMDSHIM_VUI_SIM_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cmdshim/command.h"
#include "cmdshim/result.h"
#include "cmdshim/text.h"

namespace cmdshim {

// Half-open word interval [begin, end).
struct WordRange {
  size_t begin = 0;
  size_t end = 0;
  size_t size() const { return end - begin; }
  friend bool operator==(const WordRange&, const WordRange&) = default;
};

// Normalized typo phrase -> replacement candidates, in presentation order.
using CorrectionLexicon = std::map<std::string, std::vector<std::string>>;

// Parses "typo = candidate one | candidate two" lines; '#' starts a comment.
CorrectionLexicon ParseCorrectionLexicon(std::string_view text);
CorrectionLexicon LoadCorrectionLexicon(const std::string& path);
// The shipped list (identical to data/corrections.txt).
const CorrectionLexicon& DefaultCorrectionLexicon();

enum class FailureReason : uint8_t {
  kUnrecognized,
  kTargetNotFound,
  kNoSelection,
  kNothingToUndo,
  kNothingToRedo,
};

std::string_view FailureReasonName(FailureReason r);

struct Outcome {
  enum class Kind : uint8_t { kApplied, kPendingDisambiguation, kFailed };
  Kind kind = Kind::kApplied;
  std::optional<FailureReason> reason;
  // Numbered candidates (index i is candidate i + 1) when pending.
  std::vector<std::string> candidates;
  std::vector<WordRange> candidate_ranges;
  // Buffer and selection after the command.
  std::string buffer;
  std::optional<WordRange> selection;

  bool applied() const { return kind == Kind::kApplied; }
  bool failed() const { return kind == Kind::kFailed; }
};

std::string_view OutcomeKindName(Outcome::Kind k);

// An operation waiting on CHOOSE.
struct TargetChoice {
  std::vector<WordRange> ranges;
  friend bool operator==(const TargetChoice&, const TargetChoice&) = default;
};
struct CorrectionChoice {
  WordRange target;
  std::vector<std::string> options;
  friend bool operator==(const CorrectionChoice&,
                         const CorrectionChoice&) = default;
};
struct PendingOperation {
  Command in_flight;
  std::variant<TargetChoice, CorrectionChoice> choice;
  size_t count() const;
  friend bool operator==(const PendingOperation&,
                         const PendingOperation&) = default;
};

class SimState {
 public:
  SimState() = default;
  static SimState Init(Words text, CorrectionLexicon lexicon = {});
  static SimState Init(std::string_view text, CorrectionLexicon lexicon = {});

  // Never throws on bad input; failures come back in the Outcome and leave
  // the state unchanged.
  Outcome Execute(std::string_view canonical_text);
  Outcome Execute(const Command& cmd);

  const Words& buffer() const { return buffer_; }
  std::string buffer_text() const { return Join(buffer_); }
  size_t cursor() const { return cursor_; }
  const std::optional<WordRange>& selection() const { return selection_; }
  // Normalized words of the selection, empty when nothing is selected.
  Words selected_words() const;
  const std::optional<PendingOperation>& pending() const { return pending_; }
  size_t undo_depth() const { return undo_.size(); }
  size_t redo_depth() const { return redo_.size(); }

  // Line-oriented snapshot: buffer, cursor, selection and pending lines.
  // Undo history and the lexicon are not part of the snapshot.
  std::string ExportSnapshot() const;
  static Result<SimState, std::string> ImportSnapshot(
      std::string_view text, CorrectionLexicon lexicon = {});

  // Structural equality over buffer, cursor, selection, pending and both
  // history stacks.
  friend bool operator==(const SimState& a, const SimState& b);

 private:
  struct Snapshot {
    Words buffer;
    size_t cursor = 0;
    std::optional<WordRange> selection;
    friend bool operator==(const Snapshot&, const Snapshot&) = default;
  };

  Snapshot Capture() const;
  void Restore(const Snapshot& s);
  void BeginEdit();
  Outcome Succeed();
  Outcome Fail(FailureReason r) const;
  Outcome Pending(PendingOperation op);
  Outcome Resolve(const Command& cmd, WordRange target);
  Outcome Locate(const Command& cmd, const Words& phrase);
  Outcome ApplyCorrection(const Command& cmd, WordRange target);
  void Splice(WordRange range, const Words& words);

  Words buffer_;
  size_t cursor_ = 0;
  std::optional<WordRange> selection_;
  std::optional<PendingOperation> pending_;
  std::vector<Snapshot> undo_;
  std::vector<Snapshot> redo_;
  std::shared_ptr<const CorrectionLexicon> lexicon_ =
      std::make_shared<CorrectionLexicon>();
};

// Free-function form: returns the successor state with the outcome.
std::pair<SimState, Outcome> Execute(SimState state, std::string_view text);

// Non-overlapping whole-word, case-insensitive matches of `phrase`, left to
// right.
std::vector<WordRange> FindPhrase(const Words& buffer, const Words& phrase);

}  // namespace cmdshim

#endif  // CMDSHIM_VUI_SIM_H_
