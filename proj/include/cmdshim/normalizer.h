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

// Maps a natural utterance plus selection context onto a canonical command,
// a one-slot clarification question, or a list of suggestions.
//
// The rule backend never invents argument words: every word of a produced
// argument is one of the user's tokens or comes from the selection.

#ifndef CMDSHIM_NORMALIZER_H_
#define CMDSHIM_NORMALIZER_H_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cmdshim/command.h"
#include "cmdshim/lexicon.h"
#include "cmdshim/text.h"

namespace cmdshim {

struct SelectionContext {
  // Empty means nothing is selected.
  Words selected;
  bool has_selection() const { return !selected.empty(); }
  friend bool operator==(const SelectionContext&, const SelectionContext&) = default;
};

struct Repair {
  RepairCategory category;
  Words tokens;  // the user's tokens the repair touched
  friend bool operator==(const Repair&, const Repair&) = default;
};
using RepairTrace = std::vector<Repair>;

// 100 minus the penalty of each distinct category in the trace, floored at 0.
int Confidence(const RepairTrace& trace, const Lexicon& lexicon = Lexicon::Default());

// A command with exactly one missing component, waiting on an answer.
struct PartialCommand {
  Operation op;
  std::optional<ArgValue> cmd_arg;
  std::optional<ContextKeyword> ctx;
  std::optional<ArgValue> ctx_arg;
  ComponentKind missing;
  std::string question;
  RepairTrace trace;
  friend bool operator==(const PartialCommand&, const PartialCommand&) = default;
};

struct Corrected {
  Command command;
  int confidence;
  RepairTrace trace;
  friend bool operator==(const Corrected&, const Corrected&) = default;
};
struct Clarify {
  std::string question;
  PartialCommand partial;
  friend bool operator==(const Clarify&, const Clarify&) = default;
};
struct Suggestion {
  std::string text;    // canonical command or template with <placeholders>
  std::string reason;
  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};
struct Suggest {
  std::vector<Suggestion> suggestions;
  friend bool operator==(const Suggest&, const Suggest&) = default;
};
struct PassThrough {
  Command command;
  friend bool operator==(const PassThrough&, const PassThrough&) = default;
};

using NormalizationResult = std::variant<Corrected, Clarify, Suggest, PassThrough>;

// The command to relay, if the result carries one.
std::optional<Command> RelayableCommand(const NormalizationResult& r);
std::string_view ResultKindName(const NormalizationResult& r);  // "corrected"
// What a dataset gold string looks like for this result: the canonical
// command, "ASK: <question>", or "" for suggestions.
std::string PredictionText(const NormalizationResult& r);

struct NormalizeRequest {
  Words utterance;
  SelectionContext ctx;
  std::vector<std::string> history;  // most recent first, at most 5
};

class NormalizerBackend {
 public:
  virtual ~NormalizerBackend() = default;
  virtual std::string_view name() const = 0;
  virtual NormalizationResult Normalize(const NormalizeRequest& request) const = 0;
  virtual NormalizationResult ApplyClarification(const PartialCommand& partial,
                                                 const Words& answer) const = 0;
};

// The deterministic pipeline. Stateless; safe to share across threads.
class RuleBackend : public NormalizerBackend {
 public:
  explicit RuleBackend(Lexicon lexicon = Lexicon::Default());
  std::string_view name() const override { return "rule"; }
  NormalizationResult Normalize(const NormalizeRequest& request) const override;
  NormalizationResult ApplyClarification(const PartialCommand& partial,
                                         const Words& answer) const override;
  const Lexicon& lexicon() const { return lexicon_; }

 private:
  Lexicon lexicon_;
};

// Passes canonical input through and otherwise gives up, echoing the
// utterance as its only suggestion. A floor for evaluation.
class EchoBackend : public NormalizerBackend {
 public:
  std::string_view name() const override { return "stub"; }
  NormalizationResult Normalize(const NormalizeRequest& request) const override;
  NormalizationResult ApplyClarification(const PartialCommand& partial,
                                         const Words& answer) const override;
};

// Adapter for an out-of-process model. Whatever the callback returns is
// used as is; clarification answers are filled by the rule backend.
class ExternalBackend : public NormalizerBackend {
 public:
  using Fn = std::function<NormalizationResult(const NormalizeRequest&)>;
  ExternalBackend(std::string name, Fn fn, Lexicon lexicon = Lexicon::Default());
  std::string_view name() const override { return name_; }
  NormalizationResult Normalize(const NormalizeRequest& request) const override;
  NormalizationResult ApplyClarification(const PartialCommand& partial,
                                         const Words& answer) const override;

 private:
  std::string name_;
  Fn fn_;
  RuleBackend fill_;
};

std::unique_ptr<NormalizerBackend> MakeBackend(std::string_view name,
                                               Lexicon lexicon = Lexicon::Default());

// Convenience wrappers over a default rule backend.
NormalizationResult Normalize(std::string_view utterance,
                              const SelectionContext& ctx = {},
                              const std::vector<std::string>& history = {});
NormalizationResult ApplyClarification(const PartialCommand& partial,
                                       std::string_view answer);

}  // namespace cmdshim

#endif  // CMDSHIM_NORMALIZER_H_
