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

// The fixed-format command grammar understood by the legacy VUI.
//
// Every command fills some subset of four slots:
//
//   [cmd] <cmd-arg> [ctx] <ctx-arg>
//
// e.g. "INSERT at home BEFORE tonight". Of the sixteen slot-presence subsets
// only six are legal templates. The canonical surface form uses uppercase
// keywords and lowercase argument words; that string is the interchange
// format between every other module.

#ifndef CMDSHIM_COMMAND_H_
#define CMDSHIM_COMMAND_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cmdshim/result.h"
#include "cmdshim/text.h"

namespace cmdshim {

enum class ComponentKind : uint8_t { kCmd = 0, kCmdArg = 1, kCtx = 2, kCtxArg = 3 };

enum class Operation : uint8_t {
  kSelect,
  kChoose,
  kDelete,
  kInsert,
  kReplace,
  kCorrect,
  kUndo,
  kRedo,
  kMove,
};

inline constexpr Operation kAllOperations[] = {
    Operation::kSelect,  Operation::kChoose, Operation::kDelete,
    Operation::kInsert,  Operation::kReplace, Operation::kCorrect,
    Operation::kUndo,    Operation::kRedo,   Operation::kMove};

enum class ContextKeyword : uint8_t { kBefore, kAfter, kWith };

enum class Direction : uint8_t { kPrevious, kNext };

struct Phrase {
  Words words;
  friend bool operator==(const Phrase&, const Phrase&) = default;
};
struct Number {
  int value = 1;
  friend bool operator==(const Number&, const Number&) = default;
};
// "that": refers to the current selection.
struct Deictic {
  friend bool operator==(const Deictic&, const Deictic&) = default;
};
// The fixed "PREVIOUS WORD" / "NEXT WORD" selection forms.
struct RelativeWord {
  Direction direction = Direction::kNext;
  friend bool operator==(const RelativeWord&, const RelativeWord&) = default;
};

using ArgValue = std::variant<Phrase, Number, Deictic, RelativeWord>;

// Bit set over ComponentKind.
using ComponentMask = uint8_t;
constexpr ComponentMask Bit(ComponentKind k) {
  return static_cast<ComponentMask>(1u << static_cast<unsigned>(k));
}

enum class TemplateId : uint8_t {
  kCmd,           // command mode
  kCmdArgOnly,    // 3   (bare number, command keyword elided)
  kCmdArg,        // select apple / delete that / undo that
  kCmdCtx,        // select next word, read as keyword + relation
  kCmdCtxArg,     // move before apple
  kFull,          // insert law before enforcement
};

inline constexpr TemplateId kAllTemplates[] = {
    TemplateId::kCmd,       TemplateId::kCmdArgOnly, TemplateId::kCmdArg,
    TemplateId::kCmdCtx,    TemplateId::kCmdCtxArg,  TemplateId::kFull};

// Returns the template for a slot-presence subset, or nullopt for the ten
// invalid subsets.
std::optional<TemplateId> TemplateForComponents(ComponentMask mask);
ComponentMask ComponentsOf(TemplateId id);
std::string_view TemplateName(TemplateId id);

class Command {
 public:
  // Validating constructor. Returns a description of the violated rule on
  // failure. Phrase words are lowercased.
  static Result<Command, std::string> Create(
      Operation op, std::optional<ArgValue> cmd_arg,
      std::optional<ContextKeyword> ctx = std::nullopt,
      std::optional<ArgValue> ctx_arg = std::nullopt);

  // Throwing shorthands for tests and fixtures.
  static Command Select(Words phrase);
  static Command SelectRelative(Direction d);
  static Command Choose(int n);
  static Command Delete(Words phrase);
  static Command DeleteThat();
  static Command Correct(Words phrase);
  static Command CorrectThat();
  static Command Insert(Words phrase, ContextKeyword where, Words anchor);
  static Command Replace(Words target, Words replacement);
  static Command Undo();
  static Command Redo();
  static Command Move(ContextKeyword where, Words anchor);

  Operation op() const { return op_; }
  const std::optional<ArgValue>& cmd_arg() const { return cmd_arg_; }
  const std::optional<ContextKeyword>& ctx() const { return ctx_; }
  const std::optional<ArgValue>& ctx_arg() const { return ctx_arg_; }

  ComponentMask components() const;

  friend bool operator==(const Command&, const Command&) = default;

 private:
  Command(Operation op, std::optional<ArgValue> cmd_arg,
          std::optional<ContextKeyword> ctx, std::optional<ArgValue> ctx_arg)
      : op_(op),
        cmd_arg_(std::move(cmd_arg)),
        ctx_(ctx),
        ctx_arg_(std::move(ctx_arg)) {}

  Operation op_;
  std::optional<ArgValue> cmd_arg_;
  std::optional<ContextKeyword> ctx_;
  std::optional<ArgValue> ctx_arg_;
};

struct ParseError {
  enum class Kind : uint8_t {
    kUnknownKeyword,
    kMissingComponent,
    kExtraTokens,
    kInvalidNumber,
  };
  Kind kind;
  // Token index of the offending token; equals the token count when the
  // input ended early.
  size_t position = 0;
  std::string token;

  std::string ToString() const;
  friend bool operator==(const ParseError&, const ParseError&) = default;
};

std::string_view ParseErrorKindName(ParseError::Kind kind);

using ParseResult = Result<Command, ParseError>;

ParseResult ParseCanonical(std::string_view text);
ParseResult ParseCanonical(std::span<const std::string> tokens);

std::string SerializeCanonical(const Command& cmd);

TemplateId TemplateOf(const Command& cmd);

// Vocabulary shared with the normalizer and generator.
std::optional<Operation> OperationFromKeyword(std::string_view word);
std::string_view OperationKeyword(Operation op);  // "SELECT"
std::string_view OperationName(Operation op);     // "select"
std::optional<Operation> OperationFromName(std::string_view name);
std::optional<ContextKeyword> ContextFromKeyword(std::string_view word);
std::string_view ContextKeywordText(ContextKeyword ctx);  // "BEFORE"

// Words that cannot appear inside a phrase argument.
bool IsReservedContextWord(std::string_view word);

// Length of a selector lead-in ("the word", "number", ...) starting at the
// front of `words`, or 0.
size_t SelectorLeadInLength(std::span<const std::string> words);

// Phrase-bearing argument accessor; nullptr for other variants.
const Words* PhraseWords(const std::optional<ArgValue>& arg);

}  // namespace cmdshim

#endif  // CMDSHIM_COMMAND_H_
