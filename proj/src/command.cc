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

#include "cmdshim/command.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace cmdshim {
namespace {

struct OpInfo {
  Operation op;
  std::string_view keyword;
  std::string_view name;
};

constexpr std::array<OpInfo, 9> kOps = {{
    {Operation::kSelect, "SELECT", "select"},
    {Operation::kChoose, "CHOOSE", "choose"},
    {Operation::kDelete, "DELETE", "delete"},
    {Operation::kInsert, "INSERT", "insert"},
    {Operation::kReplace, "REPLACE", "replace"},
    {Operation::kCorrect, "CORRECT", "correct"},
    {Operation::kUndo, "UNDO", "undo"},
    {Operation::kRedo, "REDO", "redo"},
    {Operation::kMove, "MOVE", "move"},
}};

constexpr ComponentMask kCmd = Bit(ComponentKind::kCmd);
constexpr ComponentMask kArg = Bit(ComponentKind::kCmdArg);
constexpr ComponentMask kCtx = Bit(ComponentKind::kCtx);
constexpr ComponentMask kCtxArg = Bit(ComponentKind::kCtxArg);

struct TemplateInfo {
  TemplateId id;
  ComponentMask mask;
  std::string_view name;
};

constexpr std::array<TemplateInfo, 6> kTemplates = {{
    {TemplateId::kCmd, kCmd, "cmd"},
    {TemplateId::kCmdArgOnly, kArg, "cmd-arg"},
    {TemplateId::kCmdArg, kCmd | kArg, "cmd+cmd-arg"},
    {TemplateId::kCmdCtx, kCmd | kCtx, "cmd+ctx"},
    {TemplateId::kCmdCtxArg, kCmd | kCtx | kCtxArg, "cmd+ctx+ctx-arg"},
    {TemplateId::kFull, kCmd | kArg | kCtx | kCtxArg,
     "cmd+cmd-arg+ctx+ctx-arg"},
}};

// Multi-word lead-ins that mark a natural phrasing rather than an argument.
const std::vector<Words>& LeadIns() {
  static const std::vector<Words> kLeadIns = {
      {"the", "selected"}, {"the", "selection"}, {"the", "words"},
      {"the", "word"},     {"the", "phrase"},    {"selected"},
      {"selection"},       {"number"},
  };
  return kLeadIns;
}

bool IsLoneDeictic(std::span<const std::string> words) {
  return words.size() == 1 &&
         (words[0] == "that" || words[0] == "this" || words[0] == "it");
}

bool IsRelativeWordForm(std::span<const std::string> words) {
  if (words.size() != 2 || words[1] != "word") return false;
  return words[0] == "previous" || words[0] == "next" || words[0] == "left" ||
         words[0] == "right";
}

struct PhraseViolation {
  ParseError::Kind kind;
  size_t index;  // within the phrase
  std::string reason;
};

std::optional<PhraseViolation> CheckPhrase(Operation op,
                                           std::span<const std::string> words) {
  using K = ParseError::Kind;
  if (words.empty()) return PhraseViolation{K::kMissingComponent, 0, "empty phrase"};
  for (size_t i = 0; i < words.size(); ++i) {
    const std::string& w = words[i];
    if (w.empty() || std::any_of(w.begin(), w.end(), [](unsigned char c) {
          return std::isspace(c);
        })) {
      return PhraseViolation{K::kExtraTokens, i, "malformed phrase word"};
    }
    if (IsReservedContextWord(w)) {
      return PhraseViolation{K::kExtraTokens, i,
                             "phrase contains context keyword '" + w + "'"};
    }
  }
  if (SelectorLeadInLength(words) > 0) {
    return PhraseViolation{K::kExtraTokens, 0,
                           "phrase starts with a selector lead-in"};
  }
  if (IsLoneDeictic(words)) {
    return PhraseViolation{K::kMissingComponent, 0,
                           "deictic word where a phrase is required"};
  }
  if (op == Operation::kSelect) {
    if (words.size() == 1 && IsNumberToken(words[0])) {
      return PhraseViolation{K::kInvalidNumber, 0,
                             "numbers are chosen, not selected"};
    }
    if (IsRelativeWordForm(words)) {
      return PhraseViolation{K::kUnknownKeyword, 0,
                             "relative-word form is not a phrase"};
    }
  }
  return std::nullopt;
}

bool HoldsPhrase(const std::optional<ArgValue>& a) {
  return a && std::holds_alternative<Phrase>(*a);
}
bool HoldsDeictic(const std::optional<ArgValue>& a) {
  return a && std::holds_alternative<Deictic>(*a);
}

std::string ArgToString(const ArgValue& arg) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Phrase>) {
          return Join(v.words);
        } else if constexpr (std::is_same_v<V, Number>) {
          return std::to_string(v.value);
        } else if constexpr (std::is_same_v<V, Deictic>) {
          return "THAT";
        } else {
          return v.direction == Direction::kPrevious ? "PREVIOUS WORD"
                                                     : "NEXT WORD";
        }
      },
      arg);
}

Command Must(Result<Command, std::string> r) {
  if (!r.ok()) throw std::invalid_argument("invalid command: " + r.error());
  return std::move(r).value();
}

ParseError Err(ParseError::Kind kind, size_t pos,
               std::span<const std::string> tokens) {
  return ParseError{kind, pos, pos < tokens.size() ? tokens[pos] : ""};
}

// Index of the first context keyword in tokens[from, end), or end.
size_t FindContext(std::span<const std::string> tokens, size_t from) {
  for (size_t i = from; i < tokens.size(); ++i) {
    if (IsReservedContextWord(tokens[i])) return i;
  }
  return tokens.size();
}

// Validates tokens[begin, end) as a phrase argument and stores it in *out.
std::optional<ParseError> TakePhrase(Operation op,
                                     std::span<const std::string> tokens,
                                     size_t begin, size_t end, ArgValue* out) {
  auto words = tokens.subspan(begin, end - begin);
  if (auto v = CheckPhrase(op, words)) {
    return Err(v->kind, begin + v->index, tokens);
  }
  *out = Phrase{Words(words.begin(), words.end())};
  return std::nullopt;
}

}  // namespace

std::optional<TemplateId> TemplateForComponents(ComponentMask mask) {
  for (const TemplateInfo& t : kTemplates) {
    if (t.mask == mask) return t.id;
  }
  return std::nullopt;
}

ComponentMask ComponentsOf(TemplateId id) {
  for (const TemplateInfo& t : kTemplates) {
    if (t.id == id) return t.mask;
  }
  return 0;
}

std::string_view TemplateName(TemplateId id) {
  for (const TemplateInfo& t : kTemplates) {
    if (t.id == id) return t.name;
  }
  return "?";
}

bool IsReservedContextWord(std::string_view word) {
  return word == "before" || word == "after" || word == "with";
}

size_t SelectorLeadInLength(std::span<const std::string> words) {
  for (const Words& lead : LeadIns()) {
    if (words.size() >= lead.size() &&
        std::equal(lead.begin(), lead.end(), words.begin())) {
      return lead.size();
    }
  }
  return 0;
}

const Words* PhraseWords(const std::optional<ArgValue>& arg) {
  if (!arg) return nullptr;
  if (const auto* p = std::get_if<Phrase>(&*arg)) return &p->words;
  return nullptr;
}

std::optional<Operation> OperationFromKeyword(std::string_view word) {
  std::string lower = ToLower(word);
  for (const OpInfo& o : kOps) {
    if (o.name == lower) return o.op;
  }
  return std::nullopt;
}

std::string_view OperationKeyword(Operation op) {
  for (const OpInfo& o : kOps) {
    if (o.op == op) return o.keyword;
  }
  return "?";
}

std::string_view OperationName(Operation op) {
  for (const OpInfo& o : kOps) {
    if (o.op == op) return o.name;
  }
  return "?";
}

std::optional<Operation> OperationFromName(std::string_view name) {
  return OperationFromKeyword(name);
}

std::optional<ContextKeyword> ContextFromKeyword(std::string_view word) {
  std::string lower = ToLower(word);
  if (lower == "before") return ContextKeyword::kBefore;
  if (lower == "after") return ContextKeyword::kAfter;
  if (lower == "with") return ContextKeyword::kWith;
  return std::nullopt;
}

std::string_view ContextKeywordText(ContextKeyword ctx) {
  switch (ctx) {
    case ContextKeyword::kBefore:
      return "BEFORE";
    case ContextKeyword::kAfter:
      return "AFTER";
    case ContextKeyword::kWith:
      return "WITH";
  }
  return "?";
}

Result<Command, std::string> Command::Create(
    Operation op, std::optional<ArgValue> cmd_arg,
    std::optional<ContextKeyword> ctx, std::optional<ArgValue> ctx_arg) {
  auto lower_phrase = [](std::optional<ArgValue>& a) {
    if (a) {
      if (auto* p = std::get_if<Phrase>(&*a)) {
        for (std::string& w : p->words) w = ToLower(w);
      }
    }
  };
  lower_phrase(cmd_arg);
  lower_phrase(ctx_arg);

  auto check = [op](const std::optional<ArgValue>& a,
                    std::string_view slot) -> std::optional<std::string> {
    if (const Words* w = PhraseWords(a)) {
      if (auto v = CheckPhrase(op, *w)) {
        return std::string(slot) + ": " + v->reason;
      }
    }
    return std::nullopt;
  };
  if (auto e = check(cmd_arg, "cmd-arg")) return *e;
  if (auto e = check(ctx_arg, "ctx-arg")) return *e;

  const bool has_ctx = ctx.has_value();
  const bool has_ctx_arg = ctx_arg.has_value();
  const std::string name(OperationKeyword(op));
  switch (op) {
    case Operation::kSelect: {
      bool ok = cmd_arg && (std::holds_alternative<Phrase>(*cmd_arg) ||
                            std::holds_alternative<RelativeWord>(*cmd_arg));
      if (!ok || has_ctx || has_ctx_arg) {
        return name + " takes a phrase or PREVIOUS/NEXT WORD only";
      }
      break;
    }
    case Operation::kChoose:
      if (!cmd_arg || !std::holds_alternative<Number>(*cmd_arg) || has_ctx ||
          has_ctx_arg) {
        return name + " takes a number only";
      }
      if (std::get<Number>(*cmd_arg).value < 1) {
        return name + " numbers start at 1";
      }
      break;
    case Operation::kDelete:
    case Operation::kCorrect:
      if (!(HoldsPhrase(cmd_arg) || HoldsDeictic(cmd_arg)) || has_ctx ||
          has_ctx_arg) {
        return name + " takes a phrase or THAT only";
      }
      break;
    case Operation::kInsert:
      if (!HoldsPhrase(cmd_arg) || !HoldsPhrase(ctx_arg) || !has_ctx ||
          *ctx == ContextKeyword::kWith) {
        return name + " requires <phrase> BEFORE|AFTER <phrase>";
      }
      break;
    case Operation::kReplace:
      if (!HoldsPhrase(cmd_arg) || !HoldsPhrase(ctx_arg) || !has_ctx ||
          *ctx != ContextKeyword::kWith) {
        return name + " requires <phrase> WITH <phrase>";
      }
      break;
    case Operation::kUndo:
    case Operation::kRedo:
      if (!HoldsDeictic(cmd_arg) || has_ctx || has_ctx_arg) {
        return name + " takes THAT only";
      }
      break;
    case Operation::kMove:
      if (cmd_arg || !HoldsPhrase(ctx_arg) || !has_ctx ||
          *ctx == ContextKeyword::kWith) {
        return name + " requires BEFORE|AFTER <phrase>";
      }
      break;
  }
  return Command(op, std::move(cmd_arg), ctx, std::move(ctx_arg));
}

Command Command::Select(Words phrase) {
  return Must(Create(Operation::kSelect, Phrase{std::move(phrase)}));
}
Command Command::SelectRelative(Direction d) {
  return Must(Create(Operation::kSelect, RelativeWord{d}));
}
Command Command::Choose(int n) {
  return Must(Create(Operation::kChoose, Number{n}));
}
Command Command::Delete(Words phrase) {
  return Must(Create(Operation::kDelete, Phrase{std::move(phrase)}));
}
Command Command::DeleteThat() {
  return Must(Create(Operation::kDelete, Deictic{}));
}
Command Command::Correct(Words phrase) {
  return Must(Create(Operation::kCorrect, Phrase{std::move(phrase)}));
}
Command Command::CorrectThat() {
  return Must(Create(Operation::kCorrect, Deictic{}));
}
Command Command::Insert(Words phrase, ContextKeyword where, Words anchor) {
  return Must(Create(Operation::kInsert, Phrase{std::move(phrase)}, where,
                     Phrase{std::move(anchor)}));
}
Command Command::Replace(Words target, Words replacement) {
  return Must(Create(Operation::kReplace, Phrase{std::move(target)},
                     ContextKeyword::kWith, Phrase{std::move(replacement)}));
}
Command Command::Undo() { return Must(Create(Operation::kUndo, Deictic{})); }
Command Command::Redo() { return Must(Create(Operation::kRedo, Deictic{})); }
Command Command::Move(ContextKeyword where, Words anchor) {
  return Must(Create(Operation::kMove, std::nullopt, where,
                     Phrase{std::move(anchor)}));
}

ComponentMask Command::components() const {
  ComponentMask m = kCmd;
  if (cmd_arg_) m |= kArg;
  if (ctx_) m |= kCtx;
  if (ctx_arg_) m |= kCtxArg;
  return m;
}

std::string_view ParseErrorKindName(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::kUnknownKeyword:
      return "UnknownKeyword";
    case ParseError::Kind::kMissingComponent:
      return "MissingComponent";
    case ParseError::Kind::kExtraTokens:
      return "ExtraTokens";
    case ParseError::Kind::kInvalidNumber:
      return "InvalidNumber";
  }
  return "?";
}

std::string ParseError::ToString() const {
  std::string out(ParseErrorKindName(kind));
  out += " at token " + std::to_string(position);
  if (!token.empty()) out += " ('" + token + "')";
  return out;
}

ParseResult ParseCanonical(std::string_view text) {
  Words tokens = SplitWords(text);
  for (std::string& t : tokens) t = ToLower(t);
  return ParseCanonical(tokens);
}

ParseResult ParseCanonical(std::span<const std::string> tokens) {
  using K = ParseError::Kind;
  if (tokens.empty()) return Err(K::kMissingComponent, 0, tokens);
  Words lowered(tokens.begin(), tokens.end());
  for (std::string& t : lowered) t = ToLower(t);
  std::span<const std::string> t(lowered);
  const size_t n = t.size();

  std::optional<Operation> op = OperationFromKeyword(t[0]);
  if (!op) return Err(K::kUnknownKeyword, 0, t);

  auto build = [&](std::optional<ArgValue> a, std::optional<ContextKeyword> c,
                   std::optional<ArgValue> ca) -> ParseResult {
    auto r = Command::Create(*op, std::move(a), c, std::move(ca));
    // Every rule Create enforces has been checked token-wise above, so a
    // failure here is a grammar bug.
    if (!r.ok()) throw std::logic_error("parser accepted invalid command: " + r.error());
    return std::move(r).value();
  };

  switch (*op) {
    case Operation::kSelect: {
      if (n == 1) return Err(K::kMissingComponent, 1, t);
      if (n == 3 && t[2] == "word" && (t[1] == "previous" || t[1] == "next")) {
        return build(RelativeWord{t[1] == "previous" ? Direction::kPrevious
                                                     : Direction::kNext},
                     std::nullopt, std::nullopt);
      }
      ArgValue arg;
      if (auto e = TakePhrase(*op, t, 1, n, &arg)) return *e;
      return build(arg, std::nullopt, std::nullopt);
    }
    case Operation::kChoose: {
      if (n == 1) return Err(K::kMissingComponent, 1, t);
      std::optional<int> v = ParseNumberToken(t[1]);
      if (!v || *v < 1) return Err(K::kInvalidNumber, 1, t);
      if (n > 2) return Err(K::kExtraTokens, 2, t);
      return build(Number{*v}, std::nullopt, std::nullopt);
    }
    case Operation::kDelete:
    case Operation::kCorrect: {
      if (n == 1) return Err(K::kMissingComponent, 1, t);
      if (n == 2 && t[1] == "that") {
        return build(Deictic{}, std::nullopt, std::nullopt);
      }
      ArgValue arg;
      if (auto e = TakePhrase(*op, t, 1, n, &arg)) return *e;
      return build(arg, std::nullopt, std::nullopt);
    }
    case Operation::kInsert:
    case Operation::kReplace: {
      size_t k = FindContext(t, 1);
      if (k == n) return Err(K::kMissingComponent, n, t);
      ContextKeyword ctx = *ContextFromKeyword(t[k]);
      bool ctx_ok = *op == Operation::kReplace ? ctx == ContextKeyword::kWith
                                               : ctx != ContextKeyword::kWith;
      if (!ctx_ok) return Err(K::kUnknownKeyword, k, t);
      if (k == 1) return Err(K::kMissingComponent, 1, t);
      if (k + 1 == n) return Err(K::kMissingComponent, n, t);
      ArgValue arg;
      ArgValue ctx_arg;
      if (auto e = TakePhrase(*op, t, 1, k, &arg)) return *e;
      if (auto e = TakePhrase(*op, t, k + 1, n, &ctx_arg)) return *e;
      return build(arg, ctx, ctx_arg);
    }
    case Operation::kUndo:
    case Operation::kRedo:
      if (n == 1) return Err(K::kMissingComponent, 1, t);
      if (t[1] != "that") return Err(K::kUnknownKeyword, 1, t);
      if (n > 2) return Err(K::kExtraTokens, 2, t);
      return build(Deictic{}, std::nullopt, std::nullopt);
    case Operation::kMove: {
      if (n == 1) return Err(K::kMissingComponent, 1, t);
      std::optional<ContextKeyword> ctx = ContextFromKeyword(t[1]);
      if (!ctx || *ctx == ContextKeyword::kWith) {
        return Err(K::kUnknownKeyword, 1, t);
      }
      if (n == 2) return Err(K::kMissingComponent, 2, t);
      ArgValue ctx_arg;
      if (auto e = TakePhrase(*op, t, 2, n, &ctx_arg)) return *e;
      return build(std::nullopt, ctx, ctx_arg);
    }
  }
  return Err(K::kUnknownKeyword, 0, t);
}

std::string SerializeCanonical(const Command& cmd) {
  std::string out(OperationKeyword(cmd.op()));
  if (cmd.cmd_arg()) out += " " + ArgToString(*cmd.cmd_arg());
  if (cmd.ctx()) out += " " + std::string(ContextKeywordText(*cmd.ctx()));
  if (cmd.ctx_arg()) out += " " + ArgToString(*cmd.ctx_arg());
  return out;
}

TemplateId TemplateOf(const Command& cmd) {
  // Create() only admits commands whose slots form a legal template.
  return *TemplateForComponents(cmd.components());
}

}  // namespace cmdshim
