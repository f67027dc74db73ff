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

#include "cmdshim/normalizer.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cmdshim {
namespace {

using Span = std::span<const std::string>;

Words ToWords(Span s) { return Words(s.begin(), s.end()); }

bool Equals(Span s, std::initializer_list<std::string_view> words) {
  return std::equal(s.begin(), s.end(), words.begin(), words.end());
}

// Index of the first token satisfying `pred`, or s.size().
template <typename Pred>
size_t FindFirst(Span s, Pred pred) {
  for (size_t i = 0; i < s.size(); ++i) {
    if (pred(s[i])) return i;
  }
  return s.size();
}

Suggest SuggestOne(std::string text, std::string reason) {
  return Suggest{{Suggestion{std::move(text), std::move(reason)}}};
}

std::string Replace(std::string s, std::string_view key, std::string_view value) {
  for (size_t p = s.find(key); p != std::string::npos; p = s.find(key, p + value.size())) {
    s.replace(p, key.size(), value);
  }
  return s;
}

std::string ArgText(const std::optional<ArgValue>& arg) {
  const Words* w = PhraseWords(arg);
  return w ? Join(*w) : std::string();
}

// One normalization attempt. Holds the growing command and repair trace.
class Pipeline {
 public:
  Pipeline(const Lexicon& lex, const NormalizeRequest& req)
      : lex_(lex),
        history_(req.history),
        selection_(TokenizeUtterance(Join(req.ctx.selected))) {
    tokens_ = TokenizeUtterance(Join(req.utterance));
  }

  NormalizationResult Run() {
    if (tokens_.empty()) return TemplateGuide("nothing was heard");
    if (ParseCanonical(Span(tokens_)).ok()) {
      return PassThrough{std::move(ParseCanonical(Span(tokens_))).value()};
    }
    Span rest(tokens_);
    rest = StripFillers(rest);
    if (rest.empty()) return TemplateGuide("only filler words were heard");

    if (auto n = BareNumber(rest)) return ChooseFromHistory(*n, rest);

    Span verb;
    std::optional<Operation> op = OperationFromKeyword(rest[0]);
    if (op) {
      verb = rest.first(1);
    } else {
      for (const auto& [syn, syn_op] : lex_.command_synonyms) {
        if (syn.size() <= rest.size() &&
            std::equal(syn.begin(), syn.end(), rest.begin())) {
          op = syn_op;
          verb = rest.first(syn.size());
          Note(RepairCategory::kSubstituteCmd, verb);
          break;
        }
      }
    }
    if (!op) return UnknownVerb(rest);
    op_ = *op;
    verb_ = verb;
    Span args = rest.subspan(verb.size());
    switch (op_) {
      case Operation::kSelect:
      case Operation::kChoose:
        return SelectOrChoose(args);
      case Operation::kDelete:
      case Operation::kCorrect:
        return DeleteOrCorrect(args);
      case Operation::kUndo:
      case Operation::kRedo:
        return UndoOrRedo(args);
      case Operation::kInsert:
        return InsertCmd(args);
      case Operation::kReplace:
        return ReplaceCmd(args);
      case Operation::kMove:
        return MoveCmd(args);
    }
    return TemplateGuide("unsupported command");
  }

 private:
  void Note(RepairCategory c, Span tokens) {
    trace_.push_back(Repair{c, ToWords(tokens)});
  }

  Span StripFillers(Span s) {
    while (size_t n = MatchPrefix(lex_.fillers, s)) {
      Note(RepairCategory::kNaturalUtterance, s.first(n));
      s = s.subspan(n);
    }
    // A trailing single-word filler ("... please").
    while (s.size() > 1 && MatchWhole(lex_.fillers, s.last(1))) {
      Note(RepairCategory::kNaturalUtterance, s.last(1));
      s = s.first(s.size() - 1);
    }
    return s;
  }

  // Drops a content-free lead-in such as "the word" when something follows.
  Span StripNoise(Span s) {
    size_t n = MatchPrefix(lex_.noise, s);
    if (n == 0) return s;
    Note(RepairCategory::kNaturalUtterance, s.first(n));
    return s.subspan(n);
  }

  bool IsDeictic(Span s) const { return !s.empty() && MatchWhole(lex_.deictic, s); }

  // "3" or "number 3" with nothing else.
  std::optional<int> BareNumber(Span s) const {
    if (s.size() == 2 && MatchWhole(lex_.noise, s.first(1))) s = s.subspan(1);
    if (s.size() != 1) return std::nullopt;
    return ParseNumberToken(s[0]);
  }

  // A bare number only makes sense right after a command that could have
  // left numbered candidates behind.
  NormalizationResult ChooseFromHistory(int n, Span s) {
    bool after_target = false;
    if (!history_.empty()) {
      auto last = ParseCanonical(history_.front());
      after_target = last.ok() && last->op() != Operation::kChoose &&
                     last->op() != Operation::kUndo &&
                     last->op() != Operation::kRedo;
    }
    if (!after_target || n < 1) {
      return SuggestOne("CHOOSE <number>",
                        "a number alone only picks from numbered candidates");
    }
    op_ = Operation::kChoose;
    Note(RepairCategory::kNaturalUtterance, s);
    return Finish(Number{n});
  }

  NormalizationResult SelectOrChoose(Span a) {
    const bool said_choose = op_ == Operation::kChoose;
    Span b = a;
    if (!b.empty() && b[0] == "the") b = b.subspan(1);
    const bool prev = MatchWhole(lex_.previous_word, b);
    const bool next = MatchWhole(lex_.next_word, b);
    if (prev || next) {
      if (b.size() != a.size()) Note(RepairCategory::kNaturalUtterance, a.first(1));
      if (!Equals(b, {"previous", "word"}) && !Equals(b, {"next", "word"})) {
        Note(RepairCategory::kSubstituteCtx, b);
      }
      if (said_choose) Note(RepairCategory::kSwapCmd, verb_);
      op_ = Operation::kSelect;
      return Finish(RelativeWord{prev ? Direction::kPrevious : Direction::kNext});
    }
    a = StripNoise(a);
    if (a.empty()) {
      return Ask(ComponentKind::kCmdArg);
    }
    if (a.size() == 1 && IsNumberToken(a[0])) {
      if (!said_choose) Note(RepairCategory::kSwapCmd, verb_);
      op_ = Operation::kChoose;
      return Finish(Number{*ParseNumberToken(a[0])});
    }
    if (IsDeictic(a)) {
      return SuggestOne("SELECT <phrase>", "say the words to select");
    }
    if (said_choose) Note(RepairCategory::kSwapCmd, verb_);
    op_ = Operation::kSelect;
    return Finish(Phrase{ToWords(a)});
  }

  NormalizationResult DeleteOrCorrect(Span a) {
    if (a.empty()) {
      Note(RepairCategory::kIgnoreDeictic, verb_);
      return Finish(Deictic{});
    }
    size_t k = FindFirst(a, [](const std::string& w) { return IsReservedContextWord(w); });
    if (k < a.size()) {
      // "delete apple before pear": the context is surplus.
      Note(RepairCategory::kSubstituteTemplate, a.subspan(k));
      a = a.first(k);
      if (a.empty()) return TemplateGuide("the target phrase is missing");
    }
    a = StripNoise(a);
    if (IsDeictic(a)) {
      if (!Equals(a, {"that"})) Note(RepairCategory::kNaturalUtterance, a);
      return Finish(Deictic{});
    }
    return Finish(Phrase{ToWords(a)});
  }

  NormalizationResult UndoOrRedo(Span a) {
    if (a.empty()) {
      Note(RepairCategory::kIgnoreDeictic, verb_);
      return Finish(Deictic{});
    }
    if (IsDeictic(a)) {
      if (!Equals(a, {"that"})) Note(RepairCategory::kNaturalUtterance, a);
      return Finish(Deictic{});
    }
    std::string kw(OperationKeyword(op_));
    return SuggestOne(kw + " THAT", "history commands take no argument");
  }

  NormalizationResult InsertCmd(Span a) {
    size_t k = FindFirst(a, [](const std::string& w) {
      return w == "before" || w == "after";
    });
    if (FindFirst(a.first(k), [](const std::string& w) { return w == "with"; }) < k) {
      return InsertGuide(Words{}, "insert places text before or after a phrase");
    }
    if (k == a.size()) {
      Span p = StripNoise(a);
      if (p.empty() || IsDeictic(p)) {
        return InsertGuide(Words{}, "say the words to insert and where");
      }
      if (selection_.empty()) {
        return InsertGuide(ToWords(p), "name the anchor phrase or select it first");
      }
      Note(RepairCategory::kSubstituteTemplate, p);
      return Finish(Phrase{ToWords(p)}, ContextKeyword::kBefore, Phrase{selection_});
    }
    ctx_ = *ContextFromKeyword(a[k]);
    Span p = StripNoise(a.first(k));
    Span q = StripNoise(a.subspan(k + 1));
    if (p.empty() && q.empty()) {
      return InsertGuide(Words{}, "say the words to insert and the anchor");
    }
    if (IsDeictic(p)) return InsertGuide(Words{}, "say the words to insert");
    std::optional<ArgValue> anchor;
    if (IsDeictic(q)) {
      if (selection_.empty()) {
        return SelectFirst(ToWords(p), "nothing is selected for '" + Join(q) + "'");
      }
      Note(RepairCategory::kAddDeictic, q);
      anchor = Phrase{selection_};
    } else if (!q.empty()) {
      anchor = Phrase{ToWords(q)};
    }
    if (p.empty()) {
      ctx_arg_ = anchor;
      return Ask(ComponentKind::kCmdArg);
    }
    if (!anchor) {
      if (selection_.empty()) {
        cmd_arg_ = Phrase{ToWords(p)};
        return Ask(ComponentKind::kCtxArg);
      }
      Note(RepairCategory::kMissingArgs, a.subspan(k, 1));
      anchor = Phrase{selection_};
    }
    return Finish(Phrase{ToWords(p)}, ctx_, anchor);
  }

  NormalizationResult ReplaceCmd(Span a) {
    if (FindFirst(a, [](const std::string& w) { return w == "before" || w == "after"; }) <
        a.size()) {
      return SuggestOne("REPLACE <phrase> WITH <phrase>", "replace takes WITH");
    }
    size_t k = FindFirst(a, [](const std::string& w) { return w == "with"; });
    size_t klen = k < a.size() ? 1 : 0;
    if (k == a.size()) {
      for (size_t i = 0; i < a.size(); ++i) {
        if (size_t n = MatchPrefix(lex_.with_synonyms, a.subspan(i))) {
          Note(RepairCategory::kSubstituteCtx, a.subspan(i, n));
          k = i;
          klen = n;
          break;
        }
      }
    }
    ctx_ = ContextKeyword::kWith;
    Span p = StripNoise(a.first(k));
    std::optional<ArgValue> target;
    if (IsDeictic(p)) {
      if (selection_.empty()) {
        return SelectFirst(Words{}, "nothing is selected for '" + Join(p) + "'");
      }
      Note(RepairCategory::kAddDeictic, p);
      target = Phrase{selection_};
    } else if (!p.empty()) {
      target = Phrase{ToWords(p)};
    }
    if (k == a.size()) {
      // "replace apple": the replacement is missing.
      if (!target) {
        if (selection_.empty()) {
          return SuggestOne("REPLACE <phrase> WITH <phrase>",
                            "say what to replace and the new words");
        }
        Note(RepairCategory::kMissingArgs, verb_);
        target = Phrase{selection_};
      }
      cmd_arg_ = target;
      return Ask(ComponentKind::kCtxArg);
    }
    Span q = StripNoise(a.subspan(k + klen));
    if (IsDeictic(q)) {
      return SuggestOne("REPLACE <phrase> WITH <phrase>", "say the new words");
    }
    if (!target) {
      if (q.empty()) {
        return SuggestOne("REPLACE <phrase> WITH <phrase>",
                          "say what to replace and the new words");
      }
      if (selection_.empty()) {
        ctx_arg_ = Phrase{ToWords(q)};
        return Ask(ComponentKind::kCmdArg);
      }
      Note(RepairCategory::kMissingArgs, a.subspan(k, klen));
      target = Phrase{selection_};
    }
    if (q.empty()) {
      cmd_arg_ = target;
      return Ask(ComponentKind::kCtxArg);
    }
    return Finish(*target, ContextKeyword::kWith, Phrase{ToWords(q)});
  }

  NormalizationResult MoveCmd(Span a) {
    size_t k = FindFirst(a, [](const std::string& w) {
      return w == "before" || w == "after";
    });
    if (a.empty() || k != 0) {
      return Suggest{{Suggestion{"MOVE BEFORE <phrase>", "move only names an anchor"},
                      Suggestion{"MOVE AFTER <phrase>", "move only names an anchor"}}};
    }
    ctx_ = *ContextFromKeyword(a[0]);
    Span q = StripNoise(a.subspan(1));
    if (q.empty()) {
      if (selection_.empty()) return Ask(ComponentKind::kCtxArg);
      Note(RepairCategory::kMissingArgs, a.first(1));
      return Finish(std::nullopt, ctx_, Phrase{selection_});
    }
    if (IsDeictic(q)) {
      if (selection_.empty()) {
        return SelectFirst(Words{}, "nothing is selected for '" + Join(q) + "'");
      }
      Note(RepairCategory::kAddDeictic, q);
      return Finish(std::nullopt, ctx_, Phrase{selection_});
    }
    return Finish(std::nullopt, ctx_, Phrase{ToWords(q)});
  }

  NormalizationResult Finish(std::optional<ArgValue> cmd_arg,
                             std::optional<ContextKeyword> ctx = std::nullopt,
                             std::optional<ArgValue> ctx_arg = std::nullopt) {
    auto cmd = Command::Create(op_, std::move(cmd_arg), ctx, std::move(ctx_arg));
    if (!cmd.ok()) return TemplateGuide(cmd.error());
    int confidence = Confidence(trace_, lex_);
    if (confidence < lex_.threshold) {
      return SuggestOne(SerializeCanonical(*cmd),
                        "low confidence (" + std::to_string(confidence) + ")");
    }
    return Corrected{std::move(cmd).value(), confidence, std::move(trace_)};
  }

  NormalizationResult Ask(ComponentKind missing) {
    // The known slots must be valid once the missing one is filled.
    std::optional<ArgValue> probe = op_ == Operation::kChoose
                                        ? ArgValue{Number{1}}
                                        : ArgValue{Phrase{{"x"}}};
    auto check = Command::Create(op_, missing == ComponentKind::kCmdArg ? probe : cmd_arg_,
                                 ctx_, missing == ComponentKind::kCtxArg ? probe : ctx_arg_);
    if (!check.ok()) return TemplateGuide(check.error());
    PartialCommand partial{op_, cmd_arg_, ctx_, ctx_arg_, missing, "", trace_};
    partial.question = QuestionFor(partial, lex_);
    return Clarify{partial.question, std::move(partial)};
  }

  NormalizationResult InsertGuide(const Words& p, std::string reason) {
    std::string what = p.empty() ? "<phrase>" : Join(p);
    return Suggest{{Suggestion{"INSERT " + what + " BEFORE <phrase>", reason},
                    Suggestion{"INSERT " + what + " AFTER <phrase>", reason}}};
  }

  NormalizationResult SelectFirst(const Words& p, std::string reason) {
    Suggest s;
    s.suggestions.push_back({"SELECT <phrase>", reason + "; select the text first"});
    std::string kw(OperationKeyword(op_));
    if (op_ == Operation::kInsert) {
      std::string what = p.empty() ? "<phrase>" : Join(p);
      s.suggestions.push_back(
          {"INSERT " + what + " " + std::string(ContextKeywordText(ctx_.value_or(
                                        ContextKeyword::kBefore))) + " <phrase>",
           "or name the anchor"});
    } else if (op_ == Operation::kReplace) {
      s.suggestions.push_back({"REPLACE <phrase> WITH <phrase>", "or name the target"});
    } else {
      s.suggestions.push_back({kw + " " +
                                   std::string(ContextKeywordText(ctx_.value_or(
                                       ContextKeyword::kBefore))) + " <phrase>",
                               "or name the anchor"});
    }
    return s;
  }

  NormalizationResult UnknownVerb(Span rest) {
    const std::string reason = "'" + rest[0] + "' is not a command word";
    Span p = StripNoise(rest.subspan(1));
    if (p.empty() || !Command::Create(Operation::kSelect, Phrase{ToWords(p)}).ok()) {
      return TemplateGuide(reason);
    }
    const std::string w = Join(p);
    return Suggest{{Suggestion{"SELECT " + w, reason},
                    Suggestion{"CORRECT " + w, reason},
                    Suggestion{"DELETE " + w, reason},
                    Suggestion{"REPLACE " + w + " WITH <phrase>", reason}}};
  }

  NormalizationResult TemplateGuide(std::string reason) {
    Suggest s;
    for (const char* t : {"SELECT <phrase>", "CHOOSE <number>", "DELETE <phrase>",
                          "INSERT <phrase> BEFORE <phrase>",
                          "REPLACE <phrase> WITH <phrase>", "CORRECT <phrase>",
                          "UNDO THAT"}) {
      s.suggestions.push_back({t, reason});
    }
    return s;
  }

  const Lexicon& lex_;
  const std::vector<std::string>& history_;
  Words selection_;
  Words tokens_;
  RepairTrace trace_;
  Operation op_ = Operation::kSelect;
  Span verb_;
  std::optional<ArgValue> cmd_arg_;
  std::optional<ContextKeyword> ctx_;
  std::optional<ArgValue> ctx_arg_;

 public:
  static std::string QuestionFor(const PartialCommand& p, const Lexicon& lex) {
    std::string key = std::string(OperationName(p.op)) + "." +
                      (p.missing == ComponentKind::kCmdArg ? "cmd_arg" : "ctx_arg");
    auto it = lex.questions.find(key);
    std::string q = it != lex.questions.end()
                        ? it->second
                        : "What should I " + std::string(OperationName(p.op)) + "?";
    q = Replace(q, "{phrase}", ArgText(p.cmd_arg));
    q = Replace(q, "{anchor}", ArgText(p.ctx_arg));
    q = Replace(q, "{ctx}", p.ctx ? ToLower(ContextKeywordText(*p.ctx)) : "");
    return Join(SplitWords(q));
  }
};

}  // namespace

int Confidence(const RepairTrace& trace, const Lexicon& lexicon) {
  std::set<RepairCategory> seen;
  int score = 100;
  for (const Repair& r : trace) {
    if (seen.insert(r.category).second) score -= lexicon.Penalty(r.category);
  }
  return std::max(score, 0);
}

std::optional<Command> RelayableCommand(const NormalizationResult& r) {
  if (const auto* c = std::get_if<Corrected>(&r)) return c->command;
  if (const auto* p = std::get_if<PassThrough>(&r)) return p->command;
  return std::nullopt;
}

std::string_view ResultKindName(const NormalizationResult& r) {
  constexpr std::string_view kNames[] = {"corrected", "clarify", "suggest",
                                         "pass_through"};
  return kNames[r.index()];
}

std::string PredictionText(const NormalizationResult& r) {
  if (auto cmd = RelayableCommand(r)) return SerializeCanonical(*cmd);
  if (const auto* c = std::get_if<Clarify>(&r)) return "ASK: " + c->question;
  return "";
}

RuleBackend::RuleBackend(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

NormalizationResult RuleBackend::Normalize(const NormalizeRequest& request) const {
  return Pipeline(lexicon_, request).Run();
}

NormalizationResult RuleBackend::ApplyClarification(const PartialCommand& partial,
                                                    const Words& answer) const {
  Words toks = TokenizeUtterance(Join(answer));
  if (toks.empty()) throw std::invalid_argument("clarification answer is empty");
  Span a(toks);
  while (size_t n = MatchPrefix(lexicon_.fillers, a)) {
    if (n >= a.size()) break;
    a = a.subspan(n);
  }
  bool is_command = OperationFromKeyword(a[0]).has_value();
  for (const auto& [syn, op] : lexicon_.command_synonyms) {
    is_command = is_command || (syn.size() <= a.size() &&
                                std::equal(syn.begin(), syn.end(), a.begin()));
  }
  if (is_command) {
    return SuggestOne(Join(a), "that sounds like a new command; the question was dropped");
  }
  size_t n = MatchPrefix(lexicon_.noise, a);
  if (n > 0 && n < a.size()) a = a.subspan(n);

  PartialCommand p = partial;
  std::optional<ArgValue> fill;
  if (p.op == Operation::kChoose) {
    auto num = a.size() == 1 ? ParseNumberToken(a[0]) : std::nullopt;
    if (!num) return SuggestOne("CHOOSE <number>", "the answer should be a number");
    fill = Number{*num};
  } else if (MatchWhole(lexicon_.deictic, a)) {
    return SuggestOne("SELECT <phrase>", "say the words rather than 'that'");
  } else {
    fill = Phrase{Words(a.begin(), a.end())};
  }
  if (p.missing == ComponentKind::kCmdArg) {
    p.cmd_arg = fill;
  } else {
    p.ctx_arg = fill;
  }
  auto cmd = Command::Create(p.op, p.cmd_arg, p.ctx, p.ctx_arg);
  if (!cmd.ok()) return SuggestOne(p.question, "the answer does not fit: " + cmd.error());
  RepairTrace trace = p.trace;
  trace.push_back(Repair{RepairCategory::kMissingArgs, Words(a.begin(), a.end())});
  int confidence = Confidence(trace, lexicon_);
  if (confidence < lexicon_.threshold) {
    return SuggestOne(SerializeCanonical(*cmd),
                      "low confidence (" + std::to_string(confidence) + ")");
  }
  return Corrected{std::move(cmd).value(), confidence, std::move(trace)};
}

NormalizationResult EchoBackend::Normalize(const NormalizeRequest& request) const {
  Words toks = TokenizeUtterance(Join(request.utterance));
  auto parsed = ParseCanonical(Span(toks));
  if (parsed.ok()) return PassThrough{std::move(parsed).value()};
  return SuggestOne(Join(toks), "echo");
}

NormalizationResult EchoBackend::ApplyClarification(const PartialCommand& partial,
                                                    const Words& answer) const {
  return SuggestOne(partial.question + " " + Join(answer), "echo");
}

ExternalBackend::ExternalBackend(std::string name, Fn fn, Lexicon lexicon)
    : name_(std::move(name)), fn_(std::move(fn)), fill_(std::move(lexicon)) {}

NormalizationResult ExternalBackend::Normalize(const NormalizeRequest& request) const {
  return fn_(request);
}

NormalizationResult ExternalBackend::ApplyClarification(const PartialCommand& partial,
                                                        const Words& answer) const {
  return fill_.ApplyClarification(partial, answer);
}

std::unique_ptr<NormalizerBackend> MakeBackend(std::string_view name, Lexicon lexicon) {
  if (name == "rule") return std::make_unique<RuleBackend>(std::move(lexicon));
  if (name == "stub") return std::make_unique<EchoBackend>();
  return nullptr;
}

NormalizationResult Normalize(std::string_view utterance, const SelectionContext& ctx,
                              const std::vector<std::string>& history) {
  static const RuleBackend* backend = new RuleBackend();
  return backend->Normalize(NormalizeRequest{SplitWords(utterance), ctx, history});
}

NormalizationResult ApplyClarification(const PartialCommand& partial,
                                       std::string_view answer) {
  static const RuleBackend* backend = new RuleBackend();
  return backend->ApplyClarification(partial, SplitWords(answer));
}

}  // namespace cmdshim
