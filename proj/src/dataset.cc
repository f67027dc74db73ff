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

#include "cmdshim/dataset.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace cmdshim {
namespace {

using Rng = std::mt19937_64;

constexpr std::string_view kSep = " | ";
constexpr std::string_view kSelectionField = "selection:";
constexpr std::string_view kQuestionField = "CLARIFICATION QUESTION: ";
constexpr std::string_view kAnswerField = "CLARIFICATION: ";

// Phrase banks. Entries avoid every word the grammar or the lexicon gives
// meaning to (keywords, fillers, deictics, number words, with stand-ins).
const std::vector<const char*> kFoods = {
    "apple",     "apple pie", "orange",  "banana",       "coffee",
    "green tea", "pancakes",  "cheese",  "fresh bread",  "pasta",
    "salad",     "lemon",     "cookies", "chicken soup", "ice cream",
    "rice"};
const std::vector<const char*> kTimes = {
    "tonight",  "tomorrow",  "at noon",   "in the morning", "on friday",
    "at home",  "at dinner", "on monday", "early",          "at the office"};
const std::vector<const char*> kOffice = {
    "meeting",  "report",       "budget",       "agenda",   "deadline",
    "invoice",  "email",        "project plan", "schedule", "manager",
    "slides",   "sales report", "memo",         "contract", "client call"};

constexpr std::pair<const char*, Operation> kOutOfLexicon[] = {
    {"mark", Operation::kSelect},     {"wipe", Operation::kDelete},
    {"stick", Operation::kInsert},    {"transform", Operation::kReplace},
    {"amend", Operation::kCorrect}};

size_t Below(Rng& rng, size_t n) { return static_cast<size_t>(rng() % n); }
double Unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
const T& PickFrom(Rng& rng, const std::vector<T>& v) {
  return v[Below(rng, v.size())];
}

template <typename T>
void Shuffle(Rng& rng, std::vector<T>& v) {
  for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[Below(rng, i)]);
}

Words BankPhrase(Rng& rng, const std::vector<const char*>& bank) {
  return SplitWords(PickFrom(rng, bank));
}

bool Compatible(Operation op, std::optional<RepairCategory> c) {
  if (!c) return true;
  using O = Operation;
  switch (*c) {
    case RepairCategory::kNaturalUtterance:
      return true;
    case RepairCategory::kSubstituteCmd:
      return op != O::kMove;
    case RepairCategory::kSwapCmd:
      return op == O::kSelect || op == O::kChoose;
    case RepairCategory::kSubstituteCtx:
      return op == O::kSelect || op == O::kReplace;
    case RepairCategory::kSubstituteTemplate:
      return op == O::kInsert || op == O::kDelete || op == O::kCorrect;
    case RepairCategory::kIgnoreDeictic:
      return op == O::kDelete || op == O::kCorrect || op == O::kUndo ||
             op == O::kRedo;
    case RepairCategory::kAddDeictic:
      return op == O::kInsert || op == O::kReplace;
    case RepairCategory::kMissingArgs:
      return op == O::kSelect || op == O::kChoose || op == O::kInsert ||
             op == O::kReplace;
  }
  return false;
}

// Edmonds-Karp on a dense graph; small enough for the op x category net.
class MaxFlow {
 public:
  explicit MaxFlow(size_t n) : cap_(n, std::vector<int64_t>(n, 0)), flow_(cap_) {}
  void AddEdge(size_t u, size_t v, int64_t c) { cap_[u][v] += c; }
  int64_t flow(size_t u, size_t v) const { return flow_[u][v]; }

  int64_t Run(size_t s, size_t t) {
    const size_t n = cap_.size();
    int64_t total = 0;
    while (true) {
      std::vector<size_t> parent(n, n);
      parent[s] = s;
      std::queue<size_t> q;
      q.push(s);
      while (!q.empty() && parent[t] == n) {
        size_t u = q.front();
        q.pop();
        for (size_t v = 0; v < n; ++v) {
          if (parent[v] == n && cap_[u][v] - flow_[u][v] > 0) {
            parent[v] = u;
            q.push(v);
          }
        }
      }
      if (parent[t] == n) return total;
      int64_t push = std::numeric_limits<int64_t>::max();
      for (size_t v = t; v != s; v = parent[v]) {
        push = std::min(push, cap_[parent[v]][v] - flow_[parent[v]][v]);
      }
      for (size_t v = t; v != s; v = parent[v]) {
        flow_[parent[v]][v] += push;
        flow_[v][parent[v]] -= push;
      }
      total += push;
    }
  }

 private:
  std::vector<std::vector<int64_t>> cap_;
  std::vector<std::vector<int64_t>> flow_;
};

// Integer matrix with the given margins over the allowed cells. The cells
// are capped near a proportional fit so every op spreads over its
// compatible categories; the cap is dropped if it makes the plan infeasible.
std::optional<std::vector<std::vector<size_t>>> AssignCells(
    const std::vector<std::vector<bool>>& allowed, const std::vector<size_t>& rows,
    const std::vector<size_t>& cols) {
  const size_t nr = rows.size(), nc = cols.size();
  std::vector<std::vector<double>> x(nr, std::vector<double>(nc, 0.0));
  for (size_t r = 0; r < nr; ++r) {
    for (size_t c = 0; c < nc; ++c) x[r][c] = allowed[r][c] ? 1.0 : 0.0;
  }
  for (int iter = 0; iter < 500; ++iter) {
    for (size_t r = 0; r < nr; ++r) {
      double s = 0;
      for (size_t c = 0; c < nc; ++c) s += x[r][c];
      for (size_t c = 0; c < nc; ++c) x[r][c] = s > 0 ? x[r][c] * rows[r] / s : 0.0;
    }
    for (size_t c = 0; c < nc; ++c) {
      double s = 0;
      for (size_t r = 0; r < nr; ++r) s += x[r][c];
      for (size_t r = 0; r < nr; ++r) x[r][c] = s > 0 ? x[r][c] * cols[c] / s : 0.0;
    }
  }
  size_t total = 0;
  for (size_t v : rows) total += v;
  for (bool capped : {true, false}) {
    const size_t s = 0, t = 1 + nr + nc;
    MaxFlow mf(t + 1);
    for (size_t r = 0; r < nr; ++r) mf.AddEdge(s, 1 + r, static_cast<int64_t>(rows[r]));
    for (size_t c = 0; c < nc; ++c) mf.AddEdge(1 + nr + c, t, static_cast<int64_t>(cols[c]));
    for (size_t r = 0; r < nr; ++r) {
      for (size_t c = 0; c < nc; ++c) {
        if (!allowed[r][c]) continue;
        int64_t cap = capped ? static_cast<int64_t>(std::ceil(x[r][c] - 1e-9))
                             : static_cast<int64_t>(total);
        mf.AddEdge(1 + r, 1 + nr + c, cap);
      }
    }
    if (static_cast<size_t>(mf.Run(s, t)) != total) continue;
    std::vector<std::vector<size_t>> cells(nr, std::vector<size_t>(nc, 0));
    for (size_t r = 0; r < nr; ++r) {
      for (size_t c = 0; c < nc; ++c) {
        cells[r][c] = static_cast<size_t>(std::max<int64_t>(0, mf.flow(1 + r, 1 + nr + c)));
      }
    }
    return cells;
  }
  return std::nullopt;
}

std::string FormatQuestion(const Lexicon& lex, Operation op, ComponentKind missing,
                           const Words& phrase, std::optional<ContextKeyword> ctx,
                           const Words& anchor) {
  std::string key = std::string(OperationName(op)) +
                    (missing == ComponentKind::kCmdArg ? ".cmd_arg" : ".ctx_arg");
  auto it = lex.questions.find(key);
  std::string q = it != lex.questions.end()
                      ? it->second
                      : "What should I " + std::string(OperationName(op)) + "?";
  auto sub = [&q](std::string_view from, const std::string& to) {
    for (size_t pos = q.find(from); pos != std::string::npos; pos = q.find(from, pos + to.size())) {
      q.replace(pos, from.size(), to);
    }
  };
  sub("{phrase}", Join(phrase));
  sub("{anchor}", Join(anchor));
  sub("{ctx}", ctx ? ToLower(ContextKeywordText(*ctx)) : "");
  return Join(SplitWords(q));
}

enum class SelMode { kForbidden, kOptional, kRequired };

struct Draft {
  DatasetSample sample;
  SelMode sel = SelMode::kOptional;
};

// Builds utterances for one split from per-operation command pools.
class SplitBuilder {
 public:
  SplitBuilder(const DistributionSpec& spec, const Lexicon& lex, uint64_t seed)
      : spec_(spec), lex_(lex), rng_(seed) {
    for (const auto& [words, op] : lex_.command_synonyms) synonyms_[op].push_back(Join(words));
    for (auto& [op, v] : synonyms_) std::sort(v.begin(), v.end());
    for (const Words& f : lex_.fillers) {
      if (f.size() > 1 || f[0] != "please") fillers_.push_back(Join(f));
    }
    std::sort(fillers_.begin(), fillers_.end());
    for (const Words& d : lex_.deictic) {
      if (d.size() == 1) short_deictics_.push_back(d[0]);
      else long_deictics_.push_back(Join(d));
    }
    std::sort(short_deictics_.begin(), short_deictics_.end());
    std::sort(long_deictics_.begin(), long_deictics_.end());
    // Alternatives that already read as a canonical phrase ("select last
    // word") pass through untouched, so they cannot stand for a repair.
    auto repairable = [](const Words& w) {
      return !ParseCanonical("select " + Join(w)).ok();
    };
    for (const Words& w : lex_.previous_word) {
      if (repairable(w)) prev_alts_.push_back(Join(w));
    }
    for (const Words& w : lex_.next_word) {
      if (repairable(w)) next_alts_.push_back(Join(w));
    }
    std::sort(prev_alts_.begin(), prev_alts_.end());
    std::sort(next_alts_.begin(), next_alts_.end());
    for (const Words& w : lex_.with_synonyms) with_alts_.push_back(Join(w));
    std::sort(with_alts_.begin(), with_alts_.end());
  }

  std::vector<DatasetSample> Build(const SplitPlan& plan) {
    const size_t nb = spec_.error_weights.size();
    struct Slot {
      Operation op;
      std::optional<RepairCategory> cat;
      bool ool = false;
    };
    std::vector<Slot> slots;
    for (size_t o = 0; o < plan.cells.size(); ++o) {
      Operation op = spec_.op_weights[o].first;
      for (size_t c = 0; c <= nb; ++c) {
        std::optional<RepairCategory> cat;
        if (c > 0) cat = spec_.error_weights[c - 1].first;
        for (size_t k = 0; k < plan.cells[o][c]; ++k) slots.push_back({op, cat});
      }
    }
    Shuffle(rng_, slots);

    size_t sub_cmd = 0;
    std::vector<size_t> eligible;
    for (size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].cat != RepairCategory::kSubstituteCmd) continue;
      ++sub_cmd;
      if (OutOfLexiconVerb(slots[i].op)) eligible.push_back(i);
    }
    Shuffle(rng_, eligible);
    size_t quota = std::min(eligible.size(), static_cast<size_t>(std::llround(
                                                 spec_.out_of_lexicon_share * sub_cmd)));
    for (size_t k = 0; k < quota; ++k) slots[eligible[k]].ool = true;

    std::map<Operation, size_t> op_counts;
    for (const Slot& s : slots) ++op_counts[s.op];
    for (const auto& [op, n] : op_counts) pools_[op] = MakePool(op, n);

    std::vector<Draft> drafts;
    drafts.reserve(slots.size());
    for (const Slot& s : slots) drafts.push_back(Make(s.op, s.cat, s.ool));
    AssignSelections(drafts);

    std::vector<DatasetSample> out;
    out.reserve(drafts.size());
    for (Draft& d : drafts) out.push_back(std::move(d.sample));
    return out;
  }

 private:
  static const char* OutOfLexiconVerb(Operation op) {
    for (const auto& [verb, o] : kOutOfLexicon) {
      if (o == op) return verb;
    }
    return nullptr;
  }

  Words AnyPhrase() {
    switch (Below(rng_, 3)) {
      case 0:
        return BankPhrase(rng_, kFoods);
      case 1:
        return BankPhrase(rng_, kTimes);
      default:
        return BankPhrase(rng_, kOffice);
    }
  }
  Words Target() { return Below(rng_, 2) ? BankPhrase(rng_, kFoods) : BankPhrase(rng_, kOffice); }
  Words Different(const Words& other, const std::vector<const char*>& bank) {
    Words w;
    do {
      w = BankPhrase(rng_, bank);
    } while (w == other);
    return w;
  }

  std::vector<Command> MakePool(Operation op, size_t n) {
    size_t size = std::max<size_t>(2, (n + 5) / 6);
    std::vector<Command> pool;
    auto add = [&pool](Command c) {
      if (std::find(pool.begin(), pool.end(), c) == pool.end()) pool.push_back(std::move(c));
    };
    switch (op) {
      case Operation::kSelect:
        add(Command::SelectRelative(Direction::kPrevious));
        add(Command::SelectRelative(Direction::kNext));
        break;
      case Operation::kChoose:
        for (int k = 1; k <= static_cast<int>(std::min<size_t>(size, 9)); ++k) add(Command::Choose(k));
        return pool;
      case Operation::kDelete:
        add(Command::DeleteThat());
        break;
      case Operation::kCorrect:
        add(Command::CorrectThat());
        break;
      case Operation::kUndo:
        return {Command::Undo()};
      case Operation::kRedo:
        return {Command::Redo()};
      default:
        break;
    }
    // At least two phrase commands, so every category has something to fit.
    size = std::max(size, pool.size() + 2);
    for (int attempts = 0; pool.size() < size && attempts < 1000; ++attempts) {
      switch (op) {
        case Operation::kSelect:
          add(Command::Select(Target()));
          break;
        case Operation::kDelete:
          add(Command::Delete(Target()));
          break;
        case Operation::kCorrect:
          add(Command::Correct(Target()));
          break;
        case Operation::kInsert: {
          Words p = Below(rng_, 2) ? BankPhrase(rng_, kTimes) : BankPhrase(rng_, kFoods);
          Words q = Different(p, Below(rng_, 2) ? kFoods : kOffice);
          auto where = pool.size() % 2 ? ContextKeyword::kAfter : ContextKeyword::kBefore;
          add(Command::Insert(p, where, q));
          break;
        }
        case Operation::kReplace: {
          const auto& bank = Below(rng_, 2) ? kFoods : kOffice;
          Words p = BankPhrase(rng_, bank);
          add(Command::Replace(p, Different(p, bank)));
          break;
        }
        case Operation::kMove:
          add(Command::Move(Below(rng_, 2) ? ContextKeyword::kAfter : ContextKeyword::kBefore,
                            Target()));
          break;
        default:
          break;
      }
    }
    return pool;
  }

  // Whether a pool command can be phrased in the given category.
  static bool Fits(const Command& cmd, std::optional<RepairCategory> cat, bool ool) {
    const bool relative = cmd.cmd_arg() && std::holds_alternative<RelativeWord>(*cmd.cmd_arg());
    const bool deictic = cmd.cmd_arg() && std::holds_alternative<Deictic>(*cmd.cmd_arg());
    if (!cat) return true;
    switch (cmd.op()) {
      case Operation::kSelect:
        if (cat == RepairCategory::kSubstituteCtx) return relative;
        if (cat == RepairCategory::kMissingArgs || ool) return !relative;
        return true;
      case Operation::kDelete:
      case Operation::kCorrect:
        if (cat == RepairCategory::kIgnoreDeictic) return deictic;
        if (cat == RepairCategory::kSubstituteTemplate) return !deictic;
        return true;
      case Operation::kInsert:
        if (cat == RepairCategory::kSubstituteTemplate) return cmd.ctx() == ContextKeyword::kBefore;
        return true;
      default:
        return true;
    }
  }

  std::string Filler() { return PickFrom(rng_, fillers_); }

  Words Prefix(bool natural) {
    Words w;
    if (natural) {
      for (auto& f : SplitWords(Filler())) w.push_back(f);
      if (Below(rng_, 3) == 0) w.push_back("please");
    }
    return w;
  }

  static void Append(Words& w, const Words& more) { w.insert(w.end(), more.begin(), more.end()); }
  static void Append(Words& w, std::string_view more) { Append(w, SplitWords(more)); }

  // Canonical argument words after the verb, lowercased.
  static Words ArgsOf(const Command& cmd) {
    Words all = SplitWords(SerializeCanonical(cmd));
    Words out;
    for (size_t i = 1; i < all.size(); ++i) out.push_back(ToLower(all[i]));
    return out;
  }

  Draft Make(Operation op, std::optional<RepairCategory> cat, bool ool) {
    std::vector<const Command*> fit;
    for (const Command& c : pools_[op]) {
      if (Fits(c, cat, ool)) fit.push_back(&c);
    }
    if (fit.empty()) throw std::logic_error("no pool command fits the requested category");
    const Command& cmd = *fit[Below(rng_, fit.size())];
    Draft d;
    d.sample.op = op;
    d.sample.category = cat;
    d.sample.expected = SerializeCanonical(cmd);
    const std::string verb = ToLower(OperationKeyword(op));
    const Words* phrase = PhraseWords(cmd.cmd_arg());
    const Words* anchor = PhraseWords(cmd.ctx_arg());
    const bool deictic = cmd.cmd_arg() && std::holds_alternative<Deictic>(*cmd.cmd_arg());
    Words u;

    if (!cat) {
      u = ArgsOf(cmd);
      u.insert(u.begin(), verb);
    } else {
      switch (*cat) {
        case RepairCategory::kNaturalUtterance:
          u = Natural(cmd, verb, d);
          break;
        case RepairCategory::kSubstituteCmd:
        case RepairCategory::kSwapCmd: {
          const bool swap = *cat == RepairCategory::kSwapCmd ||
                            (!ool && (op == Operation::kSelect || op == Operation::kChoose) &&
                             !BucketOf(spec_, RepairCategory::kSwapCmd) &&
                             Unit(rng_) < spec_.swap_share);
          u = Prefix(Below(rng_, 4) == 0);
          if (swap) {
            d.sample.category = RepairCategory::kSwapCmd;
            u.push_back(op == Operation::kSelect ? "choose" : "select");
          } else if (ool) {
            u.push_back(OutOfLexiconVerb(op));
          } else {
            Append(u, PickFrom(rng_, synonyms_[op]));
          }
          Append(u, ArgsOf(cmd));
          if (deictic) d.sel = SelMode::kRequired;
          break;
        }
        case RepairCategory::kSubstituteCtx:
          u = Prefix(Below(rng_, 4) == 0);
          u.push_back(verb);
          if (op == Operation::kSelect) {
            const auto dir = std::get<RelativeWord>(*cmd.cmd_arg()).direction;
            Append(u, PickFrom(rng_, dir == Direction::kPrevious ? prev_alts_ : next_alts_));
          } else {
            Append(u, *phrase);
            Append(u, PickFrom(rng_, with_alts_));
            Append(u, *anchor);
          }
          break;
        case RepairCategory::kSubstituteTemplate:
          u.push_back(verb);
          Append(u, *phrase);
          if (op == Operation::kInsert) {
            d.sample.input.selection = Join(*anchor);
            d.sel = SelMode::kRequired;
          } else {
            u.push_back(Below(rng_, 2) ? "before" : "after");
            Append(u, Different(*phrase, Below(rng_, 2) ? kFoods : kOffice));
          }
          break;
        case RepairCategory::kIgnoreDeictic:
          u.push_back(verb);
          if (op == Operation::kDelete || op == Operation::kCorrect) d.sel = SelMode::kRequired;
          break;
        case RepairCategory::kAddDeictic:
          u = Prefix(Below(rng_, 4) == 0);
          u.push_back(verb);
          if (op == Operation::kInsert) {
            Append(u, *phrase);
            u.push_back(ToLower(ContextKeywordText(*cmd.ctx())));
            u.push_back(PickFrom(rng_, short_deictics_));
            d.sample.input.selection = Join(*anchor);
          } else {
            u.push_back(PickFrom(rng_, short_deictics_));
            u.push_back("with");
            Append(u, *anchor);
            d.sample.input.selection = Join(*phrase);
          }
          d.sel = SelMode::kRequired;
          break;
        case RepairCategory::kMissingArgs:
          u = MissingArgs(cmd, verb, d);
          break;
      }
    }
    d.sample.input.utterance = Join(u);
    return d;
  }

  Words Natural(const Command& cmd, const std::string& verb, Draft& d) {
    const Operation op = cmd.op();
    Words u = Prefix(true);
    u.push_back(verb);
    const auto& arg = cmd.cmd_arg();
    if (op == Operation::kSelect && std::holds_alternative<RelativeWord>(*arg)) {
      if (Below(rng_, 2)) u.push_back("the");
      Append(u, ArgsOf(cmd));
    } else if (op == Operation::kChoose) {
      if (Below(rng_, 2)) u.push_back("number");
      Append(u, ArgsOf(cmd));
    } else if ((op == Operation::kDelete || op == Operation::kCorrect) &&
               std::holds_alternative<Deictic>(*arg)) {
      const bool long_form = Below(rng_, 2);
      u.push_back(long_form ? PickFrom(rng_, long_deictics_) : PickFrom(rng_, short_deictics_));
      d.sel = SelMode::kRequired;
    } else if ((op == Operation::kSelect || op == Operation::kDelete ||
                op == Operation::kCorrect) &&
               Below(rng_, 2)) {
      const Words& p = *PhraseWords(arg);
      Append(u, p.size() == 1 ? "the word" : "the phrase");
      Append(u, p);
    } else {
      Append(u, ArgsOf(cmd));
    }
    return u;
  }

  // Ask-only, follow-up, or (insert and replace) filled from the selection.
  Words MissingArgs(const Command& cmd, const std::string& verb, Draft& d) {
    const Operation op = cmd.op();
    const size_t variants = op == Operation::kInsert || op == Operation::kReplace ? 3 : 2;
    const size_t variant = missing_seen_[op]++ % variants;
    const Words* phrase = PhraseWords(cmd.cmd_arg());
    const Words* anchor = PhraseWords(cmd.ctx_arg());
    const std::string ctx = cmd.ctx() ? ToLower(ContextKeywordText(*cmd.ctx())) : "";
    Words u{verb};

    if (variant == 2) {
      if (op == Operation::kInsert) {
        Append(u, *phrase);
        u.push_back(ctx);
        d.sample.input.selection = Join(*anchor);
      } else {
        u.push_back("with");
        Append(u, *anchor);
        d.sample.input.selection = Join(*phrase);
      }
      d.sel = SelMode::kRequired;
      return u;
    }

    d.sel = SelMode::kForbidden;
    std::string question;
    std::string answer;
    switch (op) {
      case Operation::kSelect:
        question = FormatQuestion(lex_, op, ComponentKind::kCmdArg, {}, std::nullopt, {});
        answer = Join(*phrase);
        break;
      case Operation::kChoose:
        question = FormatQuestion(lex_, op, ComponentKind::kCmdArg, {}, std::nullopt, {});
        answer = ArgsOf(cmd)[0];
        break;
      case Operation::kInsert:
        if (Below(rng_, 2)) {
          u.push_back(ctx);
          Append(u, *anchor);
          question = FormatQuestion(lex_, op, ComponentKind::kCmdArg, {}, cmd.ctx(), *anchor);
          answer = Join(*phrase);
        } else {
          Append(u, *phrase);
          u.push_back(ctx);
          question = FormatQuestion(lex_, op, ComponentKind::kCtxArg, *phrase, cmd.ctx(), {});
          answer = Join(*anchor);
        }
        break;
      case Operation::kReplace:
        if (Below(rng_, 2)) {
          u.push_back("with");
          Append(u, *anchor);
          question = FormatQuestion(lex_, op, ComponentKind::kCmdArg, {}, ContextKeyword::kWith,
                                    *anchor);
          answer = Join(*phrase);
        } else {
          Append(u, *phrase);
          if (Below(rng_, 2)) u.push_back("with");
          question = FormatQuestion(lex_, op, ComponentKind::kCtxArg, *phrase,
                                    ContextKeyword::kWith, {});
          answer = Join(*anchor);
        }
        break;
      default:
        break;
    }
    if (variant == 0) {
      d.sample.expected = std::string(kAskPrefix) + question;
    } else {
      d.sample.input.question = question;
      d.sample.input.answer = answer;
    }
    return u;
  }

  // Tops the selection share up to the target with the samples that do not
  // care whether something is selected.
  void AssignSelections(std::vector<Draft>& drafts) {
    const size_t target =
        static_cast<size_t>(std::llround(spec_.selection_ratio * drafts.size()));
    size_t have = 0;
    std::vector<size_t> optional;
    for (size_t i = 0; i < drafts.size(); ++i) {
      Draft& d = drafts[i];
      if (d.sel == SelMode::kRequired) {
        if (d.sample.input.selection.empty()) d.sample.input.selection = Join(Target());
        ++have;
      } else if (d.sel == SelMode::kOptional) {
        optional.push_back(i);
      }
    }
    Shuffle(rng_, optional);
    for (size_t k = 0; k < optional.size() && have < target; ++k, ++have) {
      drafts[optional[k]].sample.input.selection = Join(AnyPhrase());
    }
  }

  const DistributionSpec& spec_;
  const Lexicon& lex_;
  Rng rng_;
  std::map<Operation, std::vector<Command>> pools_;
  std::map<Operation, std::vector<std::string>> synonyms_;
  std::map<Operation, size_t> missing_seen_;
  std::vector<std::string> fillers_;
  std::vector<std::string> short_deictics_;
  std::vector<std::string> long_deictics_;
  std::vector<std::string> prev_alts_;
  std::vector<std::string> next_alts_;
  std::vector<std::string> with_alts_;
};

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::string CategoryName(const std::optional<RepairCategory>& category) {
  return category ? std::string(RepairCategoryName(*category)) : std::string(kExactCategoryName);
}

std::string DatasetError::ToString() const {
  constexpr std::string_view kKinds[] = {"infeasible spec", "io error", "malformed record"};
  std::string out(kKinds[static_cast<size_t>(kind)]);
  if (line > 0) out += " at line " + std::to_string(line);
  return out + ": " + message;
}

std::string EncodeInput(const SampleInput& input) {
  std::string out = input.utterance;
  out += kSep;
  out += kSelectionField;
  if (!input.selection.empty()) out += " " + input.selection;
  if (input.question) {
    out += std::string(kSep) + std::string(kQuestionField) + *input.question;
    out += std::string(kSep) + std::string(kAnswerField) + input.answer.value_or("");
  }
  return out;
}

Result<SampleInput, std::string> DecodeInput(std::string_view encoded) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    size_t pos = encoded.find(kSep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(encoded.substr(start));
      break;
    }
    parts.push_back(encoded.substr(start, pos - start));
    start = pos + kSep.size();
  }
  if (parts.size() != 2 && parts.size() != 4) {
    return "expected 2 or 4 fields, got " + std::to_string(parts.size());
  }
  SampleInput in;
  in.utterance = std::string(parts[0]);
  if (in.utterance.empty()) return std::string("empty utterance");
  if (!StartsWith(parts[1], kSelectionField)) return std::string("missing selection field");
  std::string_view sel = parts[1].substr(kSelectionField.size());
  if (!sel.empty()) {
    if (sel[0] != ' ' || sel.size() == 1) return std::string("malformed selection field");
    sel.remove_prefix(1);
  }
  in.selection = std::string(sel);
  if (parts.size() == 4) {
    if (!StartsWith(parts[2], kQuestionField)) return std::string("missing clarification question");
    if (!StartsWith(parts[3], kAnswerField)) return std::string("missing clarification answer");
    in.question = std::string(parts[2].substr(kQuestionField.size()));
    in.answer = std::string(parts[3].substr(kAnswerField.size()));
  }
  return in;
}

DistributionSpec DistributionSpec::Default() {
  DistributionSpec s;
  s.op_weights = {{Operation::kCorrect, 0.185}, {Operation::kSelect, 0.176},
                  {Operation::kReplace, 0.169}, {Operation::kInsert, 0.137},
                  {Operation::kDelete, 0.116},  {Operation::kChoose, 0.098},
                  {Operation::kUndo, 0.062},    {Operation::kRedo, 0.058}};
  const double merged = 0.154 / 3.0;
  s.error_weights = {{RepairCategory::kSubstituteTemplate, 0.385},
                     {RepairCategory::kNaturalUtterance, 0.213},
                     {RepairCategory::kSubstituteCmd, 0.177},
                     {RepairCategory::kMissingArgs, merged},
                     {RepairCategory::kAddDeictic, merged},
                     {RepairCategory::kIgnoreDeictic, merged},
                     {RepairCategory::kSubstituteCtx, 0.071}};
  return s;
}

std::optional<DatasetError> DistributionSpec::Validate() const {
  auto bad = [](std::string m) {
    return DatasetError{DatasetError::Kind::kInfeasibleSpec, std::move(m)};
  };
  auto check = [&](auto&& weights, const char* what) -> std::optional<DatasetError> {
    double sum = 0;
    for (const auto& [k, w] : weights) {
      if (!(w >= 0) || !std::isfinite(w)) return bad(std::string(what) + " weight is negative");
      sum += w;
    }
    if (weights.empty() || sum <= 0) return bad(std::string(what) + " weights are empty");
    return std::nullopt;
  };
  if (auto e = check(op_weights, "operation")) return e;
  if (auto e = check(error_weights, "error category")) return e;
  std::set<Operation> ops;
  for (const auto& [op, w] : op_weights) {
    if (!ops.insert(op).second) return bad("operation listed twice");
  }
  std::set<RepairCategory> cats;
  for (const auto& [c, w] : error_weights) {
    if (!cats.insert(c).second) return bad("error category listed twice");
  }
  for (double v : {exact_share, selection_ratio, out_of_lexicon_share, swap_share}) {
    if (!(v >= 0 && v <= 1)) return bad("shares must lie in [0, 1]");
  }
  if (train == 0 || val == 0 || test == 0) return bad("split sizes must be positive");
  return std::nullopt;
}

std::span<const std::pair<const char*, Operation>> OutOfLexiconVerbs() { return kOutOfLexicon; }

std::vector<size_t> Apportion(std::span<const double> weights, size_t total) {
  double sum = 0;
  for (double w : weights) sum += w;
  std::vector<size_t> out(weights.size(), 0);
  if (weights.empty() || sum <= 0) return out;
  std::vector<std::pair<double, size_t>> rem;
  size_t given = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    double quota = weights[i] / sum * static_cast<double>(total);
    double fl = std::floor(quota + 1e-9);
    out[i] = static_cast<size_t>(fl);
    given += out[i];
    // Rounded so that remainders equal up to float noise tie.
    rem.emplace_back(std::round(std::max(0.0, quota - fl) * 1e9) / 1e9, i);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t k = 0; given < total; ++k, ++given) ++out[rem[k % rem.size()].second];
  return out;
}

std::optional<size_t> BucketOf(const DistributionSpec& spec, RepairCategory c) {
  auto find = [&spec](RepairCategory x) -> std::optional<size_t> {
    for (size_t i = 0; i < spec.error_weights.size(); ++i) {
      if (spec.error_weights[i].first == x) return i;
    }
    return std::nullopt;
  };
  if (auto b = find(c)) return b;
  if (c == RepairCategory::kSwapCmd) return find(RepairCategory::kSubstituteCmd);
  return std::nullopt;
}

Result<SplitPlan, DatasetError> PlanSplit(const DistributionSpec& spec, size_t size) {
  if (auto e = spec.Validate()) return *e;
  SplitPlan plan;
  std::vector<double> ow;
  for (const auto& [op, w] : spec.op_weights) ow.push_back(w);
  plan.op_counts = Apportion(ow, size);
  const double shares[] = {spec.exact_share, 1.0 - spec.exact_share};
  auto split = Apportion(shares, size);
  plan.exact = split[0];
  std::vector<double> ew;
  for (const auto& [c, w] : spec.error_weights) ew.push_back(w);
  plan.bucket_counts = Apportion(ew, split[1]);

  std::vector<size_t> cols{plan.exact};
  cols.insert(cols.end(), plan.bucket_counts.begin(), plan.bucket_counts.end());
  std::vector<std::vector<bool>> allowed;
  for (const auto& [op, w] : spec.op_weights) {
    std::vector<bool> row{true};
    for (const auto& [c, cw] : spec.error_weights) row.push_back(Compatible(op, c));
    allowed.push_back(std::move(row));
  }
  auto cells = AssignCells(allowed, plan.op_counts, cols);
  if (!cells) {
    return DatasetError{DatasetError::Kind::kInfeasibleSpec,
                        "no assignment of error categories to operations fits the weights"};
  }
  plan.cells = std::move(*cells);
  return plan;
}

Result<Dataset, DatasetError> Generate(const DistributionSpec& spec, const Lexicon& lexicon) {
  Dataset data;
  std::vector<DatasetSample>* outs[] = {&data.train, &data.val, &data.test};
  const size_t sizes[] = {spec.train, spec.val, spec.test};
  for (size_t i = 0; i < 3; ++i) {
    auto plan = PlanSplit(spec, sizes[i]);
    if (!plan.ok()) return plan.error();
    std::seed_seq seq{static_cast<uint32_t>(spec.seed), static_cast<uint32_t>(spec.seed >> 32),
                      static_cast<uint32_t>(i)};
    std::mt19937_64 derive(seq);
    SplitBuilder builder(spec, lexicon, derive());
    try {
      *outs[i] = builder.Build(*plan);
    } catch (const std::logic_error& e) {
      return DatasetError{DatasetError::Kind::kInfeasibleSpec, e.what()};
    }
  }
  return data;
}

nlohmann::ordered_json ToJson(const DatasetSample& s) {
  nlohmann::ordered_json j;
  j["input"] = EncodeInput(s.input);
  j["output"] = s.expected;
  j["op"] = OperationName(s.op);
  j["error_category"] = CategoryName(s.category);
  j["has_selection"] = s.has_selection();
  return j;
}

Result<DatasetSample, std::string> SampleFromJson(const nlohmann::json& j) {
  if (!j.is_object()) return std::string("record is not an object");
  for (const char* key : {"input", "output", "op", "error_category"}) {
    if (!j.contains(key) || !j[key].is_string()) {
      return "missing string field \"" + std::string(key) + "\"";
    }
  }
  if (!j.contains("has_selection") || !j["has_selection"].is_boolean()) {
    return std::string("missing boolean field \"has_selection\"");
  }
  DatasetSample s;
  auto input = DecodeInput(j["input"].get<std::string>());
  if (!input.ok()) return "bad input: " + input.error();
  s.input = std::move(*input);
  if (s.has_selection() != j["has_selection"].get<bool>()) {
    return std::string("has_selection disagrees with the input");
  }
  s.expected = j["output"].get<std::string>();
  if (!StartsWith(s.expected, kAskPrefix) && !ParseCanonical(s.expected).ok()) {
    return "output is neither a command nor a question: " + s.expected;
  }
  auto op = OperationFromName(j["op"].get<std::string>());
  if (!op) return "unknown op " + j["op"].get<std::string>();
  s.op = *op;
  std::string cat = j["error_category"].get<std::string>();
  if (cat != kExactCategoryName) {
    auto c = RepairCategoryFromName(cat);
    if (!c) return "unknown error_category " + cat;
    s.category = *c;
  }
  return s;
}

std::string ToJsonl(std::span<const DatasetSample> samples) {
  std::string out;
  for (const DatasetSample& s : samples) {
    out += ToJson(s).dump();
    out += '\n';
  }
  return out;
}

Result<std::vector<DatasetSample>, DatasetError> ParseJsonl(std::string_view text) {
  std::vector<DatasetSample> out;
  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (Trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      return DatasetError{DatasetError::Kind::kMalformed, "invalid JSON", line_no};
    }
    auto s = SampleFromJson(j);
    if (!s.ok()) return DatasetError{DatasetError::Kind::kMalformed, s.error(), line_no};
    out.push_back(std::move(*s));
  }
  return out;
}

std::optional<DatasetError> WriteFileAtomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return DatasetError{DatasetError::Kind::kIo, "cannot open " + tmp};
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) return DatasetError{DatasetError::Kind::kIo, "cannot write " + tmp};
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    return DatasetError{DatasetError::Kind::kIo, "cannot rename into " + path};
  }
  return std::nullopt;
}

std::optional<DatasetError> WriteJsonl(std::span<const DatasetSample> samples,
                                       const std::string& path) {
  return WriteFileAtomic(path, ToJsonl(samples));
}

Result<std::vector<DatasetSample>, DatasetError> ReadJsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return DatasetError{DatasetError::Kind::kIo, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseJsonl(ss.str());
}

nlohmann::ordered_json ManifestJson(const DistributionSpec& spec, const Dataset& data) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json s;
  s["seed"] = spec.seed;
  s["sizes"] = {{"train", spec.train}, {"val", spec.val}, {"test", spec.test}};
  for (const auto& [op, w] : spec.op_weights) s["op_weights"][std::string(OperationName(op))] = w;
  for (const auto& [c, w] : spec.error_weights) {
    s["error_weights"][std::string(RepairCategoryName(c))] = w;
  }
  s["exact_share"] = spec.exact_share;
  s["selection_ratio"] = spec.selection_ratio;
  s["out_of_lexicon_share"] = spec.out_of_lexicon_share;
  s["swap_share"] = spec.swap_share;
  j["spec"] = s;
  const std::pair<const char*, const std::vector<DatasetSample>*> splits[] = {
      {"train", &data.train}, {"val", &data.val}, {"test", &data.test}};
  for (const auto& [name, samples] : splits) {
    nlohmann::ordered_json sj;
    sj["file"] = std::string(name) + ".jsonl";
    sj["count"] = samples->size();
    std::map<std::string, size_t> ops, cats;
    size_t with_sel = 0;
    for (const DatasetSample& x : *samples) {
      ++ops[std::string(OperationName(x.op))];
      ++cats[CategoryName(x.category)];
      with_sel += x.has_selection();
    }
    sj["ops"] = ops;
    sj["error_categories"] = cats;
    sj["with_selection"] = with_sel;
    j["splits"][name] = sj;
  }
  return j;
}

std::optional<DatasetError> WriteDataset(const std::string& dir, const DistributionSpec& spec,
                                         const Dataset& data) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return DatasetError{DatasetError::Kind::kIo, "cannot create " + dir};
  const std::filesystem::path base(dir);
  const std::pair<const char*, const std::vector<DatasetSample>*> splits[] = {
      {"train.jsonl", &data.train}, {"val.jsonl", &data.val}, {"test.jsonl", &data.test}};
  for (const auto& [name, samples] : splits) {
    if (auto e = WriteJsonl(*samples, (base / name).string())) return e;
  }
  return WriteFileAtomic((base / "manifest.json").string(), ManifestJson(spec, data).dump(2) + "\n");
}

}  // namespace cmdshim
