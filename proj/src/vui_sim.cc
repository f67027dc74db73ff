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

#include "cmdshim/vui_sim.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cmdshim {
namespace internal {
extern const std::string_view kDefaultCorrectionsText;
}  // namespace internal

namespace {

std::string RangeText(const Words& buffer, WordRange r) {
  return Join(std::span<const std::string>(buffer).subspan(r.begin, r.size()));
}

std::string NormalizedText(const Words& buffer, WordRange r) {
  Words w;
  for (size_t i = r.begin; i < r.end; ++i) w.push_back(NormalizeWord(buffer[i]));
  return Join(w);
}

bool ParseRange(std::string_view text, WordRange* out) {
  std::istringstream in{std::string(text)};
  size_t b = 0, e = 0;
  if (!(in >> b >> e) || e < b) return false;
  std::string rest;
  if (in >> rest) return false;
  *out = WordRange{b, e};
  return true;
}

std::string_view AfterPrefix(std::string_view line, std::string_view prefix) {
  if (line.substr(0, prefix.size()) != prefix) return {};
  return Trim(line.substr(prefix.size()));
}

}  // namespace

CorrectionLexicon ParseCorrectionLexicon(std::string_view text) {
  CorrectionLexicon lex;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view l = Trim(line);
    if (l.empty() || l.front() == '#') continue;
    size_t eq = l.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key = Join(TokenizeUtterance(l.substr(0, eq)));
    std::vector<std::string>& opts = lex[key];
    std::string_view rest = l.substr(eq + 1);
    while (!rest.empty()) {
      size_t bar = rest.find('|');
      std::string opt = Join(SplitWords(rest.substr(0, bar)));
      if (!opt.empty()) opts.push_back(ToLower(opt));
      if (bar == std::string_view::npos) break;
      rest.remove_prefix(bar + 1);
    }
  }
  return lex;
}

CorrectionLexicon LoadCorrectionLexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read correction lexicon: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseCorrectionLexicon(ss.str());
}

const CorrectionLexicon& DefaultCorrectionLexicon() {
  static const CorrectionLexicon lexicon =
      ParseCorrectionLexicon(internal::kDefaultCorrectionsText);
  return lexicon;
}

std::string_view FailureReasonName(FailureReason r) {
  switch (r) {
    case FailureReason::kUnrecognized:
      return "unrecognized";
    case FailureReason::kTargetNotFound:
      return "target_not_found";
    case FailureReason::kNoSelection:
      return "no_selection";
    case FailureReason::kNothingToUndo:
      return "nothing_to_undo";
    case FailureReason::kNothingToRedo:
      return "nothing_to_redo";
  }
  return "?";
}

std::string_view OutcomeKindName(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::kApplied:
      return "applied";
    case Outcome::Kind::kPendingDisambiguation:
      return "pending";
    case Outcome::Kind::kFailed:
      return "failed";
  }
  return "?";
}

size_t PendingOperation::count() const {
  if (const auto* t = std::get_if<TargetChoice>(&choice)) return t->ranges.size();
  return std::get<CorrectionChoice>(choice).options.size();
}

std::vector<WordRange> FindPhrase(const Words& buffer, const Words& phrase) {
  std::vector<WordRange> out;
  if (phrase.empty() || phrase.size() > buffer.size()) return out;
  Words needle;
  for (const std::string& w : phrase) needle.push_back(NormalizeWord(w));
  size_t i = 0;
  while (i + needle.size() <= buffer.size()) {
    bool match = true;
    for (size_t k = 0; k < needle.size(); ++k) {
      if (NormalizeWord(buffer[i + k]) != needle[k]) {
        match = false;
        break;
      }
    }
    if (match) {
      out.push_back({i, i + needle.size()});
      i += needle.size();
    } else {
      ++i;
    }
  }
  return out;
}

SimState SimState::Init(Words text, CorrectionLexicon lexicon) {
  SimState s;
  s.buffer_ = std::move(text);
  s.cursor_ = s.buffer_.size();
  s.lexicon_ = std::make_shared<const CorrectionLexicon>(std::move(lexicon));
  return s;
}

SimState SimState::Init(std::string_view text, CorrectionLexicon lexicon) {
  return Init(SplitWords(text), std::move(lexicon));
}

Words SimState::selected_words() const {
  Words out;
  if (!selection_) return out;
  for (size_t i = selection_->begin; i < selection_->end; ++i) {
    out.push_back(NormalizeWord(buffer_[i]));
  }
  return out;
}

SimState::Snapshot SimState::Capture() const {
  return Snapshot{buffer_, cursor_, selection_};
}

void SimState::Restore(const Snapshot& s) {
  buffer_ = s.buffer;
  cursor_ = s.cursor;
  selection_ = s.selection;
}

void SimState::BeginEdit() {
  undo_.push_back(Capture());
  redo_.clear();
}

Outcome SimState::Succeed() {
  pending_.reset();
  Outcome o;
  o.kind = Outcome::Kind::kApplied;
  o.buffer = buffer_text();
  o.selection = selection_;
  return o;
}

Outcome SimState::Fail(FailureReason r) const {
  Outcome o;
  o.kind = Outcome::Kind::kFailed;
  o.reason = r;
  o.buffer = buffer_text();
  o.selection = selection_;
  return o;
}

Outcome SimState::Pending(PendingOperation op) {
  Outcome o;
  o.kind = Outcome::Kind::kPendingDisambiguation;
  if (const auto* t = std::get_if<TargetChoice>(&op.choice)) {
    for (const WordRange& r : t->ranges) {
      o.candidates.push_back(RangeText(buffer_, r));
      o.candidate_ranges.push_back(r);
    }
  } else {
    const auto& c = std::get<CorrectionChoice>(op.choice);
    o.candidates = c.options;
    o.candidate_ranges.assign(c.options.size(), c.target);
  }
  selection_.reset();
  pending_ = std::move(op);
  o.buffer = buffer_text();
  return o;
}

void SimState::Splice(WordRange range, const Words& words) {
  buffer_.erase(buffer_.begin() + static_cast<std::ptrdiff_t>(range.begin),
                buffer_.begin() + static_cast<std::ptrdiff_t>(range.end));
  buffer_.insert(buffer_.begin() + static_cast<std::ptrdiff_t>(range.begin),
                 words.begin(), words.end());
  cursor_ = range.begin + words.size();
}

Outcome SimState::ApplyCorrection(const Command& cmd, WordRange target) {
  auto it = lexicon_->find(NormalizedText(buffer_, target));
  if (it == lexicon_->end() || it->second.empty()) {
    return Fail(FailureReason::kTargetNotFound);
  }
  if (it->second.size() > 1) {
    return Pending(PendingOperation{cmd, CorrectionChoice{target, it->second}});
  }
  BeginEdit();
  Splice(target, SplitWords(it->second.front()));
  selection_.reset();
  return Succeed();
}

// Performs `cmd` at an already-resolved target range.
Outcome SimState::Resolve(const Command& cmd, WordRange target) {
  switch (cmd.op()) {
    case Operation::kSelect:
      selection_ = target;
      cursor_ = target.end;
      return Succeed();
    case Operation::kDelete:
      BeginEdit();
      Splice(target, {});
      selection_.reset();
      return Succeed();
    case Operation::kInsert: {
      const Words& words = *PhraseWords(cmd.cmd_arg());
      size_t at = *cmd.ctx() == ContextKeyword::kBefore ? target.begin
                                                        : target.end;
      BeginEdit();
      Splice(WordRange{at, at}, words);
      selection_.reset();
      return Succeed();
    }
    case Operation::kReplace:
      BeginEdit();
      Splice(target, *PhraseWords(cmd.ctx_arg()));
      selection_.reset();
      return Succeed();
    case Operation::kCorrect:
      return ApplyCorrection(cmd, target);
    case Operation::kMove:
      cursor_ = *cmd.ctx() == ContextKeyword::kBefore ? target.begin
                                                      : target.end;
      selection_.reset();
      return Succeed();
    case Operation::kChoose:
    case Operation::kUndo:
    case Operation::kRedo:
      break;
  }
  throw std::logic_error("operation has no target");
}

Outcome SimState::Locate(const Command& cmd, const Words& phrase) {
  std::vector<WordRange> matches = FindPhrase(buffer_, phrase);
  if (matches.empty()) return Fail(FailureReason::kTargetNotFound);
  if (matches.size() == 1) return Resolve(cmd, matches.front());
  return Pending(PendingOperation{cmd, TargetChoice{std::move(matches)}});
}

Outcome SimState::Execute(std::string_view canonical_text) {
  ParseResult parsed = ParseCanonical(canonical_text);
  if (!parsed.ok()) return Fail(FailureReason::kUnrecognized);
  return Execute(*parsed);
}

Outcome SimState::Execute(const Command& cmd) {
  const bool history = cmd.op() == Operation::kUndo || cmd.op() == Operation::kRedo;
  if (buffer_.empty() && !history) return Fail(FailureReason::kTargetNotFound);
  switch (cmd.op()) {
    case Operation::kSelect: {
      if (const auto* rel = std::get_if<RelativeWord>(&*cmd.cmd_arg())) {
        // Relative to the selection when there is one, else to the cursor.
        size_t lo = selection_ ? selection_->begin : cursor_;
        size_t hi = selection_ ? selection_->end : cursor_;
        size_t idx;
        if (rel->direction == Direction::kNext) {
          if (hi >= buffer_.size()) return Fail(FailureReason::kTargetNotFound);
          idx = hi;
        } else {
          if (lo == 0) return Fail(FailureReason::kTargetNotFound);
          idx = lo - 1;
        }
        return Resolve(cmd, WordRange{idx, idx + 1});
      }
      return Locate(cmd, *PhraseWords(cmd.cmd_arg()));
    }
    case Operation::kChoose: {
      if (!pending_) return Fail(FailureReason::kTargetNotFound);
      const int n = std::get<Number>(*cmd.cmd_arg()).value;
      if (n < 1 || static_cast<size_t>(n) > pending_->count()) {
        return Fail(FailureReason::kTargetNotFound);
      }
      PendingOperation op = *pending_;
      const size_t idx = static_cast<size_t>(n - 1);
      if (const auto* t = std::get_if<TargetChoice>(&op.choice)) {
        return Resolve(op.in_flight, t->ranges[idx]);
      }
      const auto& c = std::get<CorrectionChoice>(op.choice);
      BeginEdit();
      Splice(c.target, SplitWords(c.options[idx]));
      selection_.reset();
      return Succeed();
    }
    case Operation::kDelete:
    case Operation::kCorrect:
      if (std::holds_alternative<Deictic>(*cmd.cmd_arg())) {
        if (!selection_) return Fail(FailureReason::kNoSelection);
        return Resolve(cmd, *selection_);
      }
      return Locate(cmd, *PhraseWords(cmd.cmd_arg()));
    case Operation::kReplace:
      return Locate(cmd, *PhraseWords(cmd.cmd_arg()));
    case Operation::kInsert:
    case Operation::kMove:
      return Locate(cmd, *PhraseWords(cmd.ctx_arg()));
    case Operation::kUndo: {
      if (undo_.empty()) return Fail(FailureReason::kNothingToUndo);
      redo_.push_back(Capture());
      Restore(undo_.back());
      undo_.pop_back();
      return Succeed();
    }
    case Operation::kRedo: {
      if (redo_.empty()) return Fail(FailureReason::kNothingToRedo);
      undo_.push_back(Capture());
      Restore(redo_.back());
      redo_.pop_back();
      return Succeed();
    }
  }
  return Fail(FailureReason::kUnrecognized);
}

std::string SimState::ExportSnapshot() const {
  std::ostringstream out;
  out << "buffer: " << buffer_text() << "\n";
  out << "cursor: " << cursor_ << "\n";
  if (selection_) {
    out << "selection: " << selection_->begin << " " << selection_->end << "\n";
  } else {
    out << "selection: none\n";
  }
  if (!pending_) {
    out << "pending: none\n";
    return out.str();
  }
  auto ranges = [](const std::vector<WordRange>& rs) {
    std::string s;
    for (size_t i = 0; i < rs.size(); ++i) {
      if (i > 0) s += ", ";
      s += std::to_string(rs[i].begin) + " " + std::to_string(rs[i].end);
    }
    return s;
  };
  const std::string cmd = SerializeCanonical(pending_->in_flight);
  if (const auto* t = std::get_if<TargetChoice>(&pending_->choice)) {
    out << "pending: targets " << cmd << " | " << ranges(t->ranges) << "\n";
  } else {
    const auto& c = std::get<CorrectionChoice>(pending_->choice);
    out << "pending: corrections " << cmd << " | " << ranges({c.target})
        << " | ";
    for (size_t i = 0; i < c.options.size(); ++i) {
      if (i > 0) out << " ; ";
      out << c.options[i];
    }
    out << "\n";
  }
  return out.str();
}

Result<SimState, std::string> SimState::ImportSnapshot(
    std::string_view text, CorrectionLexicon lexicon) {
  std::istringstream in{std::string(text)};
  std::string buffer_line, cursor_line, selection_line, pending_line;
  if (!std::getline(in, buffer_line) || !std::getline(in, cursor_line) ||
      !std::getline(in, selection_line) || !std::getline(in, pending_line)) {
    return std::string("snapshot needs four lines");
  }
  if (buffer_line.rfind("buffer:", 0) != 0) return std::string("missing buffer line");
  SimState s = Init(std::string_view(buffer_line).substr(7), std::move(lexicon));

  std::string_view cur = AfterPrefix(cursor_line, "cursor:");
  size_t cursor = 0;
  try {
    cursor = std::stoul(std::string(cur));
  } catch (const std::exception&) {
    return std::string("bad cursor line");
  }
  if (cursor > s.buffer_.size()) return std::string("cursor out of range");
  s.cursor_ = cursor;

  auto in_bounds = [&s](WordRange r) {
    return r.begin < r.end && r.end <= s.buffer_.size();
  };
  std::string_view sel = AfterPrefix(selection_line, "selection:");
  if (sel != "none") {
    WordRange r;
    if (!ParseRange(sel, &r) || !in_bounds(r)) return std::string("bad selection line");
    s.selection_ = r;
  }

  std::string_view pend = AfterPrefix(pending_line, "pending:");
  if (pend == "none") return s;
  std::vector<std::string_view> parts;
  while (true) {
    size_t bar = pend.find('|');
    parts.push_back(Trim(pend.substr(0, bar)));
    if (bar == std::string_view::npos) break;
    pend.remove_prefix(bar + 1);
  }
  if (parts.size() < 2) return std::string("bad pending line");
  std::string_view head = parts[0];
  bool targets = head.rfind("targets ", 0) == 0;
  bool corrections = head.rfind("corrections ", 0) == 0;
  if (!targets && !corrections) return std::string("bad pending kind");
  ParseResult cmd = ParseCanonical(head.substr(head.find(' ') + 1));
  if (!cmd.ok()) return std::string("bad pending command");
  std::vector<WordRange> ranges;
  std::string_view rs = parts[1];
  while (!rs.empty()) {
    size_t comma = rs.find(',');
    WordRange r;
    if (!ParseRange(rs.substr(0, comma), &r) || !in_bounds(r)) {
      return std::string("bad pending range");
    }
    if (!ranges.empty() && r.begin < ranges.back().end) {
      return std::string("pending ranges overlap or are unordered");
    }
    ranges.push_back(r);
    if (comma == std::string_view::npos) break;
    rs.remove_prefix(comma + 1);
  }
  if (targets) {
    if (ranges.size() < 2) return std::string("target choice needs two ranges");
    s.pending_ = PendingOperation{*cmd, TargetChoice{std::move(ranges)}};
    return s;
  }
  if (parts.size() != 3 || ranges.size() != 1) return std::string("bad correction choice");
  std::vector<std::string> options;
  std::string_view os = parts[2];
  while (true) {
    size_t semi = os.find(';');
    std::string opt = Join(SplitWords(os.substr(0, semi)));
    if (!opt.empty()) options.push_back(opt);
    if (semi == std::string_view::npos) break;
    os.remove_prefix(semi + 1);
  }
  if (options.size() < 2) return std::string("correction choice needs two options");
  s.pending_ = PendingOperation{*cmd, CorrectionChoice{ranges[0], std::move(options)}};
  return s;
}

bool operator==(const SimState& a, const SimState& b) {
  return a.buffer_ == b.buffer_ && a.cursor_ == b.cursor_ &&
         a.selection_ == b.selection_ && a.pending_ == b.pending_ &&
         a.undo_ == b.undo_ && a.redo_ == b.redo_;
}

std::pair<SimState, Outcome> Execute(SimState state, std::string_view text) {
  Outcome o = state.Execute(text);
  return {std::move(state), std::move(o)};
}

}  // namespace cmdshim
