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

#include "cmdshim/lexicon.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cmdshim {
namespace internal {
extern const std::string_view kDefaultLexiconText;
}  // namespace internal

namespace {

constexpr std::pair<RepairCategory, std::string_view> kCategoryNames[] = {
    {RepairCategory::kSwapCmd, "swap_cmd"},
    {RepairCategory::kSubstituteCmd, "substitute_cmd"},
    {RepairCategory::kSubstituteCtx, "substitute_ctx"},
    {RepairCategory::kSubstituteTemplate, "substitute_template"},
    {RepairCategory::kIgnoreDeictic, "ignore_deictic"},
    {RepairCategory::kAddDeictic, "add_deictic"},
    {RepairCategory::kMissingArgs, "missing_args"},
    {RepairCategory::kNaturalUtterance, "natural_utterance"},
};

std::string LineError(size_t line, std::string_view what) {
  return "lexicon line " + std::to_string(line) + ": " + std::string(what);
}

bool SplitKeyValue(std::string_view line, std::string* key, std::string* value) {
  size_t eq = line.find('=');
  if (eq == std::string_view::npos) return false;
  *key = std::string(Trim(line.substr(0, eq)));
  *value = std::string(Trim(line.substr(eq + 1)));
  return !key->empty() && !value->empty();
}

std::optional<int> ParseInt(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string_view RepairCategoryName(RepairCategory c) {
  for (const auto& [cat, name] : kCategoryNames) {
    if (cat == c) return name;
  }
  return "?";
}

std::optional<RepairCategory> RepairCategoryFromName(std::string_view name) {
  for (const auto& [cat, n] : kCategoryNames) {
    if (n == name) return cat;
  }
  return std::nullopt;
}

std::string_view Lexicon::DefaultText() { return internal::kDefaultLexiconText; }

const Lexicon& Lexicon::Default() {
  static const Lexicon* lexicon = [] {
    auto parsed = Parse(DefaultText());
    if (!parsed.ok()) throw std::logic_error(parsed.error());
    return new Lexicon(std::move(parsed).value());
  }();
  return *lexicon;
}

Result<Lexicon, std::string> Lexicon::Parse(std::string_view text) {
  Lexicon lex;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') return LineError(line_no, "unterminated section");
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      continue;
    }
    auto list = [&](std::vector<Words>* out) {
      out->push_back(TokenizeUtterance(line));
    };
    std::string key, value;
    if (section == "fillers") {
      list(&lex.fillers);
    } else if (section == "previous_word") {
      list(&lex.previous_word);
    } else if (section == "next_word") {
      list(&lex.next_word);
    } else if (section == "with") {
      list(&lex.with_synonyms);
    } else if (section == "noise") {
      list(&lex.noise);
    } else if (section == "deictic") {
      list(&lex.deictic);
    } else if (section == "commands") {
      if (!SplitKeyValue(line, &key, &value)) {
        return LineError(line_no, "expected 'synonym = operation'");
      }
      auto op = OperationFromName(ToLower(value));
      if (!op) return LineError(line_no, "unknown operation '" + value + "'");
      lex.command_synonyms.emplace_back(TokenizeUtterance(key), *op);
    } else if (section == "penalties") {
      if (!SplitKeyValue(line, &key, &value)) {
        return LineError(line_no, "expected 'category = points'");
      }
      auto cat = RepairCategoryFromName(key);
      auto pts = ParseInt(value);
      if (!cat) return LineError(line_no, "unknown repair category '" + key + "'");
      if (!pts || *pts < 0 || *pts > 100) {
        return LineError(line_no, "penalty must be 0..100");
      }
      lex.penalties[*cat] = *pts;
    } else if (section == "settings") {
      if (!SplitKeyValue(line, &key, &value)) {
        return LineError(line_no, "expected 'key = value'");
      }
      if (key != "threshold") return LineError(line_no, "unknown setting '" + key + "'");
      auto t = ParseInt(value);
      if (!t || *t < 0 || *t > 100) return LineError(line_no, "threshold must be 0..100");
      lex.threshold = *t;
    } else if (section == "questions") {
      if (!SplitKeyValue(line, &key, &value)) {
        return LineError(line_no, "expected 'op.slot = template'");
      }
      lex.questions[key] = value;
    } else {
      return LineError(line_no, "entry outside a known section");
    }
  }
  // Longest entries first so prefix matching is greedy.
  auto by_length = [](const Words& a, const Words& b) { return a.size() > b.size(); };
  for (auto* table : {&lex.fillers, &lex.previous_word, &lex.next_word,
                      &lex.with_synonyms, &lex.noise, &lex.deictic}) {
    table->erase(std::remove_if(table->begin(), table->end(),
                                [](const Words& w) { return w.empty(); }),
                 table->end());
    std::stable_sort(table->begin(), table->end(), by_length);
  }
  std::stable_sort(lex.command_synonyms.begin(), lex.command_synonyms.end(),
                   [](const auto& a, const auto& b) {
                     return a.first.size() > b.first.size();
                   });
  return lex;
}

Result<Lexicon, std::string> Lexicon::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::string("cannot read lexicon file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

int Lexicon::Penalty(RepairCategory c) const {
  auto it = penalties.find(c);
  return it == penalties.end() ? 0 : it->second;
}

size_t MatchPrefix(const std::vector<Words>& table,
                   std::span<const std::string> words) {
  size_t best = 0;
  for (const Words& entry : table) {
    if (entry.size() > words.size() || entry.size() <= best) continue;
    if (std::equal(entry.begin(), entry.end(), words.begin())) best = entry.size();
  }
  return best;
}

bool MatchWhole(const std::vector<Words>& table,
                std::span<const std::string> words) {
  return std::any_of(table.begin(), table.end(), [&](const Words& e) {
    return e.size() == words.size() &&
           std::equal(e.begin(), e.end(), words.begin());
  });
}

}  // namespace cmdshim
