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

// Word lists and scoring knobs that drive the rule normalizer.
//
// File format: "[section]" headers, one entry per line, '#' comments.
// List sections hold phrases; keyed sections hold "key = value" lines.
//
//   [fillers]          politeness and hesitation phrases before the verb
//   [commands]         synonym = operation name  (fix = correct)
//   [previous_word]    phrases meaning SELECT PREVIOUS WORD's argument
//   [next_word]        phrases meaning SELECT NEXT WORD's argument
//   [with]             stand-ins for WITH in replace commands
//   [noise]            argument lead-ins that carry no content
//   [deictic]          expressions that refer to the selection
//   [penalties]        repair category = points subtracted
//   [settings]         threshold = auto-apply confidence floor
//   [questions]        op.slot = clarification template; placeholders
//                      {phrase}, {ctx} and {anchor}

#ifndef CMDSHIM_LEXICON_H_
#define CMDSHIM_LEXICON_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmdshim/command.h"
#include "cmdshim/result.h"
#include "cmdshim/text.h"

namespace cmdshim {

enum class RepairCategory : uint8_t {
  kSwapCmd,
  kSubstituteCmd,
  kSubstituteCtx,
  kSubstituteTemplate,
  kIgnoreDeictic,
  kAddDeictic,
  kMissingArgs,
  kNaturalUtterance,
};

inline constexpr RepairCategory kAllRepairCategories[] = {
    RepairCategory::kSwapCmd,          RepairCategory::kSubstituteCmd,
    RepairCategory::kSubstituteCtx,    RepairCategory::kSubstituteTemplate,
    RepairCategory::kIgnoreDeictic,    RepairCategory::kAddDeictic,
    RepairCategory::kMissingArgs,      RepairCategory::kNaturalUtterance};

std::string_view RepairCategoryName(RepairCategory c);  // "swap_cmd"
std::optional<RepairCategory> RepairCategoryFromName(std::string_view name);

struct Lexicon {
  std::vector<Words> fillers;
  std::vector<std::pair<Words, Operation>> command_synonyms;
  std::vector<Words> previous_word;
  std::vector<Words> next_word;
  std::vector<Words> with_synonyms;
  std::vector<Words> noise;
  std::vector<Words> deictic;
  std::map<RepairCategory, int> penalties;
  int threshold = 70;
  std::map<std::string, std::string> questions;

  // The shipped defaults (identical to data/lexicon.conf).
  static const Lexicon& Default();
  static std::string_view DefaultText();

  static Result<Lexicon, std::string> Parse(std::string_view text);
  static Result<Lexicon, std::string> Load(const std::string& path);

  int Penalty(RepairCategory c) const;

  friend bool operator==(const Lexicon&, const Lexicon&) = default;
};

// Length of the longest entry of `table` that prefixes `words`, or 0.
size_t MatchPrefix(const std::vector<Words>& table,
                   std::span<const std::string> words);

// True when some entry of `table` equals `words` exactly.
bool MatchWhole(const std::vector<Words>& table,
                std::span<const std::string> words);

}  // namespace cmdshim

#endif  // CMDSHIM_LEXICON_H_
