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

#ifndef CMDSHIM_TEXT_H_
#define CMDSHIM_TEXT_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cmdshim {

using Words = std::vector<std::string>;

std::string ToLower(std::string_view s);
std::string ToUpper(std::string_view s);
std::string_view Trim(std::string_view s);

// Splits on runs of ASCII whitespace; never yields empty tokens.
Words SplitWords(std::string_view s);

std::string Join(std::span<const std::string> words, std::string_view sep = " ");

// Lowercases and strips leading/trailing punctuation, so "Wreck?" and
// "wreck" compare equal. Interior apostrophes and hyphens are kept.
std::string NormalizeWord(std::string_view word);

// Tokenizes free speech: lowercase, punctuation stripped, empties dropped.
Words TokenizeUtterance(std::string_view s);

// Accepts digit strings and the number words "zero".."twenty". Returns
// the value without range checks; callers decide whether zero is legal.
std::optional<int> ParseNumberToken(std::string_view token);

bool IsNumberToken(std::string_view token);

}  // namespace cmdshim

#endif  // CMDSHIM_TEXT_H_
