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

#include "cmdshim/text.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace cmdshim {
namespace {

constexpr std::array<std::string_view, 21> kNumberWords = {
    "zero",    "one",     "two",       "three",    "four",
    "five",    "six",     "seven",     "eight",    "nine",
    "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
    "twenty"};

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' ||
         c == '-';
}

}  // namespace

std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string ToUpper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

Words SplitWords(std::string_view s) {
  Words out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    size_t start = i;
    while (i < s.size() && !IsSpace(s[i])) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::string Join(std::span<const std::string> words, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(words[i]);
  }
  return out;
}

std::string NormalizeWord(std::string_view word) {
  size_t b = 0;
  size_t e = word.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(word[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(word[e - 1]))) --e;
  std::string out;
  out.reserve(e - b);
  for (size_t i = b; i < e; ++i) {
    if (IsWordChar(word[i])) {
      out.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(word[i]))));
    }
  }
  return out;
}

Words TokenizeUtterance(std::string_view s) {
  Words out;
  for (const std::string& raw : SplitWords(s)) {
    std::string w = NormalizeWord(raw);
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

std::optional<int> ParseNumberToken(std::string_view token) {
  if (token.empty()) return std::nullopt;
  if (std::all_of(token.begin(), token.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    if (token.size() > 6) return std::nullopt;
    int value = 0;
    std::from_chars(token.data(), token.data() + token.size(), value);
    return value;
  }
  std::string lower = ToLower(token);
  for (size_t i = 0; i < kNumberWords.size(); ++i) {
    if (kNumberWords[i] == lower) return static_cast<int>(i);
  }
  return std::nullopt;
}

bool IsNumberToken(std::string_view token) {
  return ParseNumberToken(token).has_value();
}

}  // namespace cmdshim
