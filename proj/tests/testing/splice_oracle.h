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

// Reference editor working on a plain lowercase string with substring
// search. Shares no code with the simulator beyond the test harness.

#ifndef CMDSHIM_TESTS_TESTING_SPLICE_ORACLE_H_
#define CMDSHIM_TESTS_TESTING_SPLICE_ORACLE_H_

#include <optional>
#include <string>
#include <vector>

namespace cmdshim::testing {

struct OracleResult {
  std::string buffer;
  // Word offset of the selection start for SELECT, else -1.
  int selected_at = -1;
};

// Byte offsets (into " " + buffer + " ") of non-overlapping whole-word
// matches of `phrase`.
inline std::vector<size_t> OracleFind(const std::string& buffer,
                                      const std::string& phrase) {
  const std::string hay = " " + buffer + " ";
  const std::string needle = " " + phrase + " ";
  std::vector<size_t> hits;
  size_t from = 0;
  while (true) {
    size_t p = hay.find(needle, from);
    if (p == std::string::npos) break;
    hits.push_back(p);
    from = p + needle.size() - 1;
  }
  return hits;
}

inline int OracleWordIndex(const std::string& padded, size_t p) {
  int n = 0;
  for (size_t i = 1; i <= p; ++i) n += padded[i] == ' ';
  return n;
}

inline std::string OracleTrim(const std::string& s) {
  size_t b = s.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(' ');
  std::string out;
  bool space = false;
  for (size_t i = b; i <= e; ++i) {
    if (s[i] == ' ') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += s[i];
  }
  return out;
}

// op is one of select, delete, insert-before, insert-after, replace, move.
// `target` must occur exactly once, else nullopt.
inline std::optional<OracleResult> OracleApply(const std::string& buffer,
                                               const std::string& op,
                                               const std::string& target,
                                               const std::string& text = "") {
  std::vector<size_t> hits = OracleFind(buffer, target);
  if (hits.size() != 1) return std::nullopt;
  const std::string hay = " " + buffer + " ";
  const size_t p = hits[0];
  const size_t q = p + target.size() + 1;  // index of the trailing space
  const std::string left = hay.substr(0, p + 1);
  const std::string mid = hay.substr(p + 1, target.size());
  const std::string right = hay.substr(q);
  OracleResult r;
  if (op == "select") {
    r.buffer = buffer;
    r.selected_at = OracleWordIndex(hay, p);
  } else if (op == "delete") {
    r.buffer = OracleTrim(left + right);
  } else if (op == "insert-before") {
    r.buffer = OracleTrim(left + text + " " + mid + right);
  } else if (op == "insert-after") {
    r.buffer = OracleTrim(left + mid + " " + text + right);
  } else if (op == "replace") {
    r.buffer = OracleTrim(left + text + right);
  } else {
    r.buffer = buffer;
  }
  return r;
}

}  // namespace cmdshim::testing

#endif  // CMDSHIM_TESTS_TESTING_SPLICE_ORACLE_H_
