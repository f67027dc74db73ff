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

// Golden fixtures: the incorrect-command corpus and the dataset sample
// rows, with their expected canonical outputs.

#ifndef CMDSHIM_TESTS_TESTING_GOLDEN_H_
#define CMDSHIM_TESTS_TESTING_GOLDEN_H_

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cmdshim::testing {

struct IncorrectCommandCase {
  int row = 0;
  std::string category;
  std::string utterance;
  std::string selection;
  std::string expected;
  std::string buffer;
  std::vector<std::string> setup;
};

inline std::vector<IncorrectCommandCase> LoadIncorrectCommandCorpus() {
  const std::string path = std::string(CMDSHIM_DATA_DIR) + "/incorrect_commands.jsonl";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::vector<IncorrectCommandCase> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    out.push_back({j.at("row").get<int>(), j.at("category"), j.at("utterance"),
                   j.at("selection"), j.at("expected"), j.at("buffer"),
                   j.at("setup").get<std::vector<std::string>>()});
  }
  return out;
}

// The seven dataset sample rows: encoded input and expected output.
struct SampleRow {
  const char* type;
  const char* input;
  const char* expected;
};

inline constexpr SampleRow kSampleRows[] = {
    {"Exact command", "select previous word | selection: apple",
     "SELECT PREVIOUS WORD"},
    {"Natural utterance",
     "can you please select the next word | selection: apple",
     "SELECT NEXT WORD"},
    {"Swap cmd", "choose the word meeting | selection:", "SELECT meeting"},
    {"Substitute cmd", "fix meeting | selection:", "CORRECT meeting"},
    {"Substitute cmd, Natural utterance",
     "please add at home before that | selection: tonight",
     "INSERT at home BEFORE tonight"},
    {"Missing arg", "insert before apple pie | selection:",
     "ASK: What should I insert before apple pie?"},
    {"Missing arg (follow-up clarification)",
     "insert before apple pie | selection: | CLARIFICATION QUESTION: What "
     "should I insert before apple pie? | CLARIFICATION: in the morning",
     "INSERT in the morning BEFORE apple pie"},
};

}  // namespace cmdshim::testing

#endif  // CMDSHIM_TESTS_TESTING_GOLDEN_H_
