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

#include <functional>
#include <map>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "testing/random_commands.h"

namespace cmdshim {
namespace {

using K = ParseError::Kind;

TEST(ParseCanonicalTest, SelectPhrase) {
  auto r = ParseCanonical("select apple");
  ASSERT_TRUE(r.ok()) << r.error().ToString();
  EXPECT_EQ(*r, Command::Select({"apple"}));
}

TEST(ParseCanonicalTest, InsertFourComponents) {
  auto r = ParseCanonical("insert at home before tonight");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r, Command::Insert({"at", "home"}, ContextKeyword::kBefore,
                                {"tonight"}));
}

TEST(ParseCanonicalTest, KeywordsAreCaseInsensitive) {
  auto r = ParseCanonical("INSERT At Home BEFORE tonight");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(SerializeCanonical(*r), "INSERT at home BEFORE tonight");
}

TEST(ParseCanonicalTest, ChooseZeroIsInvalidNumber) {
  auto r = ParseCanonical("choose zero");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().kind, K::kInvalidNumber);
  EXPECT_EQ(r.error().position, 1u);
}

TEST(ParseCanonicalTest, ChooseNumberWord) {
  auto r = ParseCanonical("choose three");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r, Command::Choose(3));
}

TEST(ParseCanonicalTest, NaturalLeadInIsExtraTokens) {
  auto r = ParseCanonical("select the word apple");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().kind, K::kExtraTokens);
  EXPECT_EQ(r.error().position, 1u);
  EXPECT_EQ(r.error().token, "the");
}

TEST(ParseCanonicalTest, ErrorPositions) {
  struct Case {
    const char* text;
    K kind;
    size_t pos;
  };
  const Case cases[] = {
      {"remove apple", K::kUnknownKeyword, 0},
      {"", K::kMissingComponent, 0},
      {"select", K::kMissingComponent, 1},
      {"select 3", K::kInvalidNumber, 1},
      {"select left word", K::kUnknownKeyword, 1},
      {"choose apple", K::kInvalidNumber, 1},
      {"choose 2 3", K::kExtraTokens, 2},
      {"choose number 3", K::kInvalidNumber, 1},
      {"delete apple before pear", K::kExtraTokens, 2},
      {"insert apple", K::kMissingComponent, 2},
      {"insert apple before", K::kMissingComponent, 3},
      {"insert before apple", K::kMissingComponent, 1},
      {"insert apple with pear", K::kUnknownKeyword, 2},
      {"insert apple before that", K::kMissingComponent, 3},
      {"replace apple to orange", K::kMissingComponent, 4},
      {"replace that with orange", K::kMissingComponent, 1},
      {"undo", K::kMissingComponent, 1},
      {"undo it", K::kUnknownKeyword, 1},
      {"undo that now", K::kExtraTokens, 2},
      {"move apple", K::kUnknownKeyword, 1},
      {"correct the selected word", K::kExtraTokens, 1},
  };
  for (const Case& c : cases) {
    auto r = ParseCanonical(c.text);
    ASSERT_FALSE(r.ok()) << c.text;
    EXPECT_EQ(r.error().kind, c.kind) << c.text << ": " << r.error().ToString();
    EXPECT_EQ(r.error().position, c.pos) << c.text;
  }
}

TEST(SerializeCanonicalTest, Examples) {
  EXPECT_EQ(SerializeCanonical(Command::SelectRelative(Direction::kNext)),
            "SELECT NEXT WORD");
  EXPECT_EQ(SerializeCanonical(Command::Correct({"meeting"})),
            "CORRECT meeting");
  EXPECT_EQ(SerializeCanonical(Command::Undo()), "UNDO THAT");
  EXPECT_EQ(SerializeCanonical(Command::Move(ContextKeyword::kAfter, {"car"})),
            "MOVE AFTER car");
  EXPECT_EQ(SerializeCanonical(Command::Replace({"work"}, {"rest"})),
            "REPLACE work WITH rest");
}

TEST(SerializeCanonicalTest, RoundTripOverRandomCommands) {
  std::mt19937_64 rng(20261016);
  for (int i = 0; i < 1000; ++i) {
    Command c = testing::RandomCommand(rng);
    std::string text = SerializeCanonical(c);
    auto r = ParseCanonical(text);
    ASSERT_TRUE(r.ok()) << text << ": " << r.error().ToString();
    EXPECT_EQ(*r, c) << text;
    // serialize . parse is the identity on canonical strings.
    EXPECT_EQ(SerializeCanonical(*r), text);
  }
}

TEST(TemplateTest, SixteenSubsetsSixValid) {
  int valid = 0;
  std::set<TemplateId> seen;
  for (ComponentMask m = 0; m < 16; ++m) {
    if (auto t = TemplateForComponents(m)) {
      ++valid;
      seen.insert(*t);
      EXPECT_EQ(ComponentsOf(*t), m);
    }
  }
  EXPECT_EQ(valid, 6);
  EXPECT_EQ(seen.size(), 6u);
}

TEST(TemplateTest, TemplateOfExamples) {
  EXPECT_EQ(TemplateOf(Command::Undo()), TemplateId::kCmdArg);
  EXPECT_EQ(TemplateOf(Command::Insert({"a"}, ContextKeyword::kBefore, {"b"})),
            TemplateId::kFull);
  EXPECT_EQ(TemplateOf(Command::Move(ContextKeyword::kBefore, {"b"})),
            TemplateId::kCmdCtxArg);
  EXPECT_EQ(TemplateOf(Command::SelectRelative(Direction::kPrevious)),
            TemplateId::kCmdArg);
}

TEST(TemplateTest, EveryRandomCommandHasATemplate) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    Command c = testing::RandomCommand(rng);
    EXPECT_TRUE(TemplateForComponents(c.components()).has_value());
  }
}

TEST(CommandCreateTest, RejectsInvalidCombinations) {
  EXPECT_FALSE(Command::Create(Operation::kInsert, Phrase{{"a"}}).ok());
  EXPECT_FALSE(Command::Create(Operation::kChoose, Number{0}).ok());
  EXPECT_FALSE(Command::Create(Operation::kChoose, Phrase{{"a"}}).ok());
  EXPECT_FALSE(Command::Create(Operation::kUndo, std::nullopt).ok());
  EXPECT_FALSE(Command::Create(Operation::kSelect, Deictic{}).ok());
  EXPECT_FALSE(Command::Create(Operation::kReplace, Phrase{{"a"}},
                               ContextKeyword::kBefore, Phrase{{"b"}})
                   .ok());
  EXPECT_FALSE(Command::Create(Operation::kDelete, Phrase{{"a", "before"}}).ok());
  EXPECT_FALSE(Command::Create(Operation::kDelete, Phrase{{}}).ok());
  EXPECT_TRUE(Command::Create(Operation::kDelete, Deictic{}).ok());
}

// No canonical command is a strict prefix of another canonical command with
// the same keyword but a different template. Checked exhaustively over a
// small vocabulary that includes every keyword.
TEST(ParseCanonicalTest, PrefixUnambiguousExhaustive) {
  const std::vector<std::string> vocab = {
      "before", "after", "with", "that", "previous", "next", "word",
      "apple",  "3",     "the",  "select", "insert"};
  const std::vector<std::string> heads = {"select", "choose", "delete",
                                          "insert", "replace", "correct",
                                          "undo",   "redo",   "move"};
  std::map<std::string, TemplateId> canonical;
  std::vector<std::string> seq;
  std::function<void(size_t)> rec = [&](size_t depth) {
    auto r = ParseCanonical(std::span<const std::string>(seq));
    if (r.ok()) canonical.emplace(Join(seq), TemplateOf(*r));
    if (depth == 0) return;
    for (const std::string& v : vocab) {
      seq.push_back(v);
      rec(depth - 1);
      seq.pop_back();
    }
  };
  for (const std::string& h : heads) {
    seq = {h};
    rec(4);
  }
  ASSERT_GT(canonical.size(), 50u);
  for (const auto& [text, tmpl] : canonical) {
    Words toks = SplitWords(text);
    for (size_t len = 2; len < toks.size(); ++len) {
      std::string prefix = Join(std::span<const std::string>(toks).first(len));
      auto it = canonical.find(prefix);
      if (it != canonical.end()) {
        EXPECT_EQ(it->second, tmpl) << "'" << prefix << "' prefixes '" << text << "'";
      }
    }
  }
}

}  // namespace
}  // namespace cmdshim
