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

#include <random>

#include "gtest/gtest.h"
#include "testing/random_commands.h"
#include "testing/splice_oracle.h"

namespace cmdshim {
namespace {

using testing::Pick;

TEST(SimInitTest, CarWreck) {
  SimState s = SimState::Init("was is it a car wreck");
  EXPECT_EQ(s.buffer().size(), 6u);
  EXPECT_FALSE(s.selection().has_value());
  EXPECT_EQ(s.undo_depth(), 0u);
  EXPECT_EQ(s.redo_depth(), 0u);
  EXPECT_EQ(s, SimState::Init("was is it a car wreck"));
}

TEST(SimInitTest, EmptyBufferFailsTargetNotFound) {
  for (const char* text :
       {"SELECT apple", "SELECT NEXT WORD", "CHOOSE 1", "DELETE apple",
        "DELETE THAT", "CORRECT THAT", "INSERT a BEFORE b", "REPLACE a WITH b",
        "MOVE AFTER a"}) {
    SimState s = SimState::Init("");
    Outcome o = s.Execute(text);
    ASSERT_TRUE(o.failed()) << text;
    EXPECT_EQ(o.reason, FailureReason::kTargetNotFound) << text;
  }
  SimState s = SimState::Init("");
  EXPECT_EQ(s.Execute("UNDO THAT").reason, FailureReason::kNothingToUndo);
  EXPECT_EQ(s.Execute("REDO THAT").reason, FailureReason::kNothingToRedo);
}

TEST(SimExecuteTest, InsertLawBeforeEnforcement) {
  SimState s = SimState::Init("the enforcement has responsibility");
  Outcome o = s.Execute("INSERT law BEFORE enforcement");
  EXPECT_TRUE(o.applied());
  EXPECT_EQ(s.buffer_text(), "the law enforcement has responsibility");
  EXPECT_EQ(o.buffer, "the law enforcement has responsibility");
}

TEST(SimExecuteTest, SelectDuplicateThenChoose) {
  SimState s = SimState::Init("apple pie and apple tart and apple juice");
  Outcome o = s.Execute("SELECT apple");
  ASSERT_EQ(o.kind, Outcome::Kind::kPendingDisambiguation);
  ASSERT_EQ(o.candidate_ranges.size(), 3u);
  EXPECT_EQ(o.candidate_ranges[0], (WordRange{0, 1}));
  EXPECT_EQ(o.candidate_ranges[1], (WordRange{3, 4}));
  EXPECT_EQ(o.candidate_ranges[2], (WordRange{6, 7}));
  o = s.Execute("CHOOSE 2");
  ASSERT_TRUE(o.applied());
  EXPECT_EQ(s.selection(), (WordRange{3, 4}));
  EXPECT_FALSE(s.pending().has_value());
}

TEST(SimExecuteTest, RemoveIsUnrecognized) {
  SimState s = SimState::Init("apple pie");
  SimState before = s;
  Outcome o = s.Execute("remove apple");
  EXPECT_EQ(o.reason, FailureReason::kUnrecognized);
  EXPECT_EQ(s, before);
}

TEST(SimExecuteTest, DeleteThatWithoutSelection) {
  SimState s = SimState::Init("apple pie");
  EXPECT_EQ(s.Execute("DELETE THAT").reason, FailureReason::kNoSelection);
}

TEST(SimExecuteTest, SelectThenDeleteThat) {
  SimState s = SimState::Init("a red car and a blue car");
  ASSERT_TRUE(s.Execute("SELECT red car").applied());
  EXPECT_EQ(s.selected_words(), (Words{"red", "car"}));
  ASSERT_TRUE(s.Execute("DELETE THAT").applied());
  EXPECT_EQ(s.buffer_text(), "a and a blue car");
  EXPECT_FALSE(s.selection().has_value());
}

TEST(SimExecuteTest, ExplicitPhraseIgnoresSelection) {
  SimState s = SimState::Init("law red law blue");
  ASSERT_TRUE(s.Execute("SELECT blue").applied());
  Outcome o = s.Execute("DELETE law");
  EXPECT_EQ(o.kind, Outcome::Kind::kPendingDisambiguation);
  EXPECT_FALSE(s.selection().has_value());
}

TEST(SimExecuteTest, SelectionDoesNotSurviveNextCommand) {
  SimState s = SimState::Init("red green blue");
  ASSERT_TRUE(s.Execute("SELECT green").applied());
  ASSERT_TRUE(s.Execute("MOVE AFTER blue").applied());
  EXPECT_EQ(s.Execute("DELETE THAT").reason, FailureReason::kNoSelection);
}

TEST(SimExecuteTest, MatchingIsCaseAndPunctuationInsensitive) {
  SimState s = SimState::Init("Was it a Car wreck?");
  ASSERT_TRUE(s.Execute("SELECT car wreck").applied());
  EXPECT_EQ(s.selection(), (WordRange{3, 5}));
}

TEST(SimExecuteTest, SelectRelativeWords) {
  SimState s = SimState::Init("red green blue");
  ASSERT_TRUE(s.Execute("SELECT green").applied());
  ASSERT_TRUE(s.Execute("SELECT NEXT WORD").applied());
  EXPECT_EQ(s.selection(), (WordRange{2, 3}));
  ASSERT_TRUE(s.Execute("SELECT PREVIOUS WORD").applied());
  EXPECT_EQ(s.selection(), (WordRange{1, 2}));
  // No selection: relative to the cursor, which sits after the last edit.
  ASSERT_TRUE(s.Execute("MOVE BEFORE red").applied());
  EXPECT_EQ(s.Execute("SELECT PREVIOUS WORD").reason,
            FailureReason::kTargetNotFound);
}

TEST(SimExecuteTest, ReplaceAndMove) {
  SimState s = SimState::Init("take a rest from work");
  ASSERT_TRUE(s.Execute("REPLACE work WITH the office").applied());
  EXPECT_EQ(s.buffer_text(), "take a rest from the office");
  size_t undo = s.undo_depth();
  ASSERT_TRUE(s.Execute("MOVE BEFORE rest").applied());
  EXPECT_EQ(s.cursor(), 2u);
  EXPECT_EQ(s.undo_depth(), undo);
  EXPECT_EQ(s.buffer_text(), "take a rest from the office");
}

TEST(SimExecuteTest, CorrectUsesLexicon) {
  CorrectionLexicon lex = ParseCorrectionLexicon(
      "freqwuent = frequent\n# comment\nwrek = wreck | wreak\n");
  SimState s = SimState::Init("a freqwuent car wrek", lex);
  ASSERT_TRUE(s.Execute("CORRECT freqwuent").applied());
  EXPECT_EQ(s.buffer_text(), "a frequent car wrek");
  Outcome o = s.Execute("CORRECT wrek");
  ASSERT_EQ(o.kind, Outcome::Kind::kPendingDisambiguation);
  EXPECT_EQ(o.candidates, (std::vector<std::string>{"wreck", "wreak"}));
  ASSERT_TRUE(s.Execute("CHOOSE 1").applied());
  EXPECT_EQ(s.buffer_text(), "a frequent car wreck");
  EXPECT_EQ(s.Execute("CORRECT car").reason, FailureReason::kTargetNotFound);
}

TEST(SimExecuteTest, LexiconFileLoads) {
  CorrectionLexicon lex =
      LoadCorrectionLexicon(std::string(CMDSHIM_DATA_DIR) + "/corrections.txt");
  ASSERT_TRUE(lex.count("freqwuent"));
  EXPECT_EQ(lex["freqwuent"], (std::vector<std::string>{"frequent"}));
}

TEST(SimExecuteTest, ChooseRules) {
  SimState s = SimState::Init("x y x y x");
  EXPECT_TRUE(s.Execute("CHOOSE 1").failed());
  ASSERT_EQ(s.Execute("DELETE x").kind, Outcome::Kind::kPendingDisambiguation);
  SimState before = s;
  EXPECT_EQ(s.Execute("CHOOSE 4").reason, FailureReason::kTargetNotFound);
  EXPECT_EQ(s, before);
  ASSERT_TRUE(s.Execute("CHOOSE 3").applied());
  EXPECT_EQ(s.buffer_text(), "x y x y");
}

TEST(SimExecuteTest, UndoRedo) {
  SimState s = SimState::Init("one two");
  ASSERT_TRUE(s.Execute("INSERT three AFTER two").applied());
  ASSERT_TRUE(s.Execute("UNDO THAT").applied());
  EXPECT_EQ(s.buffer_text(), "one two");
  ASSERT_TRUE(s.Execute("REDO THAT").applied());
  EXPECT_EQ(s.buffer_text(), "one two three");
  ASSERT_TRUE(s.Execute("UNDO THAT").applied());
  ASSERT_TRUE(s.Execute("DELETE one").applied());
  EXPECT_EQ(s.Execute("REDO THAT").reason, FailureReason::kNothingToRedo);
}

TEST(SimExecuteTest, BufferTextProjections) {
  SimState s = SimState::Init("a b c");
  EXPECT_EQ(s.buffer_text(), "a b c");
  s.Execute("DELETE b");
  EXPECT_EQ(s.buffer_text(), "a c");
  s.Execute("UNDO THAT");
  EXPECT_EQ(s.buffer_text(), "a b c");
}

TEST(SimExecuteTest, FreeFunctionLeavesInputUntouched) {
  SimState s = SimState::Init("a b c");
  auto [next, o] = Execute(s, "DELETE b");
  EXPECT_TRUE(o.applied());
  EXPECT_EQ(s.buffer_text(), "a b c");
  EXPECT_EQ(next.buffer_text(), "a c");
}

// The insertion task from the formative study: the erroneous sentence sits
// between two correct copies, so "enforcement" is ambiguous and the optimal
// sequence is the insert followed by a choice.
TEST(SimReplayTest, InsertionTrace) {
  const std::string good = "The law enforcement has responsibility for public safety.";
  const std::string bad = "The enforcement has responsibility for public safety.";
  SimState s = SimState::Init(good + " " + bad + " " + good);
  Outcome o = s.Execute("INSERT law BEFORE enforcement");
  ASSERT_EQ(o.kind, Outcome::Kind::kPendingDisambiguation);
  EXPECT_EQ(o.candidates.size(), 3u);
  ASSERT_TRUE(s.Execute("CHOOSE 2").applied());
  EXPECT_EQ(s.buffer_text(), good + " " + good + " " + good);
}

// --- Properties ---------------------------------------------------------

Words RandomBuffer(std::mt19937_64& rng, size_t vocab) {
  Words w;
  size_t n = 1 + Pick(rng, 30);
  for (size_t i = 0; i < n; ++i) {
    w.emplace_back(testing::kVocab[Pick(rng, vocab)]);
  }
  return w;
}

std::string RandomCommandText(std::mt19937_64& rng, const Words& buffer) {
  auto sub = [&]() {
    size_t b = Pick(rng, buffer.size());
    size_t len = 1 + Pick(rng, std::min<size_t>(3, buffer.size() - b));
    return Join(std::span<const std::string>(buffer).subspan(b, len));
  };
  switch (Pick(rng, 8)) {
    case 0:
      return "SELECT " + sub();
    case 1:
      return "DELETE " + sub();
    case 2:
      return "INSERT " + Join(testing::RandomPhrase(rng)) + " BEFORE " + sub();
    case 3:
      return "INSERT " + Join(testing::RandomPhrase(rng)) + " AFTER " + sub();
    case 4:
      return "REPLACE " + sub() + " WITH " + Join(testing::RandomPhrase(rng));
    case 5:
      return "SELECT NEXT WORD";
    case 6:
      return "DELETE THAT";
    default:
      return "CHOOSE " + std::to_string(1 + Pick(rng, 3));
  }
}

TEST(SimPropertyTest, FailedNeverMutates) {
  std::mt19937_64 rng(11);
  int failures = 0;
  for (int i = 0; i < 2000; ++i) {
    SimState s = SimState::Init(RandomBuffer(rng, 6));
    for (int k = 0; k < 6; ++k) {
      std::string cmd = Pick(rng, 5) == 0
                            ? SerializeCanonical(testing::RandomCommand(rng))
                            : RandomCommandText(rng, s.buffer().empty()
                                                         ? Words{"x"}
                                                         : s.buffer());
      SimState before = s;
      Outcome o = s.Execute(cmd);
      if (o.failed()) {
        ++failures;
        ASSERT_EQ(s, before) << cmd;
      }
      if (s.selection()) {
        ASSERT_LT(s.selection()->begin, s.selection()->end);
        ASSERT_LE(s.selection()->end, s.buffer().size());
      }
    }
  }
  EXPECT_GT(failures, 100);
}

TEST(SimPropertyTest, UndoRedoInverse) {
  std::mt19937_64 rng(12);
  int edits = 0;
  for (int i = 0; i < 1000; ++i) {
    SimState s = SimState::Init(RandomBuffer(rng, 8));
    if (Pick(rng, 2)) s.Execute("SELECT " + s.buffer()[0]);
    std::string cmd = RandomCommandText(rng, s.buffer());
    const Words buf = s.buffer();
    const auto sel = s.selection();
    const size_t depth = s.undo_depth();
    Outcome o = s.Execute(cmd);
    if (s.undo_depth() == depth) continue;  // not an edit
    ++edits;
    const Words after_buf = s.buffer();
    const auto after_sel = s.selection();
    ASSERT_TRUE(s.Execute("UNDO THAT").applied());
    EXPECT_EQ(s.buffer(), buf) << cmd;
    EXPECT_EQ(s.selection(), sel) << cmd;
    ASSERT_TRUE(s.Execute("REDO THAT").applied());
    EXPECT_EQ(s.buffer(), after_buf) << cmd;
    EXPECT_EQ(s.selection(), after_sel) << cmd;
  }
  EXPECT_GT(edits, 300);
}

TEST(SimPropertyTest, AgreesWithSpliceOracle) {
  std::mt19937_64 rng(13);
  const char* ops[] = {"select", "delete", "insert-before", "insert-after",
                       "replace", "move"};
  int checked = 0;
  while (checked < 1000) {
    Words buf = RandomBuffer(rng, 12);
    const std::string text = Join(buf);
    size_t b = Pick(rng, buf.size());
    size_t len = 1 + Pick(rng, std::min<size_t>(3, buf.size() - b));
    const std::string target =
        Join(std::span<const std::string>(buf).subspan(b, len));
    const std::string op = ops[Pick(rng, 6)];
    const std::string phrase = Join(testing::RandomPhrase(rng));
    auto expected = testing::OracleApply(text, op, target, phrase);
    if (!expected) continue;
    std::string cmd;
    if (op == "select") cmd = "SELECT " + target;
    if (op == "delete") cmd = "DELETE " + target;
    if (op == "insert-before") cmd = "INSERT " + phrase + " BEFORE " + target;
    if (op == "insert-after") cmd = "INSERT " + phrase + " AFTER " + target;
    if (op == "replace") cmd = "REPLACE " + target + " WITH " + phrase;
    if (op == "move") cmd = "MOVE AFTER " + target;
    SimState s = SimState::Init(buf);
    Outcome o = s.Execute(cmd);
    ASSERT_TRUE(o.applied()) << text << " / " << cmd;
    EXPECT_EQ(s.buffer_text(), expected->buffer) << text << " / " << cmd;
    if (expected->selected_at >= 0) {
      ASSERT_TRUE(s.selection().has_value());
      EXPECT_EQ(s.selection()->begin, static_cast<size_t>(expected->selected_at));
    }
    ++checked;
  }
}

TEST(SimPropertyTest, DisambiguationNumberingIsDenseAndOrdered) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 500; ++i) {
    SimState s = SimState::Init(RandomBuffer(rng, 3));
    const std::string word = s.buffer()[Pick(rng, s.buffer().size())];
    Outcome o = s.Execute("SELECT " + word);
    const auto oracle = testing::OracleFind(Join(s.buffer()), word);
    if (oracle.size() < 2) continue;
    ASSERT_EQ(o.kind, Outcome::Kind::kPendingDisambiguation);
    ASSERT_EQ(o.candidate_ranges.size(), oracle.size());
    for (size_t k = 1; k < o.candidate_ranges.size(); ++k) {
      EXPECT_LE(o.candidate_ranges[k - 1].end, o.candidate_ranges[k].begin);
    }
    size_t n = 1 + Pick(rng, oracle.size());
    SimState t = s;
    ASSERT_TRUE(t.Execute("CHOOSE " + std::to_string(n)).applied());
    EXPECT_EQ(t.selection(), o.candidate_ranges[n - 1]);
  }
}

TEST(SimSnapshotTest, RoundTrip) {
  CorrectionLexicon lex = ParseCorrectionLexicon("wrek = wreck | wreak");
  SimState s = SimState::Init("a wrek and a wrek", lex);
  std::string snap = s.ExportSnapshot();
  EXPECT_EQ(snap, "buffer: a wrek and a wrek\ncursor: 5\nselection: none\npending: none\n");

  ASSERT_EQ(s.Execute("SELECT a").kind, Outcome::Kind::kPendingDisambiguation);
  snap = s.ExportSnapshot();
  EXPECT_EQ(snap,
            "buffer: a wrek and a wrek\ncursor: 5\nselection: none\n"
            "pending: targets SELECT a | 0 1, 3 4\n");
  auto back = SimState::ImportSnapshot(snap, lex);
  ASSERT_TRUE(back.ok()) << back.error();
  EXPECT_EQ(back->ExportSnapshot(), snap);
  ASSERT_TRUE(back->Execute("CHOOSE 2").applied());
  EXPECT_EQ(back->ExportSnapshot(),
            "buffer: a wrek and a wrek\ncursor: 4\nselection: 3 4\npending: none\n");

  SimState c = SimState::Init("one wrek", lex);
  ASSERT_EQ(c.Execute("CORRECT wrek").kind, Outcome::Kind::kPendingDisambiguation);
  snap = c.ExportSnapshot();
  EXPECT_EQ(snap,
            "buffer: one wrek\ncursor: 2\nselection: none\n"
            "pending: corrections CORRECT wrek | 1 2 | wreck ; wreak\n");
  auto back2 = SimState::ImportSnapshot(snap, lex);
  ASSERT_TRUE(back2.ok()) << back2.error();
  EXPECT_EQ(back2->ExportSnapshot(), snap);
}

TEST(SimSnapshotTest, RejectsMalformed) {
  EXPECT_FALSE(SimState::ImportSnapshot("buffer: a b\n").ok());
  EXPECT_FALSE(SimState::ImportSnapshot(
                   "buffer: a b\ncursor: 9\nselection: none\npending: none\n")
                   .ok());
  EXPECT_FALSE(SimState::ImportSnapshot(
                   "buffer: a b\ncursor: 0\nselection: 1 5\npending: none\n")
                   .ok());
  EXPECT_FALSE(SimState::ImportSnapshot("buffer: a a\ncursor: 0\nselection: none\n"
                                        "pending: targets SELECT a | 0 1, 0 1\n")
                   .ok());
}

}  // namespace
}  // namespace cmdshim
