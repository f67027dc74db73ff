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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "cmdshim/normalizer.h"
#include "gtest/gtest.h"

namespace cmdshim {
namespace {

const Dataset& DefaultData() {
  static const Dataset data = *Generate(DistributionSpec::Default());
  return data;
}

std::string Predict(const RuleBackend& backend, const DatasetSample& s) {
  NormalizeRequest req{TokenizeUtterance(s.input.utterance),
                       SelectionContext{SplitWords(s.input.selection)},
                       {}};
  NormalizationResult r = backend.Normalize(req);
  if (s.input.question) {
    const auto* clarify = std::get_if<Clarify>(&r);
    if (!clarify || clarify->question != *s.input.question) return "<question mismatch>";
    r = backend.ApplyClarification(clarify->partial, TokenizeUtterance(*s.input.answer));
  }
  return PredictionText(r);
}

bool UsesOutOfLexiconVerb(const DatasetSample& s) {
  for (const std::string& w : SplitWords(s.input.utterance)) {
    for (const auto& [verb, op] : OutOfLexiconVerbs()) {
      if (w == verb) return true;
    }
  }
  return false;
}

TEST(EncodeInputTest, SampleRowFormats) {
  EXPECT_EQ(EncodeInput({"fix meeting", "", {}, {}}), "fix meeting | selection:");
  EXPECT_EQ(EncodeInput({"please add at home before that", "tonight", {}, {}}),
            "please add at home before that | selection: tonight");
  EXPECT_EQ(EncodeInput({"insert before apple pie", "",
                         "What should I insert before apple pie?", "in the morning"}),
            "insert before apple pie | selection: | CLARIFICATION QUESTION: What should I "
            "insert before apple pie? | CLARIFICATION: in the morning");
}

TEST(EncodeInputTest, DecodeRejectsMalformed) {
  EXPECT_FALSE(DecodeInput("fix meeting").ok());
  EXPECT_FALSE(DecodeInput("fix meeting | sel: x").ok());
  EXPECT_FALSE(DecodeInput(" | selection:").ok());
  EXPECT_FALSE(DecodeInput("a | selection: | b").ok());
  EXPECT_FALSE(DecodeInput("a | selection: | Q: x | CLARIFICATION: y").ok());
  auto ok = DecodeInput("fix meeting | selection: the plan");
  ASSERT_TRUE(ok.ok());
  EXPECT_EQ(ok->selection, "the plan");
}

TEST(EncodeInputTest, RoundTripOverGeneratedSamples) {
  for (const auto* split : {&DefaultData().train, &DefaultData().test}) {
    for (const DatasetSample& s : *split) {
      auto back = DecodeInput(EncodeInput(s.input));
      ASSERT_TRUE(back.ok()) << EncodeInput(s.input);
      EXPECT_EQ(*back, s.input);
    }
  }
}

TEST(ApportionTest, DefaultOperationCounts) {
  // Hand-computed: weights sum to 1.001, floors give 993, the seven largest
  // remainders (redo .942 down to select .824) get one more each.
  std::vector<double> w;
  for (const auto& [op, x] : DistributionSpec::Default().op_weights) w.push_back(x);
  EXPECT_EQ(Apportion(w, 1000),
            (std::vector<size_t>{184, 176, 169, 137, 116, 98, 62, 58}));
}

TEST(ApportionTest, TiesGoToListingOrder) {
  EXPECT_EQ(Apportion(std::vector<double>{1, 1, 1}, 4), (std::vector<size_t>{2, 1, 1}));
  EXPECT_EQ(Apportion(std::vector<double>{1, 1, 1}, 5), (std::vector<size_t>{2, 2, 1}));
  EXPECT_EQ(Apportion(std::vector<double>{0, 1}, 3), (std::vector<size_t>{0, 3}));
}

TEST(ApportionTest, PropertyWithinOneOfQuota) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> w(1 + rng() % 9);
    double sum = 0;
    for (double& x : w) sum += (x = static_cast<double>(rng() % 1000));
    if (sum == 0) continue;
    size_t total = rng() % 3000;
    auto out = Apportion(w, total);
    size_t got = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      got += out[i];
      EXPECT_LT(std::abs(static_cast<double>(out[i]) - w[i] / sum * total), 1.0);
    }
    EXPECT_EQ(got, total);
  }
}

TEST(PlanSplitTest, MarginsAndCompatibility) {
  const DistributionSpec spec = DistributionSpec::Default();
  for (size_t size : {1000, 400, 150, 7}) {
    auto plan = PlanSplit(spec, size);
    ASSERT_TRUE(plan.ok());
    size_t exact = 0;
    for (size_t o = 0; o < plan->cells.size(); ++o) {
      size_t row = 0;
      for (size_t v : plan->cells[o]) row += v;
      EXPECT_EQ(row, plan->op_counts[o]);
      exact += plan->cells[o][0];
    }
    EXPECT_EQ(exact, plan->exact);
    for (size_t b = 0; b < plan->bucket_counts.size(); ++b) {
      size_t col = 0;
      for (const auto& r : plan->cells) col += r[1 + b];
      EXPECT_EQ(col, plan->bucket_counts[b]);
    }
  }
  auto plan = *PlanSplit(spec, 1000);
  EXPECT_EQ(plan.exact, 200u);
  // undo (row 6) never carries a template substitution (bucket 0).
  EXPECT_EQ(plan.cells[6][1], 0u);
  // Every op gets a share of the exact commands.
  for (const auto& row : plan.cells) EXPECT_GT(row[0], 0u);
}

TEST(PlanSplitTest, InfeasibleSpecs) {
  DistributionSpec neg = DistributionSpec::Default();
  neg.op_weights[0].second = -0.1;
  auto r = PlanSplit(neg, 100);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().kind, DatasetError::Kind::kInfeasibleSpec);

  DistributionSpec only_undo = DistributionSpec::Default();
  only_undo.op_weights = {{Operation::kUndo, 1.0}};
  only_undo.error_weights = {{RepairCategory::kSubstituteTemplate, 1.0}};
  r = PlanSplit(only_undo, 100);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().kind, DatasetError::Kind::kInfeasibleSpec);

  DistributionSpec zero = DistributionSpec::Default();
  zero.test = 0;
  EXPECT_FALSE(Generate(zero).ok());
}

TEST(GenerateTest, SplitSizesAndDistributions) {
  const DistributionSpec spec = DistributionSpec::Default();
  const Dataset& data = DefaultData();
  ASSERT_EQ(data.train.size(), 1000u);
  ASSERT_EQ(data.val.size(), 400u);
  ASSERT_EQ(data.test.size(), 150u);
  double op_sum = 0, err_sum = 0;
  for (const auto& [op, w] : spec.op_weights) op_sum += w;
  for (const auto& [c, w] : spec.error_weights) err_sum += w;
  for (const auto* split : {&data.train, &data.val, &data.test}) {
    std::map<Operation, size_t> ops;
    std::vector<size_t> buckets(spec.error_weights.size(), 0);
    size_t incorrect = 0;
    for (const DatasetSample& s : *split) {
      ++ops[s.op];
      if (!s.category) continue;
      ++incorrect;
      auto b = BucketOf(spec, *s.category);
      ASSERT_TRUE(b.has_value());
      ++buckets[*b];
    }
    const double n = static_cast<double>(split->size());
    EXPECT_LE(std::abs(static_cast<double>(split->size() - incorrect) - spec.exact_share * n), 1.0);
    for (const auto& [op, w] : spec.op_weights) {
      EXPECT_LE(std::abs(static_cast<double>(ops[op]) - w / op_sum * n), 1.0)
          << OperationName(op);
    }
    for (size_t b = 0; b < buckets.size(); ++b) {
      EXPECT_LE(std::abs(static_cast<double>(buckets[b]) -
                         spec.error_weights[b].second / err_sum * incorrect),
                1.0)
          << RepairCategoryName(spec.error_weights[b].first);
    }
  }
}

TEST(GenerateTest, Deterministic) {
  DistributionSpec spec = DistributionSpec::Default();
  auto a = *Generate(spec);
  auto b = *Generate(spec);
  EXPECT_EQ(ToJsonl(a.train), ToJsonl(b.train));
  EXPECT_EQ(ToJsonl(a.test), ToJsonl(b.test));
  spec.seed += 1;
  auto c = *Generate(spec);
  EXPECT_NE(ToJsonl(a.train), ToJsonl(c.train));
}

TEST(GenerateTest, SmallSplitsAcrossSeeds) {
  DistributionSpec spec = DistributionSpec::Default();
  for (size_t size : {1, 2, 5, 8, 13, 20, 37, 60}) {
    for (uint64_t seed = 0; seed < 25; ++seed) {
      spec.seed = seed;
      spec.train = spec.val = spec.test = size;
      auto data = Generate(spec);
      ASSERT_TRUE(data.ok()) << size << " seed " << seed << ": " << data.error().ToString();
      ASSERT_EQ(data->train.size(), size);
      for (const DatasetSample& s : data->test) {
        if (s.expected.rfind(kAskPrefix, 0) != 0) {
          EXPECT_TRUE(ParseCanonical(s.expected).ok()) << s.expected;
        }
      }
    }
  }
}

TEST(GenerateTest, OutputsAreCommandsOrQuestions) {
  for (const DatasetSample& s : DefaultData().train) {
    if (s.expected.rfind(kAskPrefix, 0) == 0) {
      EXPECT_EQ(s.category, RepairCategory::kMissingArgs);
      EXPECT_FALSE(s.input.question.has_value());
    } else {
      auto cmd = ParseCanonical(s.expected);
      ASSERT_TRUE(cmd.ok()) << s.expected;
      EXPECT_EQ(cmd->op(), s.op);
      EXPECT_EQ(SerializeCanonical(*cmd), s.expected);
    }
    if (!s.category) {
      EXPECT_TRUE(ParseCanonical(s.input.utterance).ok()) << s.input.utterance;
    } else {
      EXPECT_FALSE(ParseCanonical(s.input.utterance).ok()) << s.input.utterance;
    }
  }
}

TEST(GenerateTest, MissingArgsHasAskAndFollowUpVariants) {
  for (const auto* split : {&DefaultData().train, &DefaultData().val, &DefaultData().test}) {
    size_t ask = 0, follow = 0;
    for (const DatasetSample& s : *split) {
      if (s.category != RepairCategory::kMissingArgs) continue;
      ask += s.expected.rfind(kAskPrefix, 0) == 0;
      follow += s.input.question.has_value();
    }
    EXPECT_GT(ask, 0u);
    EXPECT_GT(follow, 0u);
  }
}

TEST(GenerateTest, SelectionShare) {
  size_t with = 0;
  for (const DatasetSample& s : DefaultData().train) with += s.has_selection();
  EXPECT_NEAR(with / 1000.0, 0.292, 0.01);
}

TEST(GenerateTest, VariationsPerDistinctCommand) {
  std::map<std::string, size_t> per;
  for (const DatasetSample& s : DefaultData().train) {
    if (s.expected.rfind(kAskPrefix, 0) != 0) ++per[s.expected];
  }
  size_t total = 0;
  for (const auto& [cmd, n] : per) total += n;
  EXPECT_GE(static_cast<double>(total) / per.size(), 5.0) << per.size() << " distinct";
}

TEST(GenerateTest, ConsistentWithRuleNormalizer) {
  const RuleBackend backend;
  for (const auto* split : {&DefaultData().train, &DefaultData().val, &DefaultData().test}) {
    size_t ool = 0;
    for (const DatasetSample& s : *split) {
      const bool out_of_lexicon = UsesOutOfLexiconVerb(s);
      ool += out_of_lexicon;
      std::string got = Predict(backend, s);
      if (out_of_lexicon) {
        EXPECT_EQ(s.category, RepairCategory::kSubstituteCmd);
        EXPECT_NE(got, s.expected) << EncodeInput(s.input);
      } else {
        EXPECT_EQ(got, s.expected) << EncodeInput(s.input) << " [" << CategoryName(s.category)
                                   << "]";
      }
    }
    EXPECT_GT(ool, 0u);
    EXPECT_LE(static_cast<double>(ool) / split->size(), 0.05);
  }
}

TEST(JsonlTest, RoundTrip) {
  const auto& train = DefaultData().train;
  for (size_t n : {0, 1, 1000}) {
    std::span<const DatasetSample> part(train.data(), n);
    auto back = ParseJsonl(ToJsonl(part));
    ASSERT_TRUE(back.ok());
    ASSERT_EQ(back->size(), n);
    EXPECT_TRUE(std::equal(part.begin(), part.end(), back->begin()));
  }
  std::string line = ToJsonl(std::span(train.data(), 1));
  EXPECT_EQ(line.find("{\"input\":"), 0u);
  EXPECT_EQ(line.back(), '\n');
}

TEST(JsonlTest, MalformedLineNumbers) {
  std::string good = ToJsonl(std::span(DefaultData().train.data(), 2));
  auto r = ParseJsonl(good + "{not json}\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().kind, DatasetError::Kind::kMalformed);
  EXPECT_EQ(r.error().line, 3u);

  r = ParseJsonl(R"({"input":"x | selection:","output":"SELECT x","op":"select","error_category":"exact","has_selection":true})");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().line, 1u);
  r = ParseJsonl(R"({"input":"x | selection:","output":"bogus","op":"select","error_category":"exact","has_selection":false})");
  EXPECT_FALSE(r.ok());
  r = ParseJsonl(R"({"input":"x | selection:","output":"SELECT x","op":"zap","error_category":"exact","has_selection":false})");
  EXPECT_FALSE(r.ok());
}

TEST(JsonlTest, FilesAndManifest) {
  auto dir = std::filesystem::temp_directory_path() / "cmdshim_dataset_test";
  std::filesystem::remove_all(dir);
  const DistributionSpec spec = DistributionSpec::Default();
  ASSERT_FALSE(WriteDataset(dir.string(), spec, DefaultData()).has_value());
  auto test = ReadJsonl((dir / "test.jsonl").string());
  ASSERT_TRUE(test.ok());
  EXPECT_EQ(*test, DefaultData().test);
  std::ifstream m(dir / "manifest.json");
  auto manifest = nlohmann::json::parse(m);
  EXPECT_EQ(manifest["spec"]["seed"], spec.seed);
  EXPECT_EQ(manifest["splits"]["train"]["count"], 1000);
  EXPECT_FALSE(std::filesystem::exists(dir / "train.jsonl.tmp"));

  auto missing = ReadJsonl((dir / "nope.jsonl").string());
  ASSERT_FALSE(missing.ok());
  EXPECT_EQ(missing.error().kind, DatasetError::Kind::kIo);
  EXPECT_TRUE(WriteJsonl({}, (dir / "no_such_dir" / "x.jsonl").string()).has_value());
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace cmdshim
