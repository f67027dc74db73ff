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

// Seeded synthetic dataset of (utterance, selection) -> command samples and
// its JSONL codec.
//
// Encoded input format:
//   <utterance> | selection: <phrase?>
//     [| CLARIFICATION QUESTION: <question> | CLARIFICATION: <answer>]

#ifndef CMDSHIM_DATASET_H_
#define CMDSHIM_DATASET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmdshim/command.h"
#include "cmdshim/lexicon.h"
#include "cmdshim/result.h"
#include "json.hpp"

namespace cmdshim {

inline constexpr std::string_view kExactCategoryName = "exact";
inline constexpr std::string_view kAskPrefix = "ASK: ";

struct SampleInput {
  std::string utterance;
  std::string selection;  // empty when nothing is selected
  // Both set for two-turn clarification samples, both empty otherwise.
  std::optional<std::string> question;
  std::optional<std::string> answer;

  bool has_selection() const { return !selection.empty(); }
  friend bool operator==(const SampleInput&, const SampleInput&) = default;
};

struct DatasetSample {
  SampleInput input;
  std::string expected;  // canonical command or "ASK: <question>"
  Operation op = Operation::kSelect;
  std::optional<RepairCategory> category;  // empty for exact commands

  bool has_selection() const { return input.has_selection(); }
  friend bool operator==(const DatasetSample&, const DatasetSample&) = default;
};

// "exact" or the repair category name.
std::string CategoryName(const std::optional<RepairCategory>& category);

struct DatasetError {
  enum class Kind : uint8_t { kInfeasibleSpec, kIo, kMalformed };
  Kind kind;
  std::string message;
  size_t line = 0;  // 1-based line of a malformed JSONL record

  std::string ToString() const;
};

std::string EncodeInput(const SampleInput& input);
Result<SampleInput, std::string> DecodeInput(std::string_view encoded);

struct DistributionSpec {
  // Relative weights; normalized by their sum. Listing order breaks
  // apportionment ties.
  std::vector<std::pair<Operation, double>> op_weights;
  // Weights over the incorrect (non-exact) samples. swap_cmd samples count
  // toward the substitute_cmd bucket unless swap_cmd is listed itself.
  std::vector<std::pair<RepairCategory, double>> error_weights;
  double exact_share = 0.2;
  double selection_ratio = 0.292;
  // Fraction of substitute_cmd samples whose verb is outside the lexicon.
  double out_of_lexicon_share = 0.2;
  // Fraction of select/choose substitute_cmd samples that swap the two verbs.
  double swap_share = 0.5;
  size_t train = 1000;
  size_t val = 400;
  size_t test = 150;
  uint64_t seed = 20250101;

  static DistributionSpec Default();
  std::optional<DatasetError> Validate() const;
};

// Verbs the generator uses for the out-of-lexicon quota.
std::span<const std::pair<const char*, Operation>> OutOfLexiconVerbs();

// Largest-remainder apportionment of `total` over `weights`; ties go to the
// earlier entry.
std::vector<size_t> Apportion(std::span<const double> weights, size_t total);

// Sample counts for one split. Bucket order follows spec.error_weights.
struct SplitPlan {
  std::vector<size_t> op_counts;
  size_t exact = 0;
  std::vector<size_t> bucket_counts;
  // cells[op][0] is exact; cells[op][1 + b] is bucket b.
  std::vector<std::vector<size_t>> cells;
};

Result<SplitPlan, DatasetError> PlanSplit(const DistributionSpec& spec, size_t size);

// Index into spec.error_weights a category is counted under, if any.
std::optional<size_t> BucketOf(const DistributionSpec& spec, RepairCategory c);

struct Dataset {
  std::vector<DatasetSample> train;
  std::vector<DatasetSample> val;
  std::vector<DatasetSample> test;
};

Result<Dataset, DatasetError> Generate(const DistributionSpec& spec,
                                       const Lexicon& lexicon = Lexicon::Default());

nlohmann::ordered_json ToJson(const DatasetSample& s);
Result<DatasetSample, std::string> SampleFromJson(const nlohmann::json& j);

std::string ToJsonl(std::span<const DatasetSample> samples);
Result<std::vector<DatasetSample>, DatasetError> ParseJsonl(std::string_view text);

// Writes through a temporary file renamed into place.
std::optional<DatasetError> WriteJsonl(std::span<const DatasetSample> samples,
                                       const std::string& path);
Result<std::vector<DatasetSample>, DatasetError> ReadJsonl(const std::string& path);

nlohmann::ordered_json ManifestJson(const DistributionSpec& spec, const Dataset& data);

// train.jsonl, val.jsonl, test.jsonl and manifest.json under `dir`.
std::optional<DatasetError> WriteDataset(const std::string& dir,
                                         const DistributionSpec& spec,
                                         const Dataset& data);

// Shared by the tools: atomic whole-file write.
std::optional<DatasetError> WriteFileAtomic(const std::string& path,
                                            std::string_view contents);

}  // namespace cmdshim

#endif  // CMDSHIM_DATASET_H_
