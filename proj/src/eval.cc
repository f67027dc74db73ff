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

#include "cmdshim/eval.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cmdshim/session.h"

namespace cmdshim {
namespace {

Words FoldedTokens(std::string_view s) { return SplitWords(ToLower(s)); }

std::string Fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

nlohmann::ordered_json CellJson(const AccuracyCell& c) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["exact"] = c.exact;
  j["exact_match"] = c.accuracy();
  j["rouge_l"] = c.rouge();
  return j;
}

void AppendCells(std::ostringstream& out, const char* title,
                 const std::map<std::string, AccuracyCell>& cells) {
  char line[128];
  std::snprintf(line, sizeof(line), "%-22s %6s %8s %8s\n", title, "n", "exact", "rouge_l");
  out << line;
  for (const auto& [name, c] : cells) {
    std::snprintf(line, sizeof(line), "%-22s %6zu %8s %8s\n", name.c_str(), c.n,
                  Fixed(c.accuracy()).c_str(), Fixed(c.rouge()).c_str());
    out << line;
  }
}

ReplayOutcome FromFailure(FailureReason r) {
  return r == FailureReason::kUnrecognized ? ReplayOutcome::kSyntax : ReplayOutcome::kRecognition;
}

std::vector<int64_t> Gaps(const ReplayCase& c, size_t tokens, const ReplayConfig& config,
                          std::mt19937_64& rng) {
  if (tokens > 0 && c.gaps_ms.size() == tokens - 1) return c.gaps_ms;
  std::vector<int64_t> gaps;
  const auto span = static_cast<uint64_t>(config.jitter_max_ms - config.jitter_min_ms) + 1;
  for (size_t i = 1; i < tokens; ++i) {
    gaps.push_back(config.jitter_min_ms + static_cast<int64_t>(rng() % span));
  }
  return gaps;
}

ReplayOutcome RunLegacy(const ReplayCase& c, const Words& tokens,
                        const std::vector<int64_t>& gaps, const ReplayConfig& config) {
  SimState sim = SimState::Init(c.buffer, config.corrections);
  for (const std::string& s : c.setup) sim.Execute(s);
  Segmenter seg(config.legacy);
  std::vector<SegmentEvent> events;
  int64_t t = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) t += gaps[i - 1];
    auto r = seg.Push(tokens[i], t);
    // A discard while the user is still speaking is a mid-command timeout.
    for (const SegmentEvent& e : *r) {
      if (e.kind == SegmentEvent::Kind::kDiscarded) return ReplayOutcome::kTimeout;
    }
    events.insert(events.end(), r->begin(), r->end());
  }
  // After the last word, a discard means the VUI never recognized it.
  auto tail = seg.Tick(t + config.legacy.window_ms + 1);
  events.insert(events.end(), tail.begin(), tail.end());

  std::optional<ReplayOutcome> failure;
  for (const SegmentEvent& e : events) {
    if (e.kind == SegmentEvent::Kind::kDiscarded) {
      failure = failure.value_or(ReplayOutcome::kSyntax);
      continue;
    }
    Outcome o = sim.Execute(Join(e.words()));
    if (o.failed() && !failure) failure = FromFailure(*o.reason);
  }
  if (events.empty()) return ReplayOutcome::kSyntax;
  return failure.value_or(ReplayOutcome::kSucceeded);
}

ReplayOutcome RunShim(const ReplayCase& c, const Words& tokens, const std::vector<int64_t>& gaps,
                      const ReplayConfig& config,
                      const std::shared_ptr<const NormalizerBackend>& backend) {
  SessionConfig sc;
  sc.segmenter = config.shim;
  Session session(c.buffer, config.corrections, sc, backend);
  for (const std::string& s : c.setup) session.Utter(s);
  std::vector<SessionEvent> events;
  int64_t t = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) t += gaps[i - 1];
    auto batch = session.PushToken(tokens[i], t);
    events.insert(events.end(), batch.begin(), batch.end());
  }
  auto tail = session.Tick(t + config.shim.window_ms + 1);
  events.insert(events.end(), tail.begin(), tail.end());

  std::optional<ReplayOutcome> failure;
  bool clarified = false;
  for (const SessionEvent& e : events) {
    if (e.type == SessionEvent::Type::kVuiOutcome && e.outcome->failed() && !failure) {
      failure = FromFailure(*e.outcome->reason);
    } else if (e.type == SessionEvent::Type::kSuggestionShown && !failure) {
      failure = ReplayOutcome::kSyntax;
    } else if (e.type == SessionEvent::Type::kClarificationAsked) {
      clarified = true;
    }
  }
  if (failure) return *failure;
  return clarified ? ReplayOutcome::kClarified : ReplayOutcome::kSucceeded;
}

nlohmann::ordered_json CountsJson(const ConditionCounts& c) {
  nlohmann::ordered_json j;
  j["cases"] = c.cases;
  j["succeeded"] = c.succeeded;
  j["clarified"] = c.clarified;
  j["failures"] = c.failures();
  j["timeout"] = c.timeout;
  j["syntax"] = c.syntax;
  j["recognition"] = c.recognition;
  return j;
}

}  // namespace

bool ExactMatch(std::string_view pred, std::string_view gold) {
  return FoldedTokens(pred) == FoldedTokens(gold);
}

double RougeL(std::string_view pred, std::string_view gold) {
  const Words p = FoldedTokens(pred), g = FoldedTokens(gold);
  if (p.empty() || g.empty()) return 0.0;
  std::vector<size_t> prev(g.size() + 1, 0), cur(g.size() + 1, 0);
  for (size_t i = 1; i <= p.size(); ++i) {
    for (size_t j = 1; j <= g.size(); ++j) {
      cur[j] = p[i - 1] == g[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[g.size()]);
  const double precision = lcs / p.size(), recall = lcs / g.size();
  if (precision + recall == 0) return 0.0;
  return 2 * precision * recall / (precision + recall);
}

SamplePrediction PredictSample(const NormalizerBackend& backend, const DatasetSample& s) {
  SamplePrediction out;
  try {
    NormalizeRequest req{TokenizeUtterance(s.input.utterance),
                         SelectionContext{FoldedTokens(s.input.selection)},
                         {}};
    NormalizationResult r = backend.Normalize(req);
    if (s.input.question) {
      const auto* clarify = std::get_if<Clarify>(&r);
      out.question_matched = clarify && ExactMatch(clarify->question, *s.input.question);
      if (clarify) {
        r = backend.ApplyClarification(clarify->partial,
                                       TokenizeUtterance(s.input.answer.value_or("")));
      }
    }
    out.text = PredictionText(r);
  } catch (const std::exception& e) {
    out.text.clear();
    out.error = e.what();
  }
  return out;
}

EvalReport Evaluate(const NormalizerBackend& backend, std::span<const DatasetSample> samples) {
  EvalReport report;
  report.backend = std::string(backend.name());
  double em_sum = 0, rouge_sum = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const DatasetSample& s = samples[i];
    SamplePrediction p = PredictSample(backend, s);
    const bool em = ExactMatch(p.text, s.expected);
    const double rouge = RougeL(p.text, s.expected);
    ++report.n;
    em_sum += em;
    rouge_sum += rouge;
    for (AccuracyCell* cell : {&report.per_op[std::string(OperationName(s.op))],
                               &report.per_category[CategoryName(s.category)]}) {
      ++cell->n;
      cell->exact += em;
      cell->rouge_sum += rouge;
    }
    if (p.question_matched) {
      ++report.question_checks;
      report.questions_matched += *p.question_matched;
    }
    if (!em) {
      report.failures.push_back({i, EncodeInput(s.input),
                                 p.error.empty() ? p.text : "error: " + p.error, s.expected,
                                 CategoryName(s.category)});
    }
  }
  if (report.n > 0) {
    report.exact_match = em_sum / report.n;
    report.rouge_l = rouge_sum / report.n;
  }
  return report;
}

nlohmann::ordered_json EvalReport::ToJson() const {
  nlohmann::ordered_json j;
  j["backend"] = backend;
  j["n"] = n;
  j["exact_match"] = exact_match;
  j["rouge_l"] = rouge_l;
  j["rouge_beta"] = 1.0;
  j["exact_match_case_sensitive"] = false;
  j["clarification_questions"] = {{"checked", question_checks},
                                  {"matched", questions_matched}};
  j["per_op"] = nlohmann::ordered_json::object();
  for (const auto& [k, c] : per_op) j["per_op"][k] = CellJson(c);
  j["per_category"] = nlohmann::ordered_json::object();
  for (const auto& [k, c] : per_category) j["per_category"][k] = CellJson(c);
  j["failures"] = nlohmann::ordered_json::array();
  for (const EvalFailure& f : failures) {
    j["failures"].push_back({{"index", f.index},
                             {"input", f.input},
                             {"predicted", f.predicted},
                             {"gold", f.gold},
                             {"category", f.category}});
  }
  return j;
}

std::string EvalReport::ToTable() const {
  std::ostringstream out;
  out << "backend " << backend << ", " << n << " samples\n";
  out << "exact match " << Fixed(exact_match) << ", rouge-l " << Fixed(rouge_l) << "\n";
  if (question_checks > 0) {
    out << "clarification questions matched " << questions_matched << "/" << question_checks
        << "\n";
  }
  out << "\n";
  AppendCells(out, "op", per_op);
  out << "\n";
  AppendCells(out, "error category", per_category);
  if (!failures.empty()) {
    out << "\n" << failures.size() << " misses\n";
    for (const EvalFailure& f : failures) {
      out << "  #" << f.index << " [" << f.category << "] " << f.input << "\n"
          << "    got  " << (f.predicted.empty() ? "(suggestion)" : f.predicted) << "\n"
          << "    gold " << f.gold << "\n";
    }
  }
  return out.str();
}

Result<std::vector<ReplayCase>, std::string> ParseReplayCorpus(std::string_view text) {
  std::vector<ReplayCase> out;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (j.is_discarded() || !j.is_object()) return where + "invalid JSON";
    if (!j.contains("utterance") || !j["utterance"].is_string()) {
      return where + "missing utterance";
    }
    ReplayCase c;
    c.utterance = j["utterance"].get<std::string>();
    try {
      c.buffer = j.value("buffer", std::string());
      c.setup = j.value("setup", std::vector<std::string>{});
      c.gaps_ms = j.value("gaps_ms", std::vector<int64_t>{});
    } catch (const nlohmann::json::exception&) {
      return where + "wrong field type";
    }
    out.push_back(std::move(c));
  }
  return out;
}

Result<std::vector<ReplayCase>, std::string> LoadReplayCorpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "cannot read " + path;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseReplayCorpus(ss.str());
}

SegmenterConfig LegacyVuiSegmenterConfig(int64_t window_ms) {
  SegmenterConfig c = SegmenterConfig::Legacy(window_ms);
  c.accepts_complete = [](std::span<const std::string> words) {
    return ParseCanonical(words).ok();
  };
  return c;
}

std::string_view ReplayOutcomeName(ReplayOutcome o) {
  constexpr std::string_view kNames[] = {"succeeded", "clarified", "timeout", "syntax",
                                         "recognition"};
  return kNames[static_cast<size_t>(o)];
}

void ConditionCounts::Add(ReplayOutcome o) {
  ++cases;
  switch (o) {
    case ReplayOutcome::kSucceeded:
      ++succeeded;
      break;
    case ReplayOutcome::kClarified:
      ++clarified;
      break;
    case ReplayOutcome::kTimeout:
      ++timeout;
      break;
    case ReplayOutcome::kSyntax:
      ++syntax;
      break;
    case ReplayOutcome::kRecognition:
      ++recognition;
      break;
  }
}

FailureReport ReplayCompare(std::span<const ReplayCase> corpus, const ReplayConfig& config) {
  if (corpus.empty()) throw std::invalid_argument("empty replay corpus");
  if (config.jitter_min_ms < 0 || config.jitter_max_ms < config.jitter_min_ms) {
    throw std::invalid_argument("bad jitter range");
  }
  auto backend = config.backend ? config.backend : std::make_shared<RuleBackend>();
  std::mt19937_64 rng(config.seed);
  FailureReport report;
  for (const ReplayCase& c : corpus) {
    const Words tokens = TokenizeUtterance(c.utterance);
    const std::vector<int64_t> gaps = Gaps(c, tokens.size(), config, rng);
    ReplayOutcome a = RunLegacy(c, tokens, gaps, config);
    ReplayOutcome b = tokens.empty() ? ReplayOutcome::kSyntax
                                     : RunShim(c, tokens, gaps, config, backend);
    report.legacy.Add(a);
    report.shim.Add(b);
    report.legacy_outcomes.push_back(a);
    report.shim_outcomes.push_back(b);
  }
  return report;
}

nlohmann::ordered_json FailureReport::ToJson() const {
  nlohmann::ordered_json j;
  j["legacy"] = CountsJson(legacy);
  j["shim"] = CountsJson(shim);
  j["cases"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < legacy_outcomes.size(); ++i) {
    j["cases"].push_back({{"index", i},
                          {"legacy", ReplayOutcomeName(legacy_outcomes[i])},
                          {"shim", ReplayOutcomeName(shim_outcomes[i])}});
  }
  return j;
}

std::string FailureReport::ToTable() const {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %6s %9s %9s %8s %7s %6s %12s\n", "condition", "cases",
                "succeeded", "clarified", "failures", "timeout", "syntax", "recognition");
  out << line;
  for (const auto& [name, c] : {std::pair<const char*, const ConditionCounts*>{"legacy", &legacy},
                                {"shim", &shim}}) {
    std::snprintf(line, sizeof(line), "%-10s %6zu %9zu %9zu %8zu %7zu %6zu %12zu\n", name, c->cases,
                  c->succeeded, c->clarified, c->failures(), c->timeout, c->syntax,
                  c->recognition);
    out << line;
  }
  return out.str();
}

}  // namespace cmdshim
