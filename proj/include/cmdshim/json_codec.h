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

// JSON shapes shared by the CLI, the C API and the gateway wire.

#ifndef CMDSHIM_JSON_CODEC_H_
#define CMDSHIM_JSON_CODEC_H_

#include <optional>
#include <string>
#include <vector>

#include "cmdshim/normalizer.h"
#include "cmdshim/session.h"
#include "cmdshim/vui_sim.h"
#include "json.hpp"

namespace cmdshim {

nlohmann::json ToJson(const NormalizationResult& r);
nlohmann::json ToJson(const Outcome& o);
nlohmann::json ToJson(const SessionEvent& e);
nlohmann::json ToJson(const PartialCommand& p);

// Applies {"window_ms": int, "terminators": [word, ...]} on top of *out.
// Returns an error message for unknown keys or invalid values.
std::optional<std::string> ApplySessionConfigJson(const nlohmann::json& config,
                                                  SessionConfig* out);

// One compact JSON object per line.
std::string ToNdjson(const std::vector<SessionEvent>& events);

}  // namespace cmdshim

#endif  // CMDSHIM_JSON_CODEC_H_
