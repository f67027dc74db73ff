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

// Live shim sessions over a WebSocket at /session, one session per
// connection, plus GET /healthz.
//
// Client frames (JSON text):
//   {"type":"open","initial_text":"...","config":{"window_ms":3000}}
//   {"type":"utter","text":"..."}
//   {"type":"answer","text":"..."}      reply to clarification_asked
//   {"type":"close"}
// Server frames:
//   {"type":"session_opened","id":"...","buffer":"..."}
//   the session events (listening, transcript, normalized, relayed,
//     vui_outcome, clarification_asked, suggestion_shown), in order
//   {"type":"session_closed","id":"..."}
//   {"type":"error","code":"bad_request"|"no_session","message":"..."}

#ifndef CMDSHIM_GATEWAY_H_
#define CMDSHIM_GATEWAY_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cmdshim/normalizer.h"
#include "cmdshim/result.h"
#include "cmdshim/session.h"
#include "cmdshim/vui_sim.h"
#include "json.hpp"

namespace cmdshim {

struct GatewayOptions {
  std::string address = "127.0.0.1";
  uint16_t port = 8765;  // 0 picks a free port
  std::shared_ptr<const NormalizerBackend> backend;  // rule backend if null
  CorrectionLexicon corrections = DefaultCorrectionLexicon();
  SessionConfig session;  // defaults for every opened session
};

// The protocol state of one connection, independent of the transport.
class WireSession {
 public:
  WireSession(const GatewayOptions& options, std::string id);

  // Server frames answering one client frame; never empty.
  std::vector<nlohmann::json> Handle(std::string_view frame);

  bool is_open() const { return session_ != nullptr; }
  const Session* session() const { return session_.get(); }

 private:
  const GatewayOptions& options_;
  std::string id_;
  std::unique_ptr<Session> session_;
};

nlohmann::json ErrorFrame(std::string_view code, std::string_view message);

class Gateway {
 public:
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Binds and starts accepting. Fails when the address cannot be bound.
  static Result<std::unique_ptr<Gateway>, std::string> Start(GatewayOptions options);

  uint16_t port() const;
  size_t active_connections() const;
  // Closes the listener and every connection, then joins their threads.
  void Stop();
  // Blocks until Stop is called from another thread.
  void Wait();

  class Impl;

 private:
  explicit Gateway(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace cmdshim

#endif  // CMDSHIM_GATEWAY_H_
