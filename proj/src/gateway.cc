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

#include "cmdshim/gateway.h"

#include <sys/socket.h>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include "cmdshim/json_codec.h"
#include "cmdshim/version.h"

namespace cmdshim {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using json = nlohmann::json;

std::optional<std::string> StringField(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

json ErrorFrame(std::string_view code, std::string_view message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

WireSession::WireSession(const GatewayOptions& options, std::string id)
    : options_(options), id_(std::move(id)) {}

std::vector<json> WireSession::Handle(std::string_view frame) {
  json msg = json::parse(frame, nullptr, false);
  if (msg.is_discarded() || !msg.is_object()) return {ErrorFrame("bad_request", "invalid JSON")};
  auto type = StringField(msg, "type");
  if (!type) return {ErrorFrame("bad_request", "missing type")};

  if (*type == "open") {
    if (session_) return {ErrorFrame("bad_request", "a session is already open")};
    std::string text;
    if (msg.contains("initial_text")) {
      auto t = StringField(msg, "initial_text");
      if (!t) return {ErrorFrame("bad_request", "initial_text must be a string")};
      text = *t;
    }
    SessionConfig config = options_.session;
    if (msg.contains("config")) {
      if (auto err = ApplySessionConfigJson(msg["config"], &config)) {
        return {ErrorFrame("bad_request", *err)};
      }
    }
    session_ = std::make_unique<Session>(text, options_.corrections, std::move(config),
                                         options_.backend);
    return {{{"type", "session_opened"},
             {"id", id_},
             {"buffer", session_->sim().buffer_text()}}};
  }
  if (*type == "utter" || *type == "answer") {
    if (!session_) return {ErrorFrame("no_session", "send an open frame first")};
    auto text = StringField(msg, "text");
    if (!text || TokenizeUtterance(*text).empty()) {
      return {ErrorFrame("bad_request", "text must be a non-empty string")};
    }
    if (*type == "answer" && !session_->pending_clarification()) {
      return {ErrorFrame("bad_request", "no clarification is pending")};
    }
    std::vector<json> out;
    for (const SessionEvent& e : session_->Utter(*text)) out.push_back(ToJson(e));
    return out;
  }
  if (*type == "close") {
    if (!session_) return {ErrorFrame("no_session", "no session is open")};
    session_.reset();
    return {{{"type", "session_closed"}, {"id", id_}}};
  }
  return {ErrorFrame("bad_request", "unknown frame type " + *type)};
}

class Gateway::Impl {
 public:
  explicit Impl(GatewayOptions options) : options_(std::move(options)), acceptor_(ioc_) {
    if (!options_.backend) options_.backend = std::make_shared<RuleBackend>();
  }

  std::optional<std::string> Bind() {
    beast::error_code ec;
    auto addr = net::ip::make_address(options_.address, ec);
    if (ec) return "bad address " + options_.address;
    tcp::endpoint ep(addr, options_.port);
    acceptor_.open(ep.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(ep, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) return "cannot listen on " + options_.address + ":" +
                   std::to_string(options_.port) + ": " + ec.message();
    port_ = acceptor_.local_endpoint().port();
    accept_thread_ = std::thread([this] { AcceptLoop(); });
    return std::nullopt;
  }

  void AcceptLoop() {
    while (!stopping_) {
      tcp::socket sock(ioc_);
      beast::error_code ec;
      acceptor_.accept(sock, ec);
      if (stopping_) break;
      if (ec) continue;
      std::lock_guard<std::mutex> lock(mu_);
      ReapLocked();
      const uint64_t id = ++next_id_;
      Conn& c = conns_[id];
      c.fd = sock.native_handle();
      c.thread = std::thread([this, id, s = std::move(sock)]() mutable {
        Serve(std::move(s), id);
      });
    }
  }

  void Serve(tcp::socket sock, uint64_t id) {
    beast::error_code ec;
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    http::read(sock, buffer, req, ec);
    if (!ec) {
      if (websocket::is_upgrade(req) && req.target() == "/session") {
        websocket::stream<tcp::socket> ws(std::move(sock));
        ws.accept(req, ec);
        if (!ec) RunWebSocket(ws, id);
        Finish(id);
        return;
      }
      Respond(sock, req);
    }
    Finish(id);
  }

  void Respond(tcp::socket& sock, const http::request<http::string_body>& req) {
    http::response<http::string_body> res;
    res.version(req.version());
    res.set(http::field::server, "cmdshim");
    res.set(http::field::content_type, "application/json");
    res.keep_alive(false);
    if (req.method() == http::verb::get && req.target() == "/healthz") {
      res.result(http::status::ok);
      res.body() = json{{"status", "ok"},
                        {"service", "cmdshim-gateway"},
                        {"version", Version()},
                        {"websocket", "/session"},
                        {"backend", options_.backend->name()},
                        {"active_connections", active()}}
                       .dump();
    } else {
      res.result(http::status::not_found);
      res.body() = ErrorFrame("not_found", "unknown path").dump();
    }
    res.prepare_payload();
    beast::error_code ec;
    http::write(sock, res, ec);
    sock.shutdown(tcp::socket::shutdown_send, ec);
  }

  void RunWebSocket(websocket::stream<tcp::socket>& ws, uint64_t id) {
    ws.text(true);
    WireSession wire(options_, "s" + std::to_string(id));
    beast::error_code ec;
    while (!stopping_) {
      beast::flat_buffer buf;
      ws.read(buf, ec);
      if (ec) break;
      std::vector<json> replies;
      if (!ws.got_text()) {
        replies.push_back(ErrorFrame("bad_request", "frames must be JSON text"));
      } else {
        replies = wire.Handle(beast::buffers_to_string(buf.data()));
      }
      for (const json& r : replies) {
        ws.text(true);
        ws.write(net::buffer(r.dump()), ec);
        if (ec) return;
      }
    }
  }

  // Detaches the fd from Stop's reach before the socket closes.
  void Finish(uint64_t id) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = conns_.find(id);
    if (it != conns_.end()) {
      it->second.fd = -1;
      it->second.done = true;
    }
  }

  void ReapLocked() {
    for (auto it = conns_.begin(); it != conns_.end();) {
      if (it->second.done && it->second.thread.joinable()) {
        it->second.thread.join();
        it = conns_.erase(it);
      } else {
        ++it;
      }
    }
  }

  size_t active() {
    size_t n = 0;
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [id, c] : conns_) n += !c.done;
    return n;
  }

  void Stop() {
    {
      std::lock_guard<std::mutex> lock(stop_mu_);
      if (stopped_) return;
      stopped_ = true;
    }
    stopping_ = true;
    ::shutdown(acceptor_.native_handle(), SHUT_RDWR);
    if (accept_thread_.joinable()) accept_thread_.join();
    beast::error_code ec;
    acceptor_.close(ec);
    std::map<uint64_t, Conn> conns;
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (auto& [id, c] : conns_) {
        if (c.fd >= 0) ::shutdown(c.fd, SHUT_RDWR);
      }
      conns.swap(conns_);
    }
    // Threads take mu_ in Finish, so join without holding it.
    for (auto& [id, c] : conns) {
      if (c.thread.joinable()) c.thread.join();
    }
    std::lock_guard<std::mutex> lock(stop_mu_);
    finished_ = true;
    stop_cv_.notify_all();
  }

  void Wait() {
    std::unique_lock<std::mutex> lock(stop_mu_);
    stop_cv_.wait(lock, [this] { return finished_; });
  }

  uint16_t port() const { return port_; }

 private:
  struct Conn {
    std::thread thread;
    int fd = -1;
    bool done = false;
  };

  GatewayOptions options_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  uint16_t port_ = 0;
  std::thread accept_thread_;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::map<uint64_t, Conn> conns_;
  uint64_t next_id_ = 0;
  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  bool stopped_ = false;
  bool finished_ = false;
};

Gateway::Gateway(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

Gateway::~Gateway() { impl_->Stop(); }

Result<std::unique_ptr<Gateway>, std::string> Gateway::Start(GatewayOptions options) {
  auto impl = std::make_unique<Impl>(std::move(options));
  if (auto err = impl->Bind()) return *err;
  return std::unique_ptr<Gateway>(new Gateway(std::move(impl)));
}

uint16_t Gateway::port() const { return impl_->port(); }
size_t Gateway::active_connections() const { return impl_->active(); }
void Gateway::Stop() { impl_->Stop(); }
void Gateway::Wait() { impl_->Wait(); }

}  // namespace cmdshim
