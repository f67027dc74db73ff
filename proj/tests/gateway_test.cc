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

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <thread>

#include "gtest/gtest.h"

namespace cmdshim {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using json = nlohmann::json;

std::vector<std::string> TypesOf(const std::vector<json>& frames) {
  std::vector<std::string> out;
  for (const auto& f : frames) out.push_back(f["type"]);
  return out;
}

const std::vector<std::string> kAppliedSequence = {"listening", "transcript", "normalized",
                                                   "relayed",   "vui_outcome", "listening"};

TEST(WireSessionTest, OpenUtterClose) {
  GatewayOptions opts;
  WireSession wire(opts, "s1");
  auto opened = wire.Handle(R"({"type":"open","initial_text":"an apple pie"})");
  ASSERT_EQ(opened.size(), 1u);
  EXPECT_EQ(opened[0]["type"], "session_opened");
  EXPECT_EQ(opened[0]["id"], "s1");
  EXPECT_EQ(opened[0]["buffer"], "an apple pie");
  EXPECT_TRUE(wire.is_open());

  auto events = wire.Handle(R"({"type":"utter","text":"remove apple"})");
  EXPECT_EQ(TypesOf(events), kAppliedSequence);
  EXPECT_EQ(events[3]["command"], "DELETE apple");
  EXPECT_EQ(events[4]["buffer"], "an pie");
  EXPECT_EQ(wire.session()->sim().buffer_text(), "an pie");

  auto closed = wire.Handle(R"({"type":"close"})");
  ASSERT_EQ(closed.size(), 1u);
  EXPECT_EQ(closed[0]["type"], "session_closed");
  EXPECT_FALSE(wire.is_open());
}

TEST(WireSessionTest, MalformedFramesLeaveTheSessionUsable) {
  GatewayOptions opts;
  WireSession wire(opts, "s1");
  for (const char* bad : {"not json", "[1,2]", R"({"text":"x"})", R"({"type":"dance"})",
                          R"({"type":"open","initial_text":5})",
                          R"({"type":"open","config":{"window_ms":-1}})",
                          R"({"type":"open","config":{"speed":1}})"}) {
    auto r = wire.Handle(bad);
    ASSERT_EQ(r.size(), 1u) << bad;
    EXPECT_EQ(r[0]["type"], "error") << bad;
    EXPECT_EQ(r[0]["code"], "bad_request") << bad;
  }
  EXPECT_FALSE(wire.is_open());
  wire.Handle(R"({"type":"open","initial_text":"an apple pie"})");
  for (const char* bad : {R"({"type":"utter"})", R"({"type":"utter","text":"  "})",
                          R"({"type":"answer","text":"pie"})", R"({"type":"open"})"}) {
    auto r = wire.Handle(bad);
    ASSERT_EQ(r.size(), 1u) << bad;
    EXPECT_EQ(r[0]["code"], "bad_request") << bad;
  }
  EXPECT_EQ(TypesOf(wire.Handle(R"({"type":"utter","text":"select apple"})")), kAppliedSequence);
}

TEST(WireSessionTest, NoSession) {
  GatewayOptions opts;
  WireSession wire(opts, "s1");
  for (const char* frame : {R"({"type":"utter","text":"select apple"})",
                            R"({"type":"answer","text":"x"})", R"({"type":"close"})"}) {
    auto r = wire.Handle(frame);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0]["code"], "no_session") << frame;
  }
}

TEST(WireSessionTest, ClarificationAnswer) {
  GatewayOptions opts;
  WireSession wire(opts, "s1");
  wire.Handle(R"({"type":"open","initial_text":"eat an apple pie"})");
  auto asked = wire.Handle(R"({"type":"utter","text":"insert before apple pie"})");
  bool found = false;
  for (const auto& f : asked) {
    if (f["type"] == "clarification_asked") {
      found = true;
      EXPECT_EQ(f["question"], "What should I insert before apple pie?");
    }
  }
  EXPECT_TRUE(found);
  auto answered = wire.Handle(R"({"type":"answer","text":"in the morning"})");
  EXPECT_EQ(TypesOf(answered), kAppliedSequence);
  EXPECT_EQ(answered[3]["command"], "INSERT in the morning BEFORE apple pie");
  EXPECT_EQ(wire.session()->sim().buffer_text(), "eat an in the morning apple pie");
}

TEST(WireSessionTest, OpenConfigOverridesWindow) {
  GatewayOptions opts;
  WireSession wire(opts, "s1");
  wire.Handle(R"({"type":"open","config":{"window_ms":4500,"terminators":["over"]}})");
  ASSERT_TRUE(wire.is_open());
  EXPECT_EQ(wire.session()->config().segmenter.window_ms, 4500);
  EXPECT_EQ(wire.session()->config().segmenter.terminator_phrases,
            (std::vector<std::string>{"over"}));
}

class LiveGatewayTest : public ::testing::Test {
 protected:
  void SetUp() override {
    GatewayOptions opts;
    opts.port = 0;
    auto started = Gateway::Start(opts);
    ASSERT_TRUE(started.ok()) << started.error();
    gateway_ = std::move(*started);
  }

  std::unique_ptr<Gateway> gateway_;
};

struct Client {
  net::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};

  explicit Client(uint16_t port) {
    ws.next_layer().connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
    ws.handshake("127.0.0.1", "/session");
    ws.text(true);
  }

  void Send(const json& frame) { ws.write(net::buffer(frame.dump())); }

  json Receive() {
    beast::flat_buffer buf;
    ws.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }

  std::vector<json> ReceiveN(size_t n) {
    std::vector<json> out;
    for (size_t i = 0; i < n; ++i) out.push_back(Receive());
    return out;
  }
};

http::response<http::string_body> Get(uint16_t port, const std::string& target) {
  net::io_context ioc;
  tcp::socket sock(ioc);
  sock.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
  http::request<http::empty_body> req{http::verb::get, target, 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(sock, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(sock, buf, res);
  return res;
}

TEST_F(LiveGatewayTest, Healthz) {
  auto res = Get(gateway_->port(), "/healthz");
  EXPECT_EQ(res.result(), http::status::ok);
  auto body = json::parse(res.body());
  EXPECT_EQ(body["status"], "ok");
  EXPECT_EQ(body["websocket"], "/session");
  EXPECT_EQ(body["backend"], "rule");
  EXPECT_FALSE(body["version"].get<std::string>().empty());
  EXPECT_EQ(Get(gateway_->port(), "/nope").result(), http::status::not_found);
}

TEST_F(LiveGatewayTest, FramesArriveInOrder) {
  Client c(gateway_->port());
  c.Send({{"type", "open"}, {"initial_text", "an apple pie"}});
  EXPECT_EQ(c.Receive()["type"], "session_opened");
  c.Send({{"type", "utter"}, {"text", "select apple"}});
  auto events = c.ReceiveN(kAppliedSequence.size());
  EXPECT_EQ(TypesOf(events), kAppliedSequence);
  EXPECT_EQ(events[3]["command"], "SELECT apple");

  c.Send({{"type", "bogus"}});
  EXPECT_EQ(c.Receive()["code"], "bad_request");
  c.ws.binary(true);
  c.ws.write(net::buffer(std::string("\x01\x02")));
  EXPECT_EQ(c.Receive()["code"], "bad_request");
  c.ws.text(true);

  c.Send({{"type", "utter"}, {"text", "remove apple"}});
  auto next = c.ReceiveN(kAppliedSequence.size());
  EXPECT_EQ(next[4]["buffer"], "an pie");
  c.Send({{"type", "close"}});
  EXPECT_EQ(c.Receive()["type"], "session_closed");
  c.Send({{"type", "utter"}, {"text", "select pie"}});
  EXPECT_EQ(c.Receive()["code"], "no_session");
}

TEST_F(LiveGatewayTest, ConnectionsAreIsolated) {
  Client a(gateway_->port()), b(gateway_->port());
  a.Send({{"type", "open"}, {"initial_text", "an apple pie"}});
  b.Send({{"type", "open"}, {"initial_text", "a cherry tart"}});
  auto oa = a.Receive(), ob = b.Receive();
  EXPECT_NE(oa["id"], ob["id"]);
  a.Send({{"type", "utter"}, {"text", "remove apple"}});
  b.Send({{"type", "utter"}, {"text", "remove tart"}});
  EXPECT_EQ(a.ReceiveN(6)[4]["buffer"], "an pie");
  EXPECT_EQ(b.ReceiveN(6)[4]["buffer"], "a cherry");
  EXPECT_GE(gateway_->active_connections(), 2u);
}

TEST_F(LiveGatewayTest, DisconnectReleasesTheConnection) {
  {
    Client c(gateway_->port());
    c.Send({{"type", "open"}});
    c.Receive();
    c.ws.close(websocket::close_code::normal);
  }
  for (int i = 0; i < 200 && gateway_->active_connections() > 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  EXPECT_EQ(gateway_->active_connections(), 0u);
}

TEST_F(LiveGatewayTest, StopUnblocksOpenClientsAndWait) {
  Client c(gateway_->port());
  c.Send({{"type", "open"}});
  c.Receive();
  std::thread waiter([this] { gateway_->Wait(); });
  gateway_->Stop();
  waiter.join();
  beast::flat_buffer buf;
  beast::error_code ec;
  c.ws.read(buf, ec);
  EXPECT_TRUE(ec);
  gateway_->Stop();  // idempotent
}

TEST_F(LiveGatewayTest, PortInUse) {
  GatewayOptions opts;
  opts.port = gateway_->port();
  auto second = Gateway::Start(opts);
  ASSERT_FALSE(second.ok());
  EXPECT_NE(second.error().find("cannot listen"), std::string::npos);
  opts.address = "not an address";
  EXPECT_FALSE(Gateway::Start(opts).ok());
}

}  // namespace
}  // namespace cmdshim
