#include <httplib.h>

#include <thread>

#include "bargain/llm_gateway.hpp"
#include "test_helpers.hpp"

using namespace bargain;

namespace {

// Local chat-completions stub on an ephemeral port.
class StubServer {
 public:
  StubServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_auth = req.get_header_value("Authorization");
      last_body = req.body;
      res.set_content(
          R"({"choices":[{"message":{"role":"assistant","content":"pong"},"finish_reason":"stop"}],)"
          R"("usage":{"prompt_tokens":3,"completion_tokens":1}})",
          "application/json");
    });
    server_.Post("/v1/slow/chat/completions", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      res.set_content("{}", "application/json");
    });
    server_.Post("/v1/busy/chat/completions", [](const httplib::Request&, httplib::Response& res) {
      res.status = 429;
      res.set_header("Retry-After", "0");
      res.set_content("{}", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

  std::string last_auth;
  std::string last_body;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(HttpTransport, RoundTripThroughGateway) {
  StubServer stub;
  GatewayOptions opts;
  opts.env = [](const std::string&) { return std::optional<std::string>("local-key"); };
  Gateway gw(std::make_shared<HttpTransport>(), opts);
  ModelEndpoint ep;
  ep.base_url = stub.url("/v1");
  ep.model_id = "stub-model";
  ep.api_key_env = "ANY";
  ChatRequest req;
  req.messages = {{"system", "s"}, {"user", "ping"}};
  const auto reply = gw.send_chat(ep, req);
  EXPECT_EQ(reply.content, "pong");
  EXPECT_EQ(reply.usage.prompt_tokens, 3);
  EXPECT_EQ(stub.last_auth, "Bearer local-key");
  EXPECT_NE(stub.last_body.find("stub-model"), std::string::npos);
}

TEST(HttpTransport, ReturnsErrorStatuses) {
  StubServer stub;
  HttpTransport t;
  HttpRequest req;
  req.url = stub.url("/v1/busy/chat/completions");
  req.body = "{}";
  const auto res = t.post(req);
  EXPECT_EQ(res.status, 429);
  EXPECT_EQ(res.headers.at("Retry-After"), "0");
}

TEST(HttpTransport, ReadTimeout) {
  StubServer stub;
  HttpTransport t;
  HttpRequest req;
  req.url = stub.url("/v1/slow/chat/completions");
  req.body = "{}";
  req.timeout = std::chrono::milliseconds(150);
  EXPECT_ERRC(t.post(req), Errc::Timeout);
}

TEST(HttpTransport, ConnectionRefusedIsTransportError) {
  HttpTransport t;
  HttpRequest req;
  req.url = "http://127.0.0.1:1/v1/chat/completions";
  req.timeout = std::chrono::milliseconds(500);
  EXPECT_ERRC(t.post(req), Errc::TransportError);
  req.url = "no-scheme";
  EXPECT_ERRC(t.post(req), Errc::TransportError);
}
