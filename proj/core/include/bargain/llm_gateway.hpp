#pragma once

// OpenAI-compatible chat-completions client. HTTP goes through a Transport and
// time through a Clock; MockTransport and VirtualClock stand in for them in tests.

#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spdlog {
class logger;
}

namespace bargain {

struct ModelEndpoint {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_id;
  std::string api_key_env;  // name of the environment variable holding the key
  double temperature = 0.7;
  int max_reply_tokens = 512;
  std::chrono::milliseconds timeout{60'000};
  int rate_limit_per_minute = 60;

  // Throws Error(InvalidConfig).
  void validate() const;
};

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  std::optional<double> temperature;  // falls back to the endpoint default
  std::optional<int> max_tokens;
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct ChatReply {
  std::string content;
  std::string finish_reason;
  TokenUsage usage;
};

// Wire format helpers. parse_chat_response throws Error(ProtocolError).
std::string build_chat_body(const ModelEndpoint& endpoint, const ChatRequest& request);
ChatReply parse_chat_response(std::string_view body);

// Replaces every occurrence of `secret` with a fixed marker.
std::string redact(std::string text, std::string_view secret);

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::chrono::milliseconds timeout{60'000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;
};

// Network-level failures are thrown as Error(Timeout) or Error(TransportError);
// any HTTP status, including errors, is returned.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
  // Whether the gateway must resolve an API key before dispatching.
  virtual bool requires_credentials() const { return true; }
};

class HttpTransport final : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override;
};

class Clock {
 public:
  using duration = std::chrono::steady_clock::duration;
  using time_point = std::chrono::steady_clock::time_point;

  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_for(duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  time_point now() override { return std::chrono::steady_clock::now(); }
  void sleep_for(duration d) override;
};

// Sleeping advances the clock instantly.
class VirtualClock final : public Clock {
 public:
  time_point now() override;
  void sleep_for(duration d) override;
  duration elapsed();

 private:
  std::mutex mu_;
  duration offset_{0};
};

// Sliding-window gate: at most `per_minute` acquisitions in any 60 s window.
class RateLimiter {
 public:
  RateLimiter(int per_minute, std::shared_ptr<Clock> clock);
  void acquire();

 private:
  int per_minute_;
  std::shared_ptr<Clock> clock_;
  std::mutex mu_;
  std::deque<Clock::time_point> recent_;
};

// Replays canned responses in order and records every request it sees.
class MockTransport final : public Transport {
 public:
  struct Canned {
    int status = 200;
    std::string body;
    bool timeout = false;
  };

  // A 200 response whose single choice carries `content`.
  static Canned reply(std::string_view content);
  static Canned status(int code, std::string body = "{}");
  static Canned raw(int code, std::string body) { return {code, std::move(body), false}; }
  static Canned timed_out() { return {0, {}, true}; }

  explicit MockTransport(std::vector<Canned> script, std::shared_ptr<Clock> clock = nullptr);

  HttpResponse post(const HttpRequest& request) override;
  bool requires_credentials() const override { return false; }

  std::vector<HttpRequest> requests() const;
  std::vector<Clock::time_point> dispatch_times() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::deque<Canned> script_;
  std::shared_ptr<Clock> clock_;
  std::vector<HttpRequest> requests_;
  std::vector<Clock::time_point> times_;
};

struct RetryPolicy {
  int max_attempts = 4;  // total dispatches per send_chat, including the first
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8'000};
};

class ChatGateway {
 public:
  virtual ~ChatGateway() = default;
  // Throws Error(AuthError | Timeout | TransportError | ProtocolError |
  // ScriptExhausted).
  virtual ChatReply send_chat(const ModelEndpoint& endpoint, const ChatRequest& request) = 0;
};

struct GatewayOptions {
  std::shared_ptr<Clock> clock;  // SystemClock when null
  RetryPolicy retry;
  std::function<std::optional<std::string>(const std::string&)> env;  // getenv when empty
  std::string log_path;  // rotating request log; disabled when empty
  std::size_t log_max_bytes = 5 * 1024 * 1024;
  std::size_t log_max_files = 3;
};

class Gateway final : public ChatGateway {
 public:
  explicit Gateway(std::shared_ptr<Transport> transport, GatewayOptions options = {});
  ~Gateway() override;

  ChatReply send_chat(const ModelEndpoint& endpoint, const ChatRequest& request) override;

  // Dispatch attempts made so far, across all endpoints.
  std::size_t attempts() const;

 private:
  RateLimiter& limiter_for(const ModelEndpoint& endpoint);
  void log(const std::string& line, std::string_view secret);

  std::shared_ptr<Transport> transport_;
  GatewayOptions options_;
  std::shared_ptr<spdlog::logger> logger_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<RateLimiter>> limiters_;
  std::size_t attempts_ = 0;
};

struct MockGateway {
  std::shared_ptr<MockTransport> transport;
  std::shared_ptr<Gateway> gateway;
};

// Gateway over a scripted transport with a virtual clock and no-wait backoff.
MockGateway mock_transport(std::vector<MockTransport::Canned> script,
                           std::shared_ptr<Clock> clock = nullptr);

}  // namespace bargain
