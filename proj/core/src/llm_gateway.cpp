#include "bargain/llm_gateway.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <json.hpp>
#include <spdlog/sinks/rotating_file_sink.h>
#include <spdlog/spdlog.h>

#include "bargain/error.hpp"

namespace bargain {

namespace {

using json = nlohmann::json;

constexpr std::string_view kRedacted = "[REDACTED]";

std::optional<std::string> getenv_lookup(const std::string& name) {
  if (const char* value = std::getenv(name.c_str())) return std::string(value);
  return std::nullopt;
}

std::string chat_url(const std::string& base_url) {
  std::string url = base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url + "/chat/completions";
}

bool is_retryable_status(int status) { return status == 429 || status >= 500; }

std::optional<std::chrono::milliseconds> retry_after(const HttpResponse& response) {
  for (const auto& [name, value] : response.headers) {
    std::string lowered = name;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered != "retry-after") continue;
    char* end = nullptr;
    const double seconds = std::strtod(value.c_str(), &end);
    if (end != value.c_str() && std::isfinite(seconds) && seconds >= 0) {
      return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
    }
  }
  return std::nullopt;
}

std::atomic<int> g_logger_serial{0};

}  // namespace

void ModelEndpoint::validate() const {
  if (model_id.empty()) throw Error(Errc::InvalidConfig, "endpoint model_id is empty");
  if (base_url.empty()) throw Error(Errc::InvalidConfig, "endpoint base_url is empty");
  if (timeout <= std::chrono::milliseconds::zero()) {
    throw Error(Errc::InvalidConfig, "endpoint timeout must be > 0");
  }
  if (rate_limit_per_minute <= 0) {
    throw Error(Errc::InvalidConfig, "endpoint rate_limit must be > 0");
  }
  if (!(temperature >= 0.0)) throw Error(Errc::InvalidConfig, "temperature must be >= 0");
  if (max_reply_tokens <= 0) throw Error(Errc::InvalidConfig, "max_reply_tokens must be > 0");
}

std::string build_chat_body(const ModelEndpoint& endpoint, const ChatRequest& request) {
  json body;
  body["model"] = endpoint.model_id;
  body["messages"] = json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  body["temperature"] = request.temperature.value_or(endpoint.temperature);
  body["max_tokens"] = request.max_tokens.value_or(endpoint.max_reply_tokens);
  return body.dump();
}

ChatReply parse_chat_response(std::string_view body) {
  try {
    const auto doc = json::parse(body);
    const auto& choice = doc.at("choices").at(0);
    ChatReply reply;
    const auto& content = choice.at("message").at("content");
    reply.content = content.is_null() ? std::string() : content.get<std::string>();
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
      reply.finish_reason = choice["finish_reason"].get<std::string>();
    }
    if (doc.contains("usage") && doc["usage"].is_object()) {
      reply.usage.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
      reply.usage.completion_tokens = doc["usage"].value("completion_tokens", 0);
    }
    return reply;
  } catch (const json::exception& e) {
    throw Error(Errc::ProtocolError, std::string("unparsable chat response: ") + e.what());
  }
}

std::string redact(std::string text, std::string_view secret) {
  if (secret.empty()) return text;
  for (auto pos = text.find(secret); pos != std::string::npos;
       pos = text.find(secret, pos + kRedacted.size())) {
    text.replace(pos, secret.size(), kRedacted);
  }
  return text;
}

void SystemClock::sleep_for(duration d) {
  if (d > duration::zero()) std::this_thread::sleep_for(d);
}

Clock::time_point VirtualClock::now() {
  std::lock_guard lock(mu_);
  return time_point{} + offset_;
}

void VirtualClock::sleep_for(duration d) {
  std::lock_guard lock(mu_);
  if (d > duration::zero()) offset_ += d;
}

Clock::duration VirtualClock::elapsed() {
  std::lock_guard lock(mu_);
  return offset_;
}

RateLimiter::RateLimiter(int per_minute, std::shared_ptr<Clock> clock)
    : per_minute_(per_minute), clock_(std::move(clock)) {
  if (per_minute_ <= 0) throw Error(Errc::InvalidConfig, "rate limit must be > 0");
}

void RateLimiter::acquire() {
  constexpr auto kWindow = std::chrono::seconds(60);
  for (;;) {
    Clock::duration wait{};
    {
      std::lock_guard lock(mu_);
      const auto now = clock_->now();
      while (!recent_.empty() && now - recent_.front() >= kWindow) recent_.pop_front();
      if (static_cast<int>(recent_.size()) < per_minute_) {
        recent_.push_back(now);
        return;
      }
      wait = recent_.front() + kWindow - now;
    }
    clock_->sleep_for(wait);
  }
}

MockTransport::Canned MockTransport::reply(std::string_view content) {
  json body = {
      {"id", "mock"},
      {"object", "chat.completion"},
      {"choices",
       json::array({{{"index", 0},
                     {"message", {{"role", "assistant"}, {"content", std::string(content)}}},
                     {"finish_reason", "stop"}}})},
      {"usage", {{"prompt_tokens", 0}, {"completion_tokens", 0}}},
  };
  return {200, body.dump(), false};
}

MockTransport::Canned MockTransport::status(int code, std::string body) {
  return {code, std::move(body), false};
}

MockTransport::MockTransport(std::vector<Canned> script, std::shared_ptr<Clock> clock)
    : script_(script.begin(), script.end()), clock_(std::move(clock)) {}

HttpResponse MockTransport::post(const HttpRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  times_.push_back(clock_ ? clock_->now() : Clock::time_point{});
  if (script_.empty()) {
    throw Error(Errc::ScriptExhausted,
                "mock transport has no response for call " + std::to_string(requests_.size()));
  }
  Canned next = std::move(script_.front());
  script_.pop_front();
  if (next.timeout) throw Error(Errc::Timeout, "mock timeout");
  return HttpResponse{next.status, std::move(next.body), {}};
}

std::vector<HttpRequest> MockTransport::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::vector<Clock::time_point> MockTransport::dispatch_times() const {
  std::lock_guard lock(mu_);
  return times_;
}

std::size_t MockTransport::remaining() const {
  std::lock_guard lock(mu_);
  return script_.size();
}

Gateway::Gateway(std::shared_ptr<Transport> transport, GatewayOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (!transport_) throw Error(Errc::InvalidConfig, "gateway needs a transport");
  if (!options_.clock) options_.clock = std::make_shared<SystemClock>();
  if (!options_.env) options_.env = getenv_lookup;
  if (options_.retry.max_attempts < 1) {
    throw Error(Errc::InvalidConfig, "retry max_attempts must be >= 1");
  }
  if (!options_.log_path.empty()) {
    try {
      auto sink = std::make_shared<spdlog::sinks::rotating_file_sink_mt>(
          options_.log_path, options_.log_max_bytes, options_.log_max_files);
      logger_ = std::make_shared<spdlog::logger>(
          "gateway-" + std::to_string(g_logger_serial.fetch_add(1)), std::move(sink));
      logger_->set_pattern("%Y-%m-%dT%H:%M:%S.%e %l %v");
      logger_->flush_on(spdlog::level::info);
    } catch (const spdlog::spdlog_ex& e) {
      throw Error(Errc::StorageError, std::string("gateway log: ") + e.what());
    }
  }
}

Gateway::~Gateway() = default;

std::size_t Gateway::attempts() const {
  std::lock_guard lock(mu_);
  return attempts_;
}

RateLimiter& Gateway::limiter_for(const ModelEndpoint& endpoint) {
  std::lock_guard lock(mu_);
  auto& slot = limiters_[endpoint.base_url + "|" + endpoint.model_id];
  if (!slot) slot = std::make_unique<RateLimiter>(endpoint.rate_limit_per_minute, options_.clock);
  return *slot;
}

void Gateway::log(const std::string& line, std::string_view secret) {
  if (logger_) logger_->info(redact(line, secret));
}

ChatReply Gateway::send_chat(const ModelEndpoint& endpoint, const ChatRequest& request) {
  endpoint.validate();
  if (request.messages.empty() || request.messages.front().role != "system") {
    throw Error(Errc::InvalidConfig, "chat request must start with a system message");
  }

  std::string api_key;
  if (!endpoint.api_key_env.empty()) {
    if (auto value = options_.env(endpoint.api_key_env)) api_key = *value;
  }
  if (api_key.empty() && transport_->requires_credentials()) {
    throw Error(Errc::AuthError, "environment variable '" + endpoint.api_key_env +
                                     "' is not set for model " + endpoint.model_id);
  }

  HttpRequest http;
  http.url = chat_url(endpoint.base_url);
  http.timeout = endpoint.timeout;
  http.body = build_chat_body(endpoint, request);
  http.headers.emplace_back("Content-Type", "application/json");
  if (!api_key.empty()) http.headers.emplace_back("Authorization", "Bearer " + api_key);

  auto& limiter = limiter_for(endpoint);
  const auto& retry = options_.retry;
  auto backoff = std::chrono::duration<double, std::milli>(retry.initial_backoff);
  std::string last_failure;

  for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
    limiter.acquire();
    {
      std::lock_guard lock(mu_);
      ++attempts_;
    }
    log("POST " + http.url + " model=" + endpoint.model_id + " attempt=" +
            std::to_string(attempt) + " body=" + http.body,
        api_key);

    std::optional<HttpResponse> response;
    try {
      response = transport_->post(http);
    } catch (const Error& e) {
      log(std::string("transport failure: ") + e.what(), api_key);
      if (e.code() != Errc::TransportError) throw;
      last_failure = e.what();
    }

    std::optional<std::chrono::milliseconds> server_hint;
    if (response) {
      const int status = response->status;
      log("status=" + std::to_string(status) + " body=" + response->body, api_key);
      if (status >= 200 && status < 300) return parse_chat_response(response->body);
      if (status == 401 || status == 403) {
        throw Error(Errc::AuthError, "HTTP " + std::to_string(status) + " from " +
                                         endpoint.model_id);
      }
      if (!is_retryable_status(status)) {
        throw Error(Errc::TransportError, "HTTP " + std::to_string(status) + " from " +
                                              endpoint.model_id + ": " + response->body);
      }
      last_failure = "HTTP " + std::to_string(status);
      server_hint = retry_after(*response);
    }

    if (attempt == retry.max_attempts) break;
    auto wait = std::min(backoff, std::chrono::duration<double, std::milli>(retry.max_backoff));
    if (server_hint) {
      wait = std::max(wait, std::chrono::duration<double, std::milli>(*server_hint));
    }
    options_.clock->sleep_for(std::chrono::duration_cast<Clock::duration>(wait));
    backoff *= retry.multiplier;
  }
  throw Error(Errc::TransportError, "gave up after " + std::to_string(retry.max_attempts) +
                                        " attempts: " + last_failure);
}

MockGateway mock_transport(std::vector<MockTransport::Canned> script,
                           std::shared_ptr<Clock> clock) {
  if (!clock) clock = std::make_shared<VirtualClock>();
  auto transport = std::make_shared<MockTransport>(std::move(script), clock);
  GatewayOptions options;
  options.clock = clock;
  auto gateway = std::make_shared<Gateway>(transport, std::move(options));
  return {std::move(transport), std::move(gateway)};
}

}  // namespace bargain
