#include <httplib.h>

#include "bargain/error.hpp"
#include "bargain/llm_gateway.hpp"

namespace bargain {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::TransportError, "URL without scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse HttpTransport::post(const HttpRequest& request) {
  const auto [origin, path] = split_url(request.url);
  httplib::Client client(origin);
  if (!client.is_valid()) throw Error(Errc::TransportError, "unsupported URL " + request.url);

  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      request.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [name, value] : request.headers) {
    if (name == "Content-Type") {
      content_type = value;
    } else {
      headers.emplace(name, value);
    }
  }

  auto result = client.Post(path, headers, request.body, content_type);
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      // httplib reports an expired read deadline as a read error.
      throw Error(Errc::Timeout, "request to " + origin + " timed out (" +
                                     httplib::to_string(err) + ")");
    }
    throw Error(Errc::TransportError, "request to " + origin + " failed: " +
                                          httplib::to_string(err));
  }

  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto& [name, value] : result->headers) response.headers.emplace(name, value);
  return response;
}

}  // namespace bargain
