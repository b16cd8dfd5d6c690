#include "stancegraph/core/http_json.hpp"

#include <httplib.h>

#include "stancegraph/core/error.hpp"

namespace stancegraph {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix, no trailing slash
};

Endpoint split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  const auto path_start = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  Endpoint out;
  out.origin = endpoint.substr(0, path_start);
  if (path_start != std::string::npos) out.prefix = endpoint.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

}  // namespace

json post_json(const std::string& endpoint, const std::string& path, const std::string& api_key, const json& body,
               int timeout_seconds) {
  if (endpoint.empty()) throw TransportError("no provider endpoint configured", false);
  const Endpoint ep = split_endpoint(endpoint);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_write_timeout(timeout_seconds, 0);
  httplib::Headers headers;
  if (!api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key);
    headers.emplace("api-key", api_key);
  }
  auto res = client.Post(ep.prefix + path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("transport failure: " + httplib::to_string(res.error()), true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("provider returned HTTP " + std::to_string(res->status), true);
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200),
                         false);
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception&) {
    throw TransportError("provider returned a non-JSON body", false);
  }
}

}  // namespace stancegraph
