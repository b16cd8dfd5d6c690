#pragma once

#include <string>

#include "stancegraph/core/json_io.hpp"

namespace stancegraph {

/// POSTs a JSON body to `endpoint + path` with a bearer token and returns the
/// decoded JSON response. Throws TransportError; 429 and 5xx responses and
/// connection failures are retryable, other statuses are not.
json post_json(const std::string& endpoint, const std::string& path, const std::string& api_key, const json& body,
               int timeout_seconds);

}  // namespace stancegraph
