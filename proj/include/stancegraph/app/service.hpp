#pragma once

#include <map>
#include <memory>
#include <string>

#include "stancegraph/app/runtime.hpp"
#include "stancegraph/core/json_io.hpp"

namespace stancegraph::app {

struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  ///< lower-cased names
  std::string body;
};

struct ApiResponse {
  int status = 200;
  json body;
};

struct ServiceOptions {
  std::string api_token;  ///< empty disables the X-Api-Token check
  bool persist = true;    ///< save the snapshot after every write
};

/// The HTTP API over a Runtime. `handle` is transport independent; `bind` and
/// `listen` put it behind an HTTP server. Reads run concurrently; writes go
/// through the graph store's single writer.
class Service {
 public:
  explicit Service(Runtime& runtime, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ApiResponse handle(const ApiRequest& request);

  /// Binds the listening socket; port 0 picks a free one. Returns the port.
  int bind(const std::string& host, int port);
  /// Serves until stop().
  void listen();
  void stop();
  /// Waits for a background mining run started through the API.
  void wait_for_pipeline();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Reads STANCEGRAPH_API_TOKEN.
ServiceOptions service_options_from_env();

}  // namespace stancegraph::app
