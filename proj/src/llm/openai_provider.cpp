#include "stancegraph/core/http_json.hpp"
#include "stancegraph/llm/gateway.hpp"

namespace stancegraph::llm {

OpenAiProvider::OpenAiProvider(OpenAiProviderOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw ValidationError("STANCEGRAPH_LLM_ENDPOINT is not set");
}

std::string OpenAiProvider::complete(const CompletionRequest& request) {
  json messages = json::array();
  if (!request.prompt.system.empty()) messages.push_back({{"role", "system"}, {"content", request.prompt.system}});
  messages.push_back({{"role", "user"}, {"content", request.prompt.user}});
  const json body{{"model", options_.model},
                  {"messages", messages},
                  {"temperature", request.params.temperature},
                  {"max_tokens", request.params.max_tokens}};
  const json res = post_json(options_.endpoint, "/chat/completions", options_.api_key, body, options_.timeout_seconds);
  try {
    return res.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw TransportError("malformed chat completion response", false);
  }
}

}  // namespace stancegraph::llm
