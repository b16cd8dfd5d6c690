#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>

#include "stancegraph/core/error.hpp"
#include "stancegraph/llm/prompt_template.hpp"

namespace stancegraph::llm {

struct DecodingParams {
  double temperature = 0.0;
  int max_tokens = 2048;
  /// 1-based attempt number of a validation retry. Part of the replay key so
  /// a recorded second attempt can differ from the first.
  int attempt = 1;
};

struct CompletionRequest {
  TemplateName template_name = TemplateName::parse_document;
  RenderedPrompt prompt;
  DecodingParams params;
  /// Set when retrieved context was cut to fit the prompt budget.
  bool context_truncated = false;
};

/// Replay key: SHA-256 over the rendered prompt and decoding parameters.
std::string request_digest(const CompletionRequest& request);

struct CompletionRecord {
  std::string digest;
  std::string template_name;
  std::string response;
  std::string provider_id;
  double latency_ms = 0.0;
  int attempts = 1;
  bool context_truncated = false;
};

class ReplayMissError : public Error {
 public:
  explicit ReplayMissError(const std::string& digest)
      : Error("replay miss: no archived completion for digest " + digest), digest_(digest) {}
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string digest_;
};

/// Completion backend seam. Implementations throw TransportError on failure.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

/// Line-delimited archive of completion records keyed by digest. Appends
/// are serialized under a lock and flushed to the backing file immediately.
class ReplayArchive {
 public:
  ReplayArchive() = default;
  /// Loads `path` if it exists; later appends go to the same file.
  static std::shared_ptr<ReplayArchive> open(const std::filesystem::path& path);

  std::optional<std::string> find(const std::string& digest) const;
  /// Ignores records whose digest is already archived; returns whether added.
  bool append(const CompletionRecord& record);
  std::size_t size() const;
  std::vector<CompletionRecord> records() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, CompletionRecord> by_digest_;
  std::vector<std::string> order_;
  std::optional<std::filesystem::path> path_;
  std::ofstream sink_;
};

enum class LlmMode { live, record, replay };
std::string_view to_string(LlmMode mode);
LlmMode parse_llm_mode(std::string_view s);

struct GatewayOptions {
  LlmMode mode = LlmMode::replay;
  std::size_t parallelism = 4;
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{250};
  std::chrono::milliseconds max_backoff{8000};
};

struct GatewayStats {
  std::size_t calls = 0;
  std::size_t provider_calls = 0;
  std::size_t retries = 0;
  std::size_t replay_hits = 0;
  std::size_t max_in_flight = 0;
};

/// Renders templates and dispatches completions. In replay mode every answer
/// comes from the archive; in record mode provider answers are archived; in
/// live mode the provider is called without recording. Provider calls are
/// bounded by `parallelism` and retried with exponential backoff on
/// transient transport errors.
class LlmGateway {
 public:
  LlmGateway(GatewayOptions options, TemplateLibrary templates, std::shared_ptr<CompletionProvider> provider,
             std::shared_ptr<ReplayArchive> archive);

  const TemplateLibrary& templates() const noexcept { return templates_; }
  const GatewayOptions& options() const noexcept { return options_; }

  CompletionRequest prepare(TemplateName name, const Variables& variables, DecodingParams params = {}) const;
  std::string complete(const CompletionRequest& request);
  std::string run(TemplateName name, const Variables& variables, DecodingParams params = {}) {
    return complete(prepare(name, variables, params));
  }

  GatewayStats stats() const;

 private:
  std::string call_provider(const CompletionRequest& request, const std::string& digest);

  GatewayOptions options_;
  TemplateLibrary templates_;
  std::shared_ptr<CompletionProvider> provider_;
  std::shared_ptr<ReplayArchive> archive_;
  std::counting_semaphore<> slots_;
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> provider_calls_{0};
  std::atomic<std::size_t> retries_{0};
  std::atomic<std::size_t> replay_hits_{0};
  std::atomic<std::size_t> max_in_flight_{0};
};

struct OpenAiProviderOptions {
  std::string endpoint;  ///< base URL, e.g. https://api.openai.com/v1
  std::string api_key;
  std::string model = "gpt-4o-mini";
  int timeout_seconds = 120;
};

/// Reads STANCEGRAPH_LLM_ENDPOINT, STANCEGRAPH_LLM_API_KEY and
/// STANCEGRAPH_LLM_MODEL.
OpenAiProviderOptions provider_options_from_env();

/// Chat-completions client for OpenAI-compatible endpoints (Azure OpenAI via
/// a compatible gateway included).
class OpenAiProvider final : public CompletionProvider {
 public:
  explicit OpenAiProvider(OpenAiProviderOptions options);
  std::string id() const override { return "openai:" + options_.model; }
  std::string complete(const CompletionRequest& request) override;

 private:
  OpenAiProviderOptions options_;
};

}  // namespace stancegraph::llm
