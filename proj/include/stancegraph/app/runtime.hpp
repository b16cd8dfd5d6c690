#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "stancegraph/app/config.hpp"
#include "stancegraph/core/store.hpp"
#include "stancegraph/embed/embedder.hpp"
#include "stancegraph/ingest/ingest.hpp"
#include "stancegraph/llm/gateway.hpp"
#include "stancegraph/mining/mining.hpp"
#include "stancegraph/network/network.hpp"
#include "stancegraph/topics/topics.hpp"

namespace stancegraph::app {

/// Timestamp written on arguments mined in replay mode, so replays are
/// byte-identical.
inline constexpr const char* kReplayTimestamp = "1970-01-01T00:00:00Z";

struct RuntimeOptions {
  std::optional<llm::LlmMode> mode;                   ///< overrides the config
  std::shared_ptr<llm::CompletionProvider> provider;  ///< default: OpenAI-compatible from env
  std::shared_ptr<embed::Embedder> embedder;          ///< default: per config
};

struct PipelineStatus {
  bool running = false;
  std::string kind;
  std::size_t done = 0;
  std::size_t total = 0;
  std::string last_error;
  std::string last_summary;
};

struct IngestSummary {
  std::vector<ingest::IngestResult> results;
  std::size_t parse_failures() const;
};

struct MineSummary {
  std::vector<QuerySpec> specs;
  mining::MiningRun run;
};

/// Feature-hash embedder, or the HTTP embedder configured from
/// STANCEGRAPH_EMBED_ENDPOINT / STANCEGRAPH_EMBED_API_KEY.
std::shared_ptr<embed::Embedder> make_embedder(const EmbeddingSettings& settings);

/// Reads documents from a JSON object, a JSON array or JSONL file.
std::vector<Document> load_documents(const std::filesystem::path& path);

/// Config, graph store, embedder and (lazily) the LLM gateway of one project,
/// plus the pipeline operations shared by the CLI and the service.
class Runtime {
 public:
  explicit Runtime(ProjectConfig config, RuntimeOptions options = {});

  const ProjectConfig& config() const noexcept { return config_; }
  llm::LlmMode mode() const noexcept { return mode_; }
  GraphStore& store() noexcept { return store_; }
  embed::Embedder& embedder() { return *embedder_; }
  llm::LlmGateway& gateway();

  void save() const;
  std::string now() const;

  ingest::IngestOptions ingest_options() const;
  mining::MiningSettings mining_settings() const;

  /// All-or-nothing: documents are validated, parsed and embedded first, then
  /// stored in a single write.
  IngestSummary ingest_documents(std::vector<Document> documents);

  topics::ThesaurusBuild build_thesaurus();
  /// Installs an analyst-edited thesaurus instead of running the pipeline.
  topics::Thesaurus import_thesaurus(const std::filesystem::path& path);
  std::size_t link_topics();

  std::vector<QuerySpec> plan() const;
  MineSummary mine(bool force = false);
  /// Mining with a lease the caller already holds (service background runs).
  MineSummary mine(GraphStore::ExclusiveLease& lease, bool force);
  void write_mining_outputs(const mining::MiningRun& run) const;

  network::InfluenceGraph map() const;

  PipelineStatus status() const;
  void set_status(PipelineStatus status);
  void update_progress(std::size_t done, std::size_t total);

 private:
  ProjectConfig config_;
  llm::LlmMode mode_;
  std::shared_ptr<llm::CompletionProvider> provider_;
  std::shared_ptr<embed::Embedder> embedder_;
  std::unique_ptr<llm::LlmGateway> gateway_;
  std::mutex gateway_mutex_;
  GraphStore store_;
  mutable std::mutex status_mutex_;
  PipelineStatus status_;
};

}  // namespace stancegraph::app
