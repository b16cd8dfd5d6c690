#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stancegraph/core/error.hpp"
#include "stancegraph/core/json_io.hpp"
#include "stancegraph/llm/gateway.hpp"
#include "stancegraph/topics/topics.hpp"

namespace stancegraph::app {

struct Thresholds {
  std::size_t actor_fallback = kDefaultActorFallbackThreshold;
  double topic_link_t = topics::kDefaultLinkThreshold;
  double mmr_lambda = embed::kDefaultMmrLambda;
  std::size_t retrieve_k = embed::kDefaultRetrieveK;
};

struct LlmSettings {
  llm::LlmMode mode = llm::LlmMode::replay;
  std::filesystem::path archive;
  std::size_t parallelism = 4;
  int max_attempts = 3;
};

struct EmbeddingSettings {
  std::string provider = "feature-hash";  ///< or "http"
  std::size_t dimension = 256;
  std::string model;  ///< http provider only
};

struct ServiceSettings {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// Project configuration. Relative paths are resolved against the directory
/// of the config file.
struct ProjectConfig {
  Debate debate;
  std::filesystem::path actors_path;
  Thresholds thresholds;
  topics::ChunkStrategy chunking = topics::ChunkStrategy::quarterly;
  std::vector<int> years;
  bool mining_enabled = true;
  LlmSettings llm;
  EmbeddingSettings embedding;
  std::filesystem::path template_dir;
  std::filesystem::path snapshot_path;
  std::filesystem::path report_path;
  std::filesystem::path arguments_path;
  std::filesystem::path map_path;
  std::filesystem::path thesaurus_path;
  std::string output_language = "English";
  std::size_t min_segment_length = 200;
  std::optional<std::size_t> max_context_chars;
  std::uint64_t cluster_seed = topics::kDefaultClusterSeed;
  ServiceSettings service;
};

/// Every invalid field, reported together.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

ProjectConfig config_from_json(const json& j, const std::filesystem::path& base_dir);
json config_to_json(const ProjectConfig& config, const std::filesystem::path& base_dir);
ProjectConfig load_config(const std::filesystem::path& path);

/// Scaffold written by `init`.
ProjectConfig default_config(const std::filesystem::path& dir);

/// Reads a JSON array of actor records.
std::vector<Actor> load_actors(const std::filesystem::path& path);

}  // namespace stancegraph::app
