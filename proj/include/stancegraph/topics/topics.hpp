#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stancegraph/core/graph.hpp"
#include "stancegraph/embed/embedder.hpp"
#include "stancegraph/embed/mmr.hpp"
#include "stancegraph/llm/gateway.hpp"
#include "stancegraph/topics/spectral.hpp"

namespace stancegraph::topics {

inline constexpr double kDefaultLinkThreshold = 0.15;
inline constexpr std::size_t kMaxLinksPerParagraph = 3;
inline constexpr std::size_t kMaxSubtopics = 10;
inline constexpr std::size_t kMaxThemes = 10;
inline constexpr int kMarkupAttempts = 2;

// Chunking -----------------------------------------------------------------

enum class ChunkStrategy { monthly, quarterly, by_speaker };
std::string_view to_string(ChunkStrategy s);
ChunkStrategy parse_chunk_strategy(std::string_view s);

struct Chunk {
  std::string id;  ///< "2023-01", "2023-Q1", "speaker:<name>" or "speaker:-"
  std::vector<ParagraphId> paragraph_ids;
  std::optional<Date> window_begin;  ///< temporal strategies only
  std::optional<Date> window_end;    ///< inclusive
};

/// Partitions the paragraphs of the graph. Temporal windows are calendar
/// aligned, chronological and never empty. by_speaker groups case-folded
/// speaker names (ordered by first appearance in id order) and puts
/// speakerless paragraphs in one residual chunk at the end.
std::vector<Chunk> chunk_corpus(const DebateGraph& graph, ChunkStrategy strategy);

// Candidate extraction -----------------------------------------------------

struct RagSettings {
  std::size_t k = embed::kDefaultRetrieveK;
  double lambda = embed::kDefaultMmrLambda;
};

struct TopicCandidate {
  std::string id;  ///< "<chunk id>#<n>"
  std::string text;
  std::string chunk_id;
  Embedding embedding;
};

/// One candidate per non-empty line, bullets and numbering stripped, exact
/// duplicates dropped. A sole "I don't know." yields nothing.
std::vector<std::string> parse_candidate_lines(std::string_view response);

std::string topic_question(const Debate& debate);

/// RAG over one chunk: MMR over the chunk's embedded paragraphs, then the
/// topic_candidates template. Gateway failures propagate.
std::vector<TopicCandidate> extract_topic_candidates(const DebateGraph& graph, const Chunk& chunk,
                                                     llm::LlmGateway& gateway, embed::Embedder& embedder,
                                                     const RagSettings& settings = {});

// Themes -------------------------------------------------------------------

struct Theme {
  std::string topic;
  std::string description;
  std::vector<std::string> subtopics;
  std::vector<std::string> example_refs;  ///< candidate ids
  bool flagged = false;
  std::string flag_reason;

  friend bool operator==(const Theme&, const Theme&) = default;
};

/// Parses a `<themes>` block. Throws ValidationError when it is missing or a
/// theme has no topic name.
struct ParsedTheme {
  std::string topic;
  std::string description;
  std::vector<std::string> subtopics;
  std::vector<std::string> examples;
};
std::vector<ParsedTheme> parse_themes(std::string_view response);

/// One cluster_naming call per non-empty cluster; examples written as
/// "sentence#N" resolve to the cluster's N-th candidate (1-based).
std::vector<Theme> summarize_clusters(const std::vector<std::vector<const TopicCandidate*>>& clusters,
                                      const Debate& debate, llm::LlmGateway& gateway);

struct Thesaurus {
  std::vector<Theme> themes;
};

/// Consolidates themes with one thesaurus_building call (none for a single
/// theme). Caps at kMaxThemes and suffixes duplicate names. Throws
/// ValidationError on malformed markup after two attempts.
Thesaurus aggregate_thesaurus(const std::vector<Theme>& themes, const Debate& debate, llm::LlmGateway& gateway);

/// "description\nsub1; sub2; ..."
std::string theme_embedding_text(const Theme& theme);
std::string slugify(std::string_view name);

/// Topic rows with ids derived from the names and embeddings of the theme
/// embedding text.
std::vector<Topic> to_topics(const Thesaurus& thesaurus, embed::Embedder& embedder);

// Linking ------------------------------------------------------------------

/// Per paragraph: themes with cosine >= threshold, best three kept (ties by
/// topic id). Paragraphs or topics without embeddings are skipped.
std::vector<TopicLink> link_topics(const DebateGraph& graph, double threshold = kDefaultLinkThreshold);

// Pipeline -----------------------------------------------------------------

struct ThesaurusBuildOptions {
  ChunkStrategy strategy = ChunkStrategy::quarterly;
  RagSettings rag;
  std::uint64_t seed = kDefaultClusterSeed;
  std::size_t parallelism = 4;
};

struct ThesaurusBuild {
  std::vector<Chunk> chunks;
  std::vector<TopicCandidate> candidates;
  Clustering clustering;
  std::vector<Theme> cluster_themes;
  Thesaurus thesaurus;
};

/// chunk -> extract -> cluster -> summarize -> aggregate over a frozen graph.
ThesaurusBuild build_thesaurus(const DebateGraph& graph, llm::LlmGateway& gateway, embed::Embedder& embedder,
                               const ThesaurusBuildOptions& options = {});

// Export / import ----------------------------------------------------------

std::string export_thesaurus(const Thesaurus& thesaurus);
Thesaurus import_thesaurus(std::string_view xml);
void save_thesaurus(const Thesaurus& thesaurus, const std::filesystem::path& path);
Thesaurus load_thesaurus(const std::filesystem::path& path);
Thesaurus thesaurus_from_topics(const DebateGraph& graph);

}  // namespace stancegraph::topics
