#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stancegraph/core/graph.hpp"
#include "stancegraph/core/text.hpp"
#include "stancegraph/embed/embedder.hpp"
#include "stancegraph/llm/gateway.hpp"

namespace stancegraph::ingest {

inline constexpr std::size_t kDefaultMinSegmentLength = 200;
inline constexpr int kParseAttempts = 2;

/// One `<p speakerName="" speakerFunction="">` element of a parse response.
struct ParsedParagraphTag {
  std::string text;
  std::string speaker_name;
  std::string speaker_function;

  friend bool operator==(const ParsedParagraphTag&, const ParsedParagraphTag&) = default;
};

class MarkupError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Extracts the paragraphs of the `<edited_content>` block. Entities are
/// decoded and whitespace is collapsed. Throws MarkupError when the block is
/// missing, unbalanced or holds no non-empty paragraph.
std::vector<ParsedParagraphTag> parse_edited_content(std::string_view response);

/// Splits on blank lines and merges segments shorter than `min_length` code
/// points into the following ones. A short tail joins the last segment.
std::vector<std::string> heuristic_split(std::string_view content, std::size_t min_length = kDefaultMinSegmentLength);

/// Second-stage check of a candidate alias match (an NER backend, say).
class MentionVerifier {
 public:
  virtual ~MentionVerifier() = default;
  virtual bool verify(std::string_view paragraph_text, std::string_view alias, text::Span span) const = 0;
};

class AcceptAllVerifier final : public MentionVerifier {
 public:
  bool verify(std::string_view, std::string_view, text::Span) const override { return true; }
};

/// One is_mentioned_in_text edge per actor whose alias occurs as a whole word
/// and is accepted by the verifier.
std::vector<RelationEdge> detect_actor_mentions(const Paragraph& paragraph, const std::vector<const Actor*>& actors,
                                                const MentionVerifier& verifier);

bool detect_debate_mentions(const Paragraph& paragraph, const Debate& debate);

struct IngestOptions {
  std::string output_language = "English";
  std::size_t min_segment_length = kDefaultMinSegmentLength;
};

struct ParseOutcome {
  std::vector<ParsedParagraphTag> paragraphs;
  bool parse_failed = false;
  int attempts = 0;
};

/// Runs the parse template up to twice; on a second markup failure falls back
/// to heuristic_split with empty speakers. Gateway errors propagate.
ParseOutcome parse_document(const Document& doc, llm::LlmGateway& gateway, const IngestOptions& options = {});

/// Everything computed for a document outside the graph writer.
struct PreparedDocument {
  Document document;
  ParseOutcome parse;
  std::vector<Embedding> embeddings;  ///< one per parsed paragraph
  bool unchanged = false;             ///< already stored with identical content
};

/// Parses and embeds a document. Pure with respect to the graph: `graph` is
/// only read to detect an unchanged re-upsert.
PreparedDocument prepare_document(const DebateGraph& graph, Document doc, llm::LlmGateway& gateway,
                                  embed::Embedder& embedder, const IngestOptions& options = {});

struct IngestResult {
  DocumentId document_id;
  std::size_t paragraphs = 0;
  std::size_t relations = 0;
  bool parse_failed = false;
  bool unchanged = false;
};

/// Stores a prepared document: upsert, paragraphs, embeddings, debate flags
/// and is_author / intervention / is_mentioned_in_text edges.
IngestResult apply_prepared(DebateGraph& graph, PreparedDocument prepared, const MentionVerifier& verifier);

/// Recomputes the relation edges and debate flags of every paragraph of a
/// document, e.g. after the actor list changed. Returns the edges added.
std::size_t link_document(DebateGraph& graph, const DocumentId& id, const MentionVerifier& verifier);

}  // namespace stancegraph::ingest
