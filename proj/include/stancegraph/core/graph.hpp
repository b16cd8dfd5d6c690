#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <vector>

#include "stancegraph/core/types.hpp"

namespace stancegraph {

/// Paragraph count an actor's debate (then topic) set must exceed before it is
/// used for actor-family retrieval.
inline constexpr std::size_t kDefaultActorFallbackThreshold = 25;

struct ActorSelection {
  std::vector<const Paragraph*> paragraphs;
  SelectionTier tier = SelectionTier::all;
};

/// Derives the stable identifier of a document without one: a digest of
/// title, date and content.
DocumentId derive_document_id(const Document& doc);

/// Paragraph ids embed a digest of the document content, so a re-upsert with
/// changed text never reuses the ids that older arguments point at.
ParagraphId make_paragraph_id(const Document& doc, int ordinal);

/// The typed graph of one debate: documents, paragraphs, actors, topics,
/// relations, topic links and mined arguments. Value type; all containers are
/// ordered so iteration and serialization are deterministic.
class DebateGraph {
 public:
  DebateGraph() = default;
  explicit DebateGraph(Debate debate);

  const Debate& debate() const noexcept { return debate_; }
  void set_debate(Debate debate);

  // Documents ---------------------------------------------------------------

  /// Stores the document. Re-upserting an existing id with different content
  /// drops its paragraphs, their relation edges and topic links; arguments
  /// are kept and detect the dangling sources when served.
  DocumentId upsert_document(Document doc);
  const Document* find_document(const DocumentId& id) const;
  const std::map<DocumentId, Document>& documents() const noexcept { return documents_; }
  void mark_parse_failed(const DocumentId& id, bool failed);

  // Paragraphs --------------------------------------------------------------

  /// Replaces every paragraph of the document (and what derives from them).
  void replace_paragraphs(const DocumentId& id, std::vector<Paragraph> paragraphs);
  const Paragraph* find_paragraph(const ParagraphId& id) const;
  const std::map<ParagraphId, Paragraph>& paragraphs() const noexcept { return paragraphs_; }
  std::vector<const Paragraph*> paragraphs_of(const DocumentId& id) const;
  void set_paragraph_embedding(const ParagraphId& id, Embedding embedding);
  void set_mentions_debate(const ParagraphId& id, bool mentions);

  // Actors ------------------------------------------------------------------

  void upsert_actor(Actor actor);
  const Actor* find_actor(const ActorId& id) const;
  const std::map<ActorId, Actor>& actors() const noexcept { return actors_; }

  // Relations ---------------------------------------------------------------

  /// Returns false (and changes nothing) when the edge already exists.
  bool add_relation(const RelationEdge& edge);
  const std::set<RelationEdge>& relations() const noexcept { return relations_; }
  /// Paragraphs linked to the actor by any relation kind, ascending id.
  std::vector<ParagraphId> actor_paragraph_ids(const ActorId& id) const;
  std::vector<RelationEdge> relations_of(const ActorId& id) const;

  // Topics ------------------------------------------------------------------

  /// Installs a new thesaurus. Existing topic links are cleared.
  void set_topics(std::vector<Topic> topics);
  const Topic* find_topic(const TopicId& id) const;
  const std::map<TopicId, Topic>& topics() const noexcept { return topics_; }
  void set_topic_links(std::vector<TopicLink> links);
  const std::map<ParagraphId, std::vector<TopicLink>>& topic_links() const noexcept { return topic_links_; }
  std::size_t topic_link_count() const;

  // Paragraph selection (retrieval pre-filters) -------------------------------

  std::vector<const Paragraph*> select_paragraphs_global(int year) const;
  ActorSelection select_paragraphs_actor(const ActorId& id,
                                         std::size_t threshold = kDefaultActorFallbackThreshold) const;
  std::vector<const Paragraph*> select_paragraphs_topic(const TopicId& id, int year) const;

  // Mining results ----------------------------------------------------------

  /// Stores the outcome of one query, replacing arguments of an earlier run of
  /// the same spec. Every source must resolve to a stored paragraph.
  void record_query(const QuerySpec& spec, const QueryReport& report, std::vector<Argument> arguments);
  const std::map<QuerySpecId, QuerySpec>& query_specs() const noexcept { return query_specs_; }
  const std::map<QuerySpecId, QueryReport>& query_reports() const noexcept { return query_reports_; }
  const std::map<ArgumentId, Argument>& arguments() const noexcept { return arguments_; }
  const Argument* find_argument(const ArgumentId& id) const;
  void add_feedback(const ArgumentId& id, Feedback feedback);

  friend bool operator==(const DebateGraph&, const DebateGraph&) = default;

 private:
  friend class SnapshotReader;

  void drop_document_derivatives(const DocumentId& id);

  Debate debate_;
  std::map<DocumentId, Document> documents_;
  std::map<ParagraphId, Paragraph> paragraphs_;
  std::map<ActorId, Actor> actors_;
  std::set<RelationEdge> relations_;
  std::map<TopicId, Topic> topics_;
  std::map<ParagraphId, std::vector<TopicLink>> topic_links_;
  std::map<QuerySpecId, QuerySpec> query_specs_;
  std::map<QuerySpecId, QueryReport> query_reports_;
  std::map<ArgumentId, Argument> arguments_;
};

}  // namespace stancegraph
