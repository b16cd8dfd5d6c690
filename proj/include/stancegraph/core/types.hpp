#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stancegraph/core/date.hpp"
#include "stancegraph/core/ids.hpp"

namespace stancegraph {

using Embedding = std::vector<double>;

enum class SourceKind { press, transcript, social_post, blog, policy_doc, other };
enum class RelationKind { is_author, is_mentioned_in_text, intervention };
enum class Stance { PRO, CON, NEUTRAL, UNKNOWN };
enum class Verdict { STRONG, WEAK, INVALID };
enum class QueryFamily { global, actor, topic };
enum class SelectionTier { debate, topic, all };

std::string_view to_string(SourceKind v);
std::string_view to_string(RelationKind v);
std::string_view to_string(Stance v);
std::string_view to_string(Verdict v);
std::string_view to_string(QueryFamily v);
std::string_view to_string(SelectionTier v);

// Parsers throw ValidationError on unknown labels.
SourceKind parse_source_kind(std::string_view s);
RelationKind parse_relation_kind(std::string_view s);
Stance parse_stance(std::string_view s);
Verdict parse_verdict(std::string_view s);
QueryFamily parse_query_family(std::string_view s);
SelectionTier parse_selection_tier(std::string_view s);

/// Binary quality view used by the judge metrics: INVALID is BAD, the rest GOOD.
inline bool is_good(Verdict v) { return v != Verdict::INVALID; }

struct Debate {
  std::string id;
  std::string name;
  std::vector<std::string> aliases;
  std::string long_description;
  std::string energy_type;
  std::string scope;
  std::vector<std::string> languages;

  friend bool operator==(const Debate&, const Debate&) = default;
};

/// Fills in the name-as-alias rule and checks the remaining invariants.
Debate normalized(Debate debate);

struct Document {
  DocumentId id;
  std::string title;
  std::string editor;
  std::string content;
  std::optional<Date> date;
  SourceKind source_kind = SourceKind::other;
  std::optional<ActorId> actor_id;
  std::string language;
  bool parse_failed = false;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Paragraph {
  ParagraphId id;
  DocumentId document_id;
  int ordinal = 0;
  std::string text;
  std::string speaker_name;
  std::string speaker_function;
  Date date;
  bool mentions_debate = false;
  std::optional<Embedding> embedding;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

struct Actor {
  ActorId id;
  std::string canonical_name;
  std::vector<std::string> aliases;
  std::string function;
  std::vector<DocumentId> owned_source_ids;

  friend bool operator==(const Actor&, const Actor&) = default;
};

/// Adds the canonical name to the aliases and rejects case-folded duplicates.
Actor normalized(Actor actor);

/// True when any alias of the actor occurs as a whole word in `text`.
bool alias_matches(const Actor& actor, std::string_view text);

struct RelationEdge {
  ActorId actor_id;
  ParagraphId paragraph_id;
  RelationKind kind = RelationKind::is_mentioned_in_text;

  friend auto operator<=>(const RelationEdge&, const RelationEdge&) = default;
  friend bool operator==(const RelationEdge&, const RelationEdge&) = default;
};

struct TopicLink {
  ParagraphId paragraph_id;
  TopicId topic_id;
  double similarity = 0.0;

  friend bool operator==(const TopicLink&, const TopicLink&) = default;
};

/// One entry of the debate thesaurus as stored in the graph.
struct Topic {
  TopicId id;
  std::string name;
  std::string description;
  std::vector<std::string> subtopics;
  std::optional<Embedding> embedding;

  friend bool operator==(const Topic&, const Topic&) = default;
};

struct Feedback {
  std::string user;
  bool relevant = false;

  friend bool operator==(const Feedback&, const Feedback&) = default;
};

struct Argument {
  ArgumentId id;
  std::string text;
  std::vector<ParagraphId> source_paragraph_ids;
  QuerySpecId query_spec_id;
  Stance stance = Stance::UNKNOWN;
  Verdict judge_verdict = Verdict::INVALID;
  std::string judge_comment;
  std::string created_at;
  std::vector<Feedback> feedback;

  friend bool operator==(const Argument&, const Argument&) = default;
};

struct QuerySpec {
  QuerySpecId id;
  QueryFamily family = QueryFamily::global;
  std::optional<int> year;
  std::optional<Stance> stance_target;
  std::optional<ActorId> actor_id;
  std::optional<TopicId> topic_id;
  std::string question;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

/// Throws ValidationError when the family/field combination is inconsistent.
void validate(const QuerySpec& spec);

enum class QueryStatus { ok, empty, failed };
std::string_view to_string(QueryStatus v);
QueryStatus parse_query_status(std::string_view s);

/// One row of the mining pipeline report; also the restart marker for a spec.
struct QueryReport {
  QuerySpecId spec_id;
  QueryFamily family = QueryFamily::global;
  QueryStatus status = QueryStatus::ok;
  int candidate_count = 0;
  std::optional<SelectionTier> tier;
  std::vector<ParagraphId> context_ids;
  int generated = 0;
  int kept = 0;
  int suppressed = 0;
  int dropped_lines = 0;
  bool context_truncated = false;
  std::string error;

  friend bool operator==(const QueryReport&, const QueryReport&) = default;
};

}  // namespace stancegraph
