#include "stancegraph/core/json_io.hpp"

#include "stancegraph/core/error.hpp"

namespace stancegraph {
namespace {

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<T>();
  return std::nullopt;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<T>();
  return fallback;
}

}  // namespace

void to_json(json& j, const Date& d) { j = d.to_string(); }
void from_json(const json& j, Date& d) { d = Date::parse(j.get<std::string>()); }

void to_json(json& j, const Debate& v) {
  j = json{{"id", v.id},
           {"name", v.name},
           {"aliases", v.aliases},
           {"long_description", v.long_description},
           {"energy_type", v.energy_type},
           {"scope", v.scope},
           {"languages", v.languages}};
}

void from_json(const json& j, Debate& v) {
  v.id = get_or<std::string>(j, "id", "");
  v.name = j.at("name").get<std::string>();
  v.aliases = get_or<std::vector<std::string>>(j, "aliases", {});
  v.long_description = get_or<std::string>(j, "long_description", "");
  v.energy_type = get_or<std::string>(j, "energy_type", "");
  v.scope = get_or<std::string>(j, "scope", "");
  v.languages = get_or<std::vector<std::string>>(j, "languages", {});
}

void to_json(json& j, const Document& v) {
  j = json{{"id", v.id},
           {"title", v.title},
           {"editor", v.editor},
           {"content", v.content},
           {"source_kind", to_string(v.source_kind)},
           {"language", v.language},
           {"parse_failed", v.parse_failed}};
  put_optional(j, "date", v.date);
  put_optional(j, "actor_id", v.actor_id);
}

void from_json(const json& j, Document& v) {
  v.id = DocumentId(get_or<std::string>(j, "id", ""));
  v.title = get_or<std::string>(j, "title", "");
  v.editor = get_or<std::string>(j, "editor", "");
  v.content = get_or<std::string>(j, "content", "");
  v.date = get_optional<Date>(j, "date");
  v.source_kind = parse_source_kind(get_or<std::string>(j, "source_kind", "other"));
  v.actor_id = get_optional<ActorId>(j, "actor_id");
  if (v.actor_id && v.actor_id->empty()) v.actor_id.reset();
  v.language = get_or<std::string>(j, "language", "");
  v.parse_failed = get_or<bool>(j, "parse_failed", false);
}

void to_json(json& j, const Paragraph& v) {
  j = json{{"id", v.id},
           {"document_id", v.document_id},
           {"ordinal", v.ordinal},
           {"text", v.text},
           {"speaker_name", v.speaker_name},
           {"speaker_function", v.speaker_function},
           {"date", v.date},
           {"mentions_debate", v.mentions_debate}};
  put_optional(j, "embedding", v.embedding);
}

void from_json(const json& j, Paragraph& v) {
  v.id = j.at("id").get<ParagraphId>();
  v.document_id = j.at("document_id").get<DocumentId>();
  v.ordinal = j.at("ordinal").get<int>();
  v.text = j.at("text").get<std::string>();
  v.speaker_name = get_or<std::string>(j, "speaker_name", "");
  v.speaker_function = get_or<std::string>(j, "speaker_function", "");
  v.date = j.at("date").get<Date>();
  v.mentions_debate = get_or<bool>(j, "mentions_debate", false);
  v.embedding = get_optional<Embedding>(j, "embedding");
}

void to_json(json& j, const Actor& v) {
  j = json{{"id", v.id},
           {"canonical_name", v.canonical_name},
           {"aliases", v.aliases},
           {"function", v.function},
           {"owned_source_ids", v.owned_source_ids}};
}

void from_json(const json& j, Actor& v) {
  v.id = j.at("id").get<ActorId>();
  v.canonical_name = j.at("canonical_name").get<std::string>();
  v.aliases = get_or<std::vector<std::string>>(j, "aliases", {});
  v.function = get_or<std::string>(j, "function", "");
  v.owned_source_ids = get_or<std::vector<DocumentId>>(j, "owned_source_ids", {});
}

void to_json(json& j, const RelationEdge& v) {
  j = json{{"actor_id", v.actor_id}, {"paragraph_id", v.paragraph_id}, {"kind", to_string(v.kind)}};
}

void from_json(const json& j, RelationEdge& v) {
  v.actor_id = j.at("actor_id").get<ActorId>();
  v.paragraph_id = j.at("paragraph_id").get<ParagraphId>();
  v.kind = parse_relation_kind(j.at("kind").get<std::string>());
}

void to_json(json& j, const TopicLink& v) {
  j = json{{"paragraph_id", v.paragraph_id}, {"topic_id", v.topic_id}, {"similarity", v.similarity}};
}

void from_json(const json& j, TopicLink& v) {
  v.paragraph_id = j.at("paragraph_id").get<ParagraphId>();
  v.topic_id = j.at("topic_id").get<TopicId>();
  v.similarity = j.at("similarity").get<double>();
}

void to_json(json& j, const Topic& v) {
  j = json{{"id", v.id}, {"name", v.name}, {"description", v.description}, {"subtopics", v.subtopics}};
  put_optional(j, "embedding", v.embedding);
}

void from_json(const json& j, Topic& v) {
  v.id = j.at("id").get<TopicId>();
  v.name = j.at("name").get<std::string>();
  v.description = get_or<std::string>(j, "description", "");
  v.subtopics = get_or<std::vector<std::string>>(j, "subtopics", {});
  v.embedding = get_optional<Embedding>(j, "embedding");
}

void to_json(json& j, const Feedback& v) { j = json{{"user", v.user}, {"relevant", v.relevant}}; }

void from_json(const json& j, Feedback& v) {
  v.user = get_or<std::string>(j, "user", "");
  v.relevant = j.at("relevant").get<bool>();
}

void to_json(json& j, const Argument& v) {
  j = json{{"id", v.id},
           {"text", v.text},
           {"source_paragraph_ids", v.source_paragraph_ids},
           {"query_spec_id", v.query_spec_id},
           {"stance", to_string(v.stance)},
           {"judge_verdict", to_string(v.judge_verdict)},
           {"judge_comment", v.judge_comment},
           {"created_at", v.created_at},
           {"feedback", v.feedback}};
}

void from_json(const json& j, Argument& v) {
  v.id = j.at("id").get<ArgumentId>();
  v.text = j.at("text").get<std::string>();
  v.source_paragraph_ids = j.at("source_paragraph_ids").get<std::vector<ParagraphId>>();
  v.query_spec_id = j.at("query_spec_id").get<QuerySpecId>();
  v.stance = parse_stance(j.at("stance").get<std::string>());
  v.judge_verdict = parse_verdict(j.at("judge_verdict").get<std::string>());
  v.judge_comment = get_or<std::string>(j, "judge_comment", "");
  v.created_at = get_or<std::string>(j, "created_at", "");
  v.feedback = get_or<std::vector<Feedback>>(j, "feedback", {});
}

void to_json(json& j, const QuerySpec& v) {
  j = json{{"id", v.id}, {"family", to_string(v.family)}, {"question", v.question}};
  put_optional(j, "year", v.year);
  if (v.stance_target) j["stance_target"] = to_string(*v.stance_target);
  put_optional(j, "actor_id", v.actor_id);
  put_optional(j, "topic_id", v.topic_id);
}

void from_json(const json& j, QuerySpec& v) {
  v.id = j.at("id").get<QuerySpecId>();
  v.family = parse_query_family(j.at("family").get<std::string>());
  v.question = get_or<std::string>(j, "question", "");
  v.year = get_optional<int>(j, "year");
  if (auto s = get_optional<std::string>(j, "stance_target")) v.stance_target = parse_stance(*s);
  v.actor_id = get_optional<ActorId>(j, "actor_id");
  v.topic_id = get_optional<TopicId>(j, "topic_id");
}

void to_json(json& j, const QueryReport& v) {
  j = json{{"spec_id", v.spec_id},
           {"family", to_string(v.family)},
           {"status", to_string(v.status)},
           {"candidate_count", v.candidate_count},
           {"context_ids", v.context_ids},
           {"generated", v.generated},
           {"kept", v.kept},
           {"suppressed", v.suppressed},
           {"dropped_lines", v.dropped_lines},
           {"context_truncated", v.context_truncated},
           {"error", v.error}};
  if (v.tier) j["tier"] = to_string(*v.tier);
}

void from_json(const json& j, QueryReport& v) {
  v.spec_id = j.at("spec_id").get<QuerySpecId>();
  v.family = parse_query_family(j.at("family").get<std::string>());
  v.status = parse_query_status(j.at("status").get<std::string>());
  v.candidate_count = get_or<int>(j, "candidate_count", 0);
  if (auto t = get_optional<std::string>(j, "tier")) v.tier = parse_selection_tier(*t);
  v.context_ids = get_or<std::vector<ParagraphId>>(j, "context_ids", {});
  v.generated = get_or<int>(j, "generated", 0);
  v.kept = get_or<int>(j, "kept", 0);
  v.suppressed = get_or<int>(j, "suppressed", 0);
  v.dropped_lines = get_or<int>(j, "dropped_lines", 0);
  v.context_truncated = get_or<bool>(j, "context_truncated", false);
  v.error = get_or<std::string>(j, "error", "");
}

}  // namespace stancegraph
