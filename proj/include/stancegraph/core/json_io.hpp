#pragma once

#include <json.hpp>

#include "stancegraph/core/types.hpp"

namespace stancegraph {

using json = nlohmann::json;

template <class Tag>
void to_json(json& j, const Id<Tag>& id) {
  j = id.value;
}

template <class Tag>
void from_json(const json& j, Id<Tag>& id) {
  id.value = j.get<std::string>();
}

void to_json(json& j, const Date& d);
void from_json(const json& j, Date& d);

void to_json(json& j, const Debate& v);
void from_json(const json& j, Debate& v);
void to_json(json& j, const Document& v);
/// Accepts the document input record; `id`, `actor_id`, `editor` and
/// `language` are optional, a missing date is reported later by validation.
void from_json(const json& j, Document& v);
void to_json(json& j, const Paragraph& v);
void from_json(const json& j, Paragraph& v);
void to_json(json& j, const Actor& v);
void from_json(const json& j, Actor& v);
void to_json(json& j, const RelationEdge& v);
void from_json(const json& j, RelationEdge& v);
void to_json(json& j, const TopicLink& v);
void from_json(const json& j, TopicLink& v);
void to_json(json& j, const Topic& v);
void from_json(const json& j, Topic& v);
void to_json(json& j, const Feedback& v);
void from_json(const json& j, Feedback& v);
void to_json(json& j, const Argument& v);
void from_json(const json& j, Argument& v);
void to_json(json& j, const QuerySpec& v);
void from_json(const json& j, QuerySpec& v);
void to_json(json& j, const QueryReport& v);
void from_json(const json& j, QueryReport& v);

}  // namespace stancegraph
