#include "stancegraph/core/types.hpp"

#include <array>
#include <set>
#include <utility>

#include "stancegraph/core/error.hpp"
#include "stancegraph/core/text.hpp"

namespace stancegraph {
namespace {

template <class E, std::size_t N>
using LabelTable = std::array<std::pair<E, std::string_view>, N>;

constexpr LabelTable<SourceKind, 6> kSourceKinds{{{SourceKind::press, "press"},
                                                  {SourceKind::transcript, "transcript"},
                                                  {SourceKind::social_post, "social_post"},
                                                  {SourceKind::blog, "blog"},
                                                  {SourceKind::policy_doc, "policy_doc"},
                                                  {SourceKind::other, "other"}}};
constexpr LabelTable<RelationKind, 3> kRelationKinds{{{RelationKind::is_author, "is_author"},
                                                      {RelationKind::is_mentioned_in_text, "is_mentioned_in_text"},
                                                      {RelationKind::intervention, "intervention"}}};
constexpr LabelTable<Stance, 4> kStances{
    {{Stance::PRO, "PRO"}, {Stance::CON, "CON"}, {Stance::NEUTRAL, "NEUTRAL"}, {Stance::UNKNOWN, "UNKNOWN"}}};
constexpr LabelTable<Verdict, 3> kVerdicts{
    {{Verdict::STRONG, "STRONG"}, {Verdict::WEAK, "WEAK"}, {Verdict::INVALID, "INVALID"}}};
constexpr LabelTable<QueryFamily, 3> kFamilies{
    {{QueryFamily::global, "global"}, {QueryFamily::actor, "actor"}, {QueryFamily::topic, "topic"}}};
constexpr LabelTable<SelectionTier, 3> kTiers{
    {{SelectionTier::debate, "debate"}, {SelectionTier::topic, "topic"}, {SelectionTier::all, "all"}}};
constexpr LabelTable<QueryStatus, 3> kStatuses{
    {{QueryStatus::ok, "ok"}, {QueryStatus::empty, "empty"}, {QueryStatus::failed, "failed"}}};

template <class E, std::size_t N>
std::string_view label_of(const LabelTable<E, N>& table, E value) {
  for (const auto& [e, label] : table) {
    if (e == value) return label;
  }
  return "?";
}

template <class E, std::size_t N>
E value_of(const LabelTable<E, N>& table, std::string_view label, const char* what) {
  for (const auto& [e, l] : table) {
    if (l == label) return e;
  }
  throw ValidationError(std::string("unknown ") + what + " '" + std::string(label) + "'");
}

}  // namespace

std::string_view to_string(SourceKind v) { return label_of(kSourceKinds, v); }
std::string_view to_string(RelationKind v) { return label_of(kRelationKinds, v); }
std::string_view to_string(Stance v) { return label_of(kStances, v); }
std::string_view to_string(Verdict v) { return label_of(kVerdicts, v); }
std::string_view to_string(QueryFamily v) { return label_of(kFamilies, v); }
std::string_view to_string(SelectionTier v) { return label_of(kTiers, v); }
std::string_view to_string(QueryStatus v) { return label_of(kStatuses, v); }

SourceKind parse_source_kind(std::string_view s) { return value_of(kSourceKinds, s, "source kind"); }
RelationKind parse_relation_kind(std::string_view s) { return value_of(kRelationKinds, s, "relation kind"); }
Stance parse_stance(std::string_view s) { return value_of(kStances, s, "stance"); }
Verdict parse_verdict(std::string_view s) { return value_of(kVerdicts, s, "verdict"); }
QueryFamily parse_query_family(std::string_view s) { return value_of(kFamilies, s, "query family"); }
SelectionTier parse_selection_tier(std::string_view s) { return value_of(kTiers, s, "selection tier"); }
QueryStatus parse_query_status(std::string_view s) { return value_of(kStatuses, s, "query status"); }

Debate normalized(Debate debate) {
  debate.name = text::trim(debate.name);
  if (debate.name.empty()) throw ValidationError("debate name must not be empty");
  std::set<std::string> seen;
  std::vector<std::string> aliases;
  auto add = [&](const std::string& alias) {
    auto a = text::trim(alias);
    if (!a.empty() && seen.insert(text::casefold(a)).second) aliases.push_back(std::move(a));
  };
  add(debate.name);
  for (const auto& a : debate.aliases) add(a);
  debate.aliases = std::move(aliases);
  return debate;
}

Actor normalized(Actor actor) {
  actor.canonical_name = text::trim(actor.canonical_name);
  if (actor.id.empty()) throw ValidationError("actor id must not be empty");
  if (actor.canonical_name.empty()) throw ValidationError("actor '" + actor.id.value + "' has no canonical name");
  std::set<std::string> seen;
  std::vector<std::string> aliases{actor.canonical_name};
  seen.insert(text::casefold(actor.canonical_name));
  for (const auto& raw : actor.aliases) {
    auto a = text::trim(raw);
    if (a.empty()) continue;
    if (text::casefold(a) == text::casefold(actor.canonical_name)) continue;
    if (!seen.insert(text::casefold(a)).second) {
      throw ValidationError("actor '" + actor.id.value + "' has duplicate alias '" + a + "'");
    }
    aliases.push_back(std::move(a));
  }
  actor.aliases = std::move(aliases);
  return actor;
}

bool alias_matches(const Actor& actor, std::string_view text) {
  for (const auto& alias : actor.aliases) {
    if (text::contains_whole_word(text, alias)) return true;
  }
  return false;
}

void validate(const QuerySpec& spec) {
  const auto fail = [&](const char* why) {
    throw ValidationError("query spec '" + spec.id.value + "': " + why);
  };
  if (spec.id.empty()) fail("missing id");
  switch (spec.family) {
    case QueryFamily::global:
      if (!spec.year || !spec.stance_target) fail("global family needs year and stance target");
      if (*spec.stance_target != Stance::PRO && *spec.stance_target != Stance::CON) fail("stance target must be PRO or CON");
      break;
    case QueryFamily::actor:
      if (!spec.actor_id) fail("actor family needs an actor");
      if (spec.year) fail("actor family has no temporal split");
      break;
    case QueryFamily::topic:
      if (!spec.topic_id || !spec.year) fail("topic family needs topic and year");
      break;
  }
}

}  // namespace stancegraph
