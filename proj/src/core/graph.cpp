#include "stancegraph/core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stancegraph/core/digest.hpp"
#include "stancegraph/core/error.hpp"
#include "stancegraph/core/text.hpp"

namespace stancegraph {

DocumentId derive_document_id(const Document& doc) {
  const std::string key = doc.title + '\x1f' + (doc.date ? doc.date->to_string() : "") + '\x1f' + doc.content;
  return DocumentId("doc-" + sha256_hex(key).substr(0, 16));
}

ParagraphId make_paragraph_id(const Document& doc, int ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%04d", ordinal);
  return ParagraphId(doc.id.value + "/" + sha256_hex(doc.content).substr(0, 8) + "/" + buf);
}

DebateGraph::DebateGraph(Debate debate) : debate_(normalized(std::move(debate))) {}

void DebateGraph::set_debate(Debate debate) { debate_ = normalized(std::move(debate)); }

DocumentId DebateGraph::upsert_document(Document doc) {
  if (text::trim(doc.content).empty()) throw ValidationError("document content must not be empty");
  if (!doc.date) throw ValidationError("document '" + doc.title + "' has no date");
  if (doc.actor_id && !actors_.contains(*doc.actor_id)) {
    throw ValidationError("document references unknown actor '" + doc.actor_id->value + "'");
  }
  if (doc.id.empty()) doc.id = derive_document_id(doc);

  if (auto it = documents_.find(doc.id); it != documents_.end()) {
    Document previous = it->second;
    doc.parse_failed = previous.parse_failed;
    if (previous == doc) return doc.id;
    doc.parse_failed = false;
    drop_document_derivatives(doc.id);
  }
  if (doc.actor_id) {
    auto& owned = actors_.at(*doc.actor_id).owned_source_ids;
    if (std::find(owned.begin(), owned.end(), doc.id) == owned.end()) owned.push_back(doc.id);
  }
  const DocumentId id = doc.id;
  documents_[id] = std::move(doc);
  return id;
}

const Document* DebateGraph::find_document(const DocumentId& id) const {
  auto it = documents_.find(id);
  return it == documents_.end() ? nullptr : &it->second;
}

void DebateGraph::mark_parse_failed(const DocumentId& id, bool failed) {
  auto it = documents_.find(id);
  if (it == documents_.end()) throw NotFoundError("unknown document '" + id.value + "'");
  it->second.parse_failed = failed;
}

void DebateGraph::drop_document_derivatives(const DocumentId& id) {
  std::set<ParagraphId> dropped;
  for (auto it = paragraphs_.begin(); it != paragraphs_.end();) {
    if (it->second.document_id == id) {
      dropped.insert(it->first);
      it = paragraphs_.erase(it);
    } else {
      ++it;
    }
  }
  std::erase_if(relations_, [&](const RelationEdge& e) { return dropped.contains(e.paragraph_id); });
  std::erase_if(topic_links_, [&](const auto& entry) { return dropped.contains(entry.first); });
}

void DebateGraph::replace_paragraphs(const DocumentId& id, std::vector<Paragraph> paragraphs) {
  const Document* doc = find_document(id);
  if (!doc) throw NotFoundError("unknown document '" + id.value + "'");
  std::set<int> ordinals;
  for (auto& p : paragraphs) {
    if (p.ordinal < 0) throw ValidationError("paragraph ordinal must be >= 0");
    if (!ordinals.insert(p.ordinal).second) {
      throw ValidationError("duplicate paragraph ordinal " + std::to_string(p.ordinal) + " in '" + id.value + "'");
    }
    if (text::trim(p.text).empty()) throw ValidationError("paragraph text must not be empty");
    if (p.speaker_name.empty()) p.speaker_function.clear();
    p.document_id = id;
    p.date = *doc->date;
    if (p.id.empty()) p.id = make_paragraph_id(*doc, p.ordinal);
  }
  drop_document_derivatives(id);
  for (auto& p : paragraphs) {
    const ParagraphId pid = p.id;
    paragraphs_[pid] = std::move(p);
  }
}

const Paragraph* DebateGraph::find_paragraph(const ParagraphId& id) const {
  auto it = paragraphs_.find(id);
  return it == paragraphs_.end() ? nullptr : &it->second;
}

std::vector<const Paragraph*> DebateGraph::paragraphs_of(const DocumentId& id) const {
  std::vector<const Paragraph*> out;
  for (const auto& [pid, p] : paragraphs_) {
    if (p.document_id == id) out.push_back(&p);
  }
  std::sort(out.begin(), out.end(), [](const Paragraph* a, const Paragraph* b) { return a->ordinal < b->ordinal; });
  return out;
}

void DebateGraph::set_paragraph_embedding(const ParagraphId& id, Embedding embedding) {
  auto it = paragraphs_.find(id);
  if (it == paragraphs_.end()) throw NotFoundError("unknown paragraph '" + id.value + "'");
  if (embedding.empty()) throw ValidationError("embedding must not be empty");
  for (double v : embedding) {
    if (!std::isfinite(v)) throw ValidationError("embedding has a non-finite component");
  }
  it->second.embedding = std::move(embedding);
}

void DebateGraph::set_mentions_debate(const ParagraphId& id, bool mentions) {
  auto it = paragraphs_.find(id);
  if (it == paragraphs_.end()) throw NotFoundError("unknown paragraph '" + id.value + "'");
  it->second.mentions_debate = mentions;
}

void DebateGraph::upsert_actor(Actor actor) {
  actor = normalized(std::move(actor));
  if (auto it = actors_.find(actor.id); it != actors_.end()) {
    for (const auto& doc : it->second.owned_source_ids) {
      if (std::find(actor.owned_source_ids.begin(), actor.owned_source_ids.end(), doc) == actor.owned_source_ids.end()) {
        actor.owned_source_ids.push_back(doc);
      }
    }
  }
  const ActorId id = actor.id;
  actors_[id] = std::move(actor);
}

const Actor* DebateGraph::find_actor(const ActorId& id) const {
  auto it = actors_.find(id);
  return it == actors_.end() ? nullptr : &it->second;
}

bool DebateGraph::add_relation(const RelationEdge& edge) {
  const Actor* actor = find_actor(edge.actor_id);
  if (!actor) throw NotFoundError("unknown actor '" + edge.actor_id.value + "'");
  const Paragraph* paragraph = find_paragraph(edge.paragraph_id);
  if (!paragraph) throw NotFoundError("unknown paragraph '" + edge.paragraph_id.value + "'");
  if (edge.kind == RelationKind::intervention &&
      (paragraph->speaker_name.empty() || !alias_matches(*actor, paragraph->speaker_name))) {
    throw ValidationError("intervention edge needs the speaker of '" + edge.paragraph_id.value +
                          "' to match an alias of '" + actor->canonical_name + "'");
  }
  return relations_.insert(edge).second;
}

std::vector<ParagraphId> DebateGraph::actor_paragraph_ids(const ActorId& id) const {
  std::set<ParagraphId> ids;
  for (const auto& e : relations_) {
    if (e.actor_id == id) ids.insert(e.paragraph_id);
  }
  return {ids.begin(), ids.end()};
}

std::vector<RelationEdge> DebateGraph::relations_of(const ActorId& id) const {
  std::vector<RelationEdge> out;
  for (const auto& e : relations_) {
    if (e.actor_id == id) out.push_back(e);
  }
  return out;
}

void DebateGraph::set_topics(std::vector<Topic> topics) {
  std::map<TopicId, Topic> next;
  for (auto& t : topics) {
    if (t.id.empty() || text::trim(t.name).empty()) throw ValidationError("topic needs an id and a name");
    const TopicId id = t.id;
    if (!next.emplace(id, std::move(t)).second) throw ValidationError("duplicate topic id '" + id.value + "'");
  }
  topics_ = std::move(next);
  topic_links_.clear();
}

const Topic* DebateGraph::find_topic(const TopicId& id) const {
  auto it = topics_.find(id);
  return it == topics_.end() ? nullptr : &it->second;
}

void DebateGraph::set_topic_links(std::vector<TopicLink> links) {
  std::map<ParagraphId, std::vector<TopicLink>> next;
  for (auto& link : links) {
    if (!paragraphs_.contains(link.paragraph_id)) throw NotFoundError("unknown paragraph '" + link.paragraph_id.value + "'");
    if (!topics_.contains(link.topic_id)) throw NotFoundError("unknown topic '" + link.topic_id.value + "'");
    if (link.similarity < -1.0 || link.similarity > 1.0) throw ValidationError("topic link similarity outside [-1, 1]");
    auto& row = next[link.paragraph_id];
    for (const auto& existing : row) {
      if (existing.topic_id == link.topic_id) throw ValidationError("duplicate topic link");
    }
    row.push_back(std::move(link));
    if (row.size() > 3) throw ValidationError("more than 3 topic links for one paragraph");
  }
  topic_links_ = std::move(next);
}

std::size_t DebateGraph::topic_link_count() const {
  std::size_t n = 0;
  for (const auto& [pid, row] : topic_links_) n += row.size();
  return n;
}

std::vector<const Paragraph*> DebateGraph::select_paragraphs_global(int year) const {
  std::vector<const Paragraph*> out;
  for (const auto& [id, p] : paragraphs_) {
    if (p.date.year == year) out.push_back(&p);
  }
  return out;
}

ActorSelection DebateGraph::select_paragraphs_actor(const ActorId& id, std::size_t threshold) const {
  if (!actors_.contains(id)) throw NotFoundError("unknown actor '" + id.value + "'");
  ActorSelection all;
  all.tier = SelectionTier::all;
  std::vector<const Paragraph*> on_debate;
  std::vector<const Paragraph*> on_topic;
  for (const auto& pid : actor_paragraph_ids(id)) {
    const Paragraph* p = find_paragraph(pid);
    if (!p) continue;
    all.paragraphs.push_back(p);
    if (p->mentions_debate) on_debate.push_back(p);
    if (topic_links_.contains(pid)) on_topic.push_back(p);
  }
  if (on_debate.size() > threshold) return {std::move(on_debate), SelectionTier::debate};
  if (on_topic.size() > threshold) return {std::move(on_topic), SelectionTier::topic};
  return all;
}

std::vector<const Paragraph*> DebateGraph::select_paragraphs_topic(const TopicId& id, int year) const {
  if (!topics_.contains(id)) throw NotFoundError("unknown topic '" + id.value + "'");
  std::vector<const Paragraph*> out;
  for (const auto& [pid, row] : topic_links_) {
    const bool linked = std::any_of(row.begin(), row.end(), [&](const TopicLink& l) { return l.topic_id == id; });
    if (!linked) continue;
    const Paragraph& p = paragraphs_.at(pid);
    if (p.date.year == year) out.push_back(&p);
  }
  return out;
}

void DebateGraph::record_query(const QuerySpec& spec, const QueryReport& report, std::vector<Argument> arguments) {
  validate(spec);
  if (report.spec_id != spec.id) throw ValidationError("report does not belong to spec '" + spec.id.value + "'");
  for (const auto& arg : arguments) {
    if (arg.id.empty() || text::trim(arg.text).empty()) throw ValidationError("argument needs an id and text");
    if (arg.source_paragraph_ids.empty()) throw ValidationError("argument '" + arg.id.value + "' has no sources");
    if (arg.query_spec_id != spec.id) throw ValidationError("argument '" + arg.id.value + "' belongs to another spec");
    for (const auto& src : arg.source_paragraph_ids) {
      if (!paragraphs_.contains(src)) {
        throw ValidationError("argument '" + arg.id.value + "' cites unknown paragraph '" + src.value + "'");
      }
    }
  }
  std::erase_if(arguments_, [&](const auto& entry) { return entry.second.query_spec_id == spec.id; });
  for (auto& arg : arguments) {
    const ArgumentId id = arg.id;
    if (!arguments_.emplace(id, std::move(arg)).second) throw ValidationError("duplicate argument id '" + id.value + "'");
  }
  query_specs_[spec.id] = spec;
  query_reports_[spec.id] = report;
}

const Argument* DebateGraph::find_argument(const ArgumentId& id) const {
  auto it = arguments_.find(id);
  return it == arguments_.end() ? nullptr : &it->second;
}

void DebateGraph::add_feedback(const ArgumentId& id, Feedback feedback) {
  auto it = arguments_.find(id);
  if (it == arguments_.end() || it->second.judge_verdict == Verdict::INVALID) {
    throw NotFoundError("unknown argument '" + id.value + "'");
  }
  it->second.feedback.push_back(std::move(feedback));
}

}  // namespace stancegraph
