#include "stancegraph/ingest/ingest.hpp"

#include <cctype>
#include <map>
#include <optional>

#include "stancegraph/core/markup.hpp"

namespace stancegraph::ingest {
namespace {

/// Replaces inline tags with spaces.
std::string strip_tags(std::string_view s) {
  std::string out;
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') in_tag = true;
    if (!in_tag) out += c;
    if (c == '>' && in_tag) {
      in_tag = false;
      out += ' ';
    }
  }
  return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

/// Finds the next `<p` opening tag (not `<pre`, `<param`, ...) at or after pos.
std::size_t find_p_open(std::string_view s, std::size_t pos) {
  while ((pos = s.find("<p", pos)) != std::string_view::npos) {
    const std::size_t after = pos + 2;
    if (after < s.size() && (is_space(s[after]) || s[after] == '>' || s[after] == '/')) return pos;
    pos = after;
  }
  return std::string_view::npos;
}

std::map<std::string, std::string> parse_attributes(std::string_view s) {
  std::map<std::string, std::string> attrs;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (is_space(s[i]) || s[i] == '/')) ++i;
    const std::size_t name_begin = i;
    while (i < s.size() && s[i] != '=' && !is_space(s[i])) ++i;
    const std::string name(s.substr(name_begin, i - name_begin));
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size() || s[i] != '=') {
      if (!name.empty()) attrs[name] = "";
      continue;
    }
    ++i;
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size() || (s[i] != '"' && s[i] != '\'')) throw MarkupError("unquoted attribute '" + name + "'");
    const char quote = s[i++];
    const auto close = s.find(quote, i);
    if (close == std::string_view::npos) throw MarkupError("unterminated attribute '" + name + "'");
    attrs[name] = text::normalize_space(markup::decode_entities(s.substr(i, close - i)));
    i = close + 1;
  }
  return attrs;
}

}  // namespace

std::vector<ParsedParagraphTag> parse_edited_content(std::string_view response) {
  constexpr std::string_view kOpen = "<edited_content>";
  constexpr std::string_view kClose = "</edited_content>";
  const auto open = response.find(kOpen);
  if (open == std::string_view::npos) throw MarkupError("no <edited_content> block");
  const auto close = response.find(kClose, open);
  if (close == std::string_view::npos) throw MarkupError("unterminated <edited_content> block");
  const std::string_view body = response.substr(open + kOpen.size(), close - open - kOpen.size());

  std::vector<ParsedParagraphTag> out;
  std::size_t pos = 0;
  while ((pos = find_p_open(body, pos)) != std::string_view::npos) {
    const auto tag_end = body.find('>', pos);
    if (tag_end == std::string_view::npos) throw MarkupError("unterminated <p> tag");
    std::string_view attr_text = body.substr(pos + 2, tag_end - pos - 2);
    const bool self_closing = !attr_text.empty() && attr_text.back() == '/';
    const auto attrs = parse_attributes(attr_text);
    if (self_closing) {
      pos = tag_end + 1;
      continue;
    }
    const auto end = body.find("</p>", tag_end);
    if (end == std::string_view::npos) throw MarkupError("unterminated <p> element");
    const auto nested = find_p_open(body, tag_end);
    if (nested != std::string_view::npos && nested < end) throw MarkupError("nested <p> element");

    ParsedParagraphTag tag;
    tag.text = text::normalize_space(markup::decode_entities(strip_tags(body.substr(tag_end + 1, end - tag_end - 1))));
    if (auto it = attrs.find("speakerName"); it != attrs.end()) tag.speaker_name = it->second;
    if (auto it = attrs.find("speakerFunction"); it != attrs.end()) tag.speaker_function = it->second;
    if (tag.speaker_name.empty()) tag.speaker_function.clear();
    if (!tag.text.empty()) out.push_back(std::move(tag));
    pos = end + 4;
  }
  if (out.empty()) throw MarkupError("<edited_content> holds no paragraph");
  return out;
}

std::vector<std::string> heuristic_split(std::string_view content, std::size_t min_length) {
  std::vector<std::string> blocks;
  std::string current;
  auto flush_block = [&] {
    auto t = text::trim(current);
    if (!t.empty()) blocks.push_back(std::move(t));
    current.clear();
  };
  for (const auto& line : text::split(content, '\n')) {
    if (text::trim(line).empty()) {
      flush_block();
    } else {
      if (!current.empty()) current += '\n';
      current += line;
    }
  }
  flush_block();

  std::vector<std::string> segments;
  std::string buffer;
  for (auto& block : blocks) {
    if (!buffer.empty()) buffer += "\n\n";
    buffer += block;
    if (text::utf8_length(buffer) >= min_length) {
      segments.push_back(std::move(buffer));
      buffer.clear();
    }
  }
  if (!buffer.empty()) {
    if (segments.empty()) {
      segments.push_back(std::move(buffer));
    } else {
      segments.back() += "\n\n" + buffer;
    }
  }
  return segments;
}

std::vector<RelationEdge> detect_actor_mentions(const Paragraph& paragraph, const std::vector<const Actor*>& actors,
                                                const MentionVerifier& verifier) {
  std::vector<RelationEdge> edges;
  for (const Actor* actor : actors) {
    bool accepted = false;
    for (const auto& alias : actor->aliases) {
      for (const auto& span : text::find_whole_word(paragraph.text, alias)) {
        if (verifier.verify(paragraph.text, alias, span)) {
          accepted = true;
          break;
        }
      }
      if (accepted) break;
    }
    if (accepted) edges.push_back({actor->id, paragraph.id, RelationKind::is_mentioned_in_text});
  }
  return edges;
}

bool detect_debate_mentions(const Paragraph& paragraph, const Debate& debate) {
  for (const auto& alias : debate.aliases) {
    if (text::contains_whole_word(paragraph.text, alias)) return true;
  }
  return false;
}

ParseOutcome parse_document(const Document& doc, llm::LlmGateway& gateway, const IngestOptions& options) {
  const llm::Variables vars{{"doc_editor", doc.editor},
                            {"doc_title", doc.title},
                            {"doc_content", doc.content},
                            {"output_language", options.output_language}};
  ParseOutcome outcome;
  for (int attempt = 1; attempt <= kParseAttempts; ++attempt) {
    outcome.attempts = attempt;
    llm::DecodingParams params;
    params.attempt = attempt;
    const std::string response = gateway.run(llm::TemplateName::parse_document, vars, params);
    try {
      outcome.paragraphs = parse_edited_content(response);
      return outcome;
    } catch (const MarkupError&) {
    }
  }
  outcome.parse_failed = true;
  outcome.paragraphs.clear();
  for (auto& segment : heuristic_split(doc.content, options.min_segment_length)) {
    outcome.paragraphs.push_back({text::normalize_space(segment), "", ""});
  }
  return outcome;
}

PreparedDocument prepare_document(const DebateGraph& graph, Document doc, llm::LlmGateway& gateway,
                                  embed::Embedder& embedder, const IngestOptions& options) {
  if (text::trim(doc.content).empty()) throw ValidationError("document '" + doc.title + "' has no content");
  if (!doc.date) throw ValidationError("document '" + doc.title + "' has no date");
  if (doc.actor_id && !graph.find_actor(*doc.actor_id)) {
    throw ValidationError("document '" + doc.title + "' references unknown actor '" + doc.actor_id->value + "'");
  }
  if (doc.id.empty()) doc.id = derive_document_id(doc);

  PreparedDocument prepared;
  if (const Document* existing = graph.find_document(doc.id)) {
    Document probe = doc;
    probe.parse_failed = existing->parse_failed;
    if (probe == *existing && !graph.paragraphs_of(doc.id).empty()) {
      prepared.document = std::move(probe);
      prepared.unchanged = true;
      return prepared;
    }
  }
  prepared.parse = parse_document(doc, gateway, options);
  for (const auto& p : prepared.parse.paragraphs) prepared.embeddings.push_back(embedder.embed(p.text));
  prepared.document = std::move(doc);
  return prepared;
}

std::size_t link_document(DebateGraph& graph, const DocumentId& id, const MentionVerifier& verifier) {
  const Document* doc = graph.find_document(id);
  if (!doc) throw NotFoundError("unknown document '" + id.value + "'");
  std::vector<const Actor*> actors;
  for (const auto& [aid, actor] : graph.actors()) actors.push_back(&actor);

  std::vector<RelationEdge> edges;
  std::vector<std::pair<ParagraphId, bool>> debate_flags;
  for (const Paragraph* p : graph.paragraphs_of(id)) {
    debate_flags.emplace_back(p->id, detect_debate_mentions(*p, graph.debate()));
    if (doc->actor_id) edges.push_back({*doc->actor_id, p->id, RelationKind::is_author});
    if (!p->speaker_name.empty()) {
      for (const Actor* actor : actors) {
        if (alias_matches(*actor, p->speaker_name)) edges.push_back({actor->id, p->id, RelationKind::intervention});
      }
    }
    for (auto& e : detect_actor_mentions(*p, actors, verifier)) edges.push_back(std::move(e));
  }
  for (const auto& [pid, flag] : debate_flags) graph.set_mentions_debate(pid, flag);
  std::size_t added = 0;
  for (const auto& e : edges) added += graph.add_relation(e) ? 1 : 0;
  return added;
}

IngestResult apply_prepared(DebateGraph& graph, PreparedDocument prepared, const MentionVerifier& verifier) {
  IngestResult result;
  if (prepared.unchanged) {
    result.document_id = prepared.document.id;
    result.paragraphs = graph.paragraphs_of(result.document_id).size();
    result.parse_failed = prepared.document.parse_failed;
    result.unchanged = true;
    return result;
  }
  result.document_id = graph.upsert_document(prepared.document);
  std::vector<Paragraph> paragraphs;
  for (std::size_t i = 0; i < prepared.parse.paragraphs.size(); ++i) {
    auto& tag = prepared.parse.paragraphs[i];
    Paragraph p;
    p.ordinal = static_cast<int>(i);
    p.text = std::move(tag.text);
    p.speaker_name = std::move(tag.speaker_name);
    p.speaker_function = std::move(tag.speaker_function);
    paragraphs.push_back(std::move(p));
  }
  graph.replace_paragraphs(result.document_id, std::move(paragraphs));
  graph.mark_parse_failed(result.document_id, prepared.parse.parse_failed);
  const auto stored = graph.paragraphs_of(result.document_id);
  for (std::size_t i = 0; i < stored.size() && i < prepared.embeddings.size(); ++i) {
    graph.set_paragraph_embedding(stored[i]->id, std::move(prepared.embeddings[i]));
  }
  result.paragraphs = stored.size();
  result.parse_failed = prepared.parse.parse_failed;
  result.relations = link_document(graph, result.document_id, verifier);
  return result;
}

}  // namespace stancegraph::ingest
