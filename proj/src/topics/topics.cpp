#include "stancegraph/topics/topics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stancegraph/core/markup.hpp"
#include "stancegraph/core/parallel.hpp"
#include "stancegraph/core/text.hpp"
#include "stancegraph/embed/vector.hpp"
#include "stancegraph/llm/debate_vars.hpp"

namespace stancegraph::topics {
namespace {

bool is_dont_know(std::string_view s) {
  auto t = text::casefold(text::trim(s));
  while (!t.empty() && (t.back() == '.' || t.back() == '"' || t.back() == '\'')) t.pop_back();
  while (!t.empty() && (t.front() == '"' || t.front() == '\'')) t.erase(t.begin());
  return t == "i don't know" || t == "i don\xe2\x80\x99t know";
}

/// Removes "- ", "* ", "• ", "1. ", "2) " style prefixes.
std::string strip_list_marker(std::string_view line) {
  std::string s = text::trim(line);
  for (std::string_view bullet : {"-", "*", "+", "\xe2\x80\xa2", "\xe2\x80\x93", "\xe2\x80\x94"}) {
    if (s.starts_with(bullet)) return text::trim(std::string_view(s).substr(bullet.size()));
  }
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) return text::trim(std::string_view(s).substr(i + 1));
  return s;
}

std::string window_id(const Date& d, ChunkStrategy strategy) {
  char buf[32];
  if (strategy == ChunkStrategy::monthly) {
    std::snprintf(buf, sizeof buf, "%04d-%02u", d.year, d.month);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-Q%u", d.year, d.quarter());
  }
  return buf;
}

std::pair<Date, Date> window_bounds(const Date& d, ChunkStrategy strategy) {
  if (strategy == ChunkStrategy::monthly) {
    return {Date{d.year, d.month, 1}, Date{d.year, d.month, days_in_month(d.year, d.month)}};
  }
  const unsigned first = static_cast<unsigned>((d.quarter() - 1) * 3 + 1);
  return {Date{d.year, first, 1}, Date{d.year, first + 2, days_in_month(d.year, first + 2)}};
}

std::vector<std::string> dedupe_names(std::vector<Theme>& themes) {
  std::vector<std::string> renamed;
  std::set<std::string> seen;
  for (auto& theme : themes) {
    std::string name = theme.topic;
    for (int n = 2; !seen.insert(text::casefold(name)).second; ++n) name = theme.topic + " (" + std::to_string(n) + ")";
    if (name != theme.topic) {
      theme.topic = name;
      theme.flagged = true;
      theme.flag_reason = "duplicate theme name";
      renamed.push_back(name);
    }
  }
  return renamed;
}

void cap_subtopics(Theme& theme) {
  std::vector<std::string> unique;
  std::set<std::string> seen;
  for (auto& s : theme.subtopics) {
    if (!s.empty() && seen.insert(text::casefold(s)).second) unique.push_back(std::move(s));
  }
  theme.subtopics = std::move(unique);
  if (theme.subtopics.size() > kMaxSubtopics) {
    theme.subtopics.resize(kMaxSubtopics);
    theme.flagged = true;
    theme.flag_reason = "more than 10 subtopics, truncated";
  }
}

std::string format_themes_for_prompt(const std::vector<Theme>& themes) {
  std::string out;
  for (const auto& t : themes) {
    out += "- " + t.topic;
    if (!t.description.empty()) out += ": " + t.description;
    if (!t.subtopics.empty()) {
      out += " (";
      for (std::size_t i = 0; i < t.subtopics.size(); ++i) out += (i ? "; " : "") + t.subtopics[i];
      out += ")";
    }
    out += "\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

}  // namespace

std::string_view to_string(ChunkStrategy s) {
  switch (s) {
    case ChunkStrategy::monthly: return "monthly";
    case ChunkStrategy::quarterly: return "quarterly";
    case ChunkStrategy::by_speaker: return "by_speaker";
  }
  return "?";
}

ChunkStrategy parse_chunk_strategy(std::string_view s) {
  if (s == "monthly") return ChunkStrategy::monthly;
  if (s == "quarterly") return ChunkStrategy::quarterly;
  if (s == "by_speaker") return ChunkStrategy::by_speaker;
  throw ValidationError("chunking strategy must be monthly, quarterly or by_speaker, got '" + std::string(s) + "'");
}

std::vector<Chunk> chunk_corpus(const DebateGraph& graph, ChunkStrategy strategy) {
  std::vector<Chunk> chunks;
  if (strategy == ChunkStrategy::by_speaker) {
    std::map<std::string, std::size_t> index;
    Chunk residual{"speaker:-", {}, std::nullopt, std::nullopt};
    for (const auto& [id, p] : graph.paragraphs()) {
      const std::string key = text::casefold(text::normalize_space(p.speaker_name));
      if (key.empty()) {
        residual.paragraph_ids.push_back(id);
        continue;
      }
      auto [it, inserted] = index.emplace(key, chunks.size());
      if (inserted) chunks.push_back(Chunk{"speaker:" + key, {}, std::nullopt, std::nullopt});
      chunks[it->second].paragraph_ids.push_back(id);
    }
    if (!residual.paragraph_ids.empty()) chunks.push_back(std::move(residual));
    return chunks;
  }
  std::map<std::string, Chunk> windows;  // ids sort chronologically
  for (const auto& [id, p] : graph.paragraphs()) {
    const std::string wid = window_id(p.date, strategy);
    auto it = windows.find(wid);
    if (it == windows.end()) {
      const auto [begin, end] = window_bounds(p.date, strategy);
      it = windows.emplace(wid, Chunk{wid, {}, begin, end}).first;
    }
    it->second.paragraph_ids.push_back(id);
  }
  for (auto& [wid, chunk] : windows) chunks.push_back(std::move(chunk));
  return chunks;
}

std::vector<std::string> parse_candidate_lines(std::string_view response) {
  if (is_dont_know(response)) return {};
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& raw : text::split(response, '\n')) {
    std::string line = strip_list_marker(raw);
    if (line.empty() || is_dont_know(line)) continue;
    if (seen.insert(text::casefold(line)).second) out.push_back(std::move(line));
  }
  return out;
}

std::string topic_question(const Debate& debate) { return "What are the emerging topics related to " + debate.name + "?"; }

std::vector<TopicCandidate> extract_topic_candidates(const DebateGraph& graph, const Chunk& chunk,
                                                     llm::LlmGateway& gateway, embed::Embedder& embedder,
                                                     const RagSettings& settings) {
  if (chunk.paragraph_ids.empty()) throw ValidationError("chunk '" + chunk.id + "' is empty");
  const std::string question = topic_question(graph.debate());
  const Embedding query = embedder.embed(question);
  std::vector<embed::MmrCandidate> pool;
  for (const auto& pid : chunk.paragraph_ids) {
    const Paragraph* p = graph.find_paragraph(pid);
    if (p && p->embedding) pool.push_back({pid, *p->embedding});
  }
  if (pool.empty()) return {};
  const auto selected = embed::mmr_select(query, pool, settings.k, settings.lambda);
  std::string context;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    context += "id-" + std::to_string(i + 1) + ": " + graph.find_paragraph(selected[i])->text + "\n";
  }
  context.pop_back();

  auto vars = llm::debate_variables(graph.debate());
  vars["context"] = context;
  vars["question"] = question;
  std::vector<TopicCandidate> out;
  for (auto& line : parse_candidate_lines(gateway.run(llm::TemplateName::topic_candidates, vars))) {
    TopicCandidate c;
    c.id = chunk.id + "#" + std::to_string(out.size() + 1);
    c.embedding = embedder.embed(line);
    c.text = std::move(line);
    c.chunk_id = chunk.id;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ParsedTheme> parse_themes(std::string_view response) {
  const auto blocks = markup::elements(response, "themes");
  if (blocks.empty()) throw ValidationError("no <themes> block");
  std::vector<ParsedTheme> out;
  for (auto block : markup::elements(blocks.front(), "theme")) {
    ParsedTheme t;
    t.topic = markup::first_text(block, "topic");
    if (t.topic.empty()) throw ValidationError("<theme> without <topic>");
    t.description = markup::first_text(block, "description");
    for (auto s : markup::elements(block, "subtopic")) {
      auto v = text::normalize_space(markup::decode_entities(s));
      if (!v.empty()) t.subtopics.push_back(std::move(v));
    }
    for (auto s : markup::elements(block, "example")) {
      auto v = text::normalize_space(markup::decode_entities(s));
      if (!v.empty()) t.examples.push_back(std::move(v));
    }
    out.push_back(std::move(t));
  }
  if (out.empty()) throw ValidationError("<themes> holds no theme");
  return out;
}

std::vector<Theme> summarize_clusters(const std::vector<std::vector<const TopicCandidate*>>& clusters,
                                      const Debate& debate, llm::LlmGateway& gateway) {
  auto per_cluster = parallel_map(clusters.size(), gateway.options().parallelism, [&](std::size_t ci) {
    std::vector<Theme> themes;
    const auto& members = clusters[ci];
    if (members.empty()) return themes;
    std::string listing;
    for (std::size_t i = 0; i < members.size(); ++i) {
      listing += "sentence#" + std::to_string(i + 1) + ": " + members[i]->text + "\n";
    }
    listing.pop_back();
    auto vars = llm::debate_variables(debate);
    vars["topics"] = listing;
    for (int attempt = 1; attempt <= kMarkupAttempts; ++attempt) {
      llm::DecodingParams params;
      params.attempt = attempt;
      try {
        for (auto& parsed : parse_themes(gateway.run(llm::TemplateName::cluster_naming, vars, params))) {
          Theme theme;
          theme.topic = std::move(parsed.topic);
          theme.description = std::move(parsed.description);
          std::vector<std::string> example_texts;
          for (const auto& ex : parsed.examples) {
            const auto hash = ex.find('#');
            if (hash == std::string::npos) continue;
            const std::string digits = text::trim(std::string_view(ex).substr(hash + 1));
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) continue;
            const std::size_t n = std::stoul(digits);
            if (n < 1 || n > members.size()) continue;
            theme.example_refs.push_back(members[n - 1]->id);
            example_texts.push_back(members[n - 1]->text);
          }
          theme.subtopics = parsed.subtopics.empty() ? example_texts : std::move(parsed.subtopics);
          cap_subtopics(theme);
          themes.push_back(std::move(theme));
        }
        return themes;
      } catch (const ValidationError&) {
        themes.clear();
      }
    }
    Theme fallback;
    fallback.topic = "Unnamed cluster " + std::to_string(ci + 1);
    for (const auto* m : members) {
      fallback.example_refs.push_back(m->id);
      fallback.subtopics.push_back(m->text);
    }
    cap_subtopics(fallback);
    fallback.flagged = true;
    fallback.flag_reason = "cluster naming markup unparseable";
    themes.push_back(std::move(fallback));
    return themes;
  });
  std::vector<Theme> out;
  for (auto& group : per_cluster) {
    for (auto& t : group) out.push_back(std::move(t));
  }
  return out;
}

Thesaurus aggregate_thesaurus(const std::vector<Theme>& themes, const Debate& debate, llm::LlmGateway& gateway) {
  if (themes.empty()) throw ValidationError("thesaurus aggregation needs at least one theme");
  Thesaurus result;
  if (themes.size() == 1) {
    result.themes = themes;
    return result;
  }
  auto vars = llm::debate_variables(debate);
  vars["topics"] = format_themes_for_prompt(themes);
  std::vector<ParsedTheme> parsed;
  for (int attempt = 1; attempt <= kMarkupAttempts && parsed.empty(); ++attempt) {
    llm::DecodingParams params;
    params.attempt = attempt;
    try {
      parsed = parse_themes(gateway.run(llm::TemplateName::thesaurus_building, vars, params));
    } catch (const ValidationError& e) {
      if (attempt == kMarkupAttempts) throw ValidationError(std::string("thesaurus markup unparseable: ") + e.what());
    }
  }
  for (auto& p : parsed) {
    Theme t;
    t.topic = std::move(p.topic);
    t.description = std::move(p.description);
    t.subtopics = std::move(p.subtopics);
    cap_subtopics(t);
    result.themes.push_back(std::move(t));
  }
  if (result.themes.size() > kMaxThemes) {
    result.themes.resize(kMaxThemes);
    for (auto& t : result.themes) {
      if (!t.flagged) {
        t.flagged = true;
        t.flag_reason = "thesaurus truncated to 10 themes";
      }
    }
  }
  dedupe_names(result.themes);
  return result;
}

std::string theme_embedding_text(const Theme& theme) {
  std::string out = theme.description + "\n";
  for (std::size_t i = 0; i < theme.subtopics.size(); ++i) out += (i ? "; " : "") + theme.subtopics[i];
  return out;
}

std::string slugify(std::string_view name) {
  std::string out;
  bool dash = false;
  for (unsigned char c : text::casefold(name)) {
    if (std::isalnum(c)) {
      if (dash && !out.empty()) out += '-';
      out += static_cast<char>(c);
      dash = false;
    } else {
      dash = true;
    }
  }
  return out.empty() ? "topic" : out;
}

std::vector<Topic> to_topics(const Thesaurus& thesaurus, embed::Embedder& embedder) {
  std::vector<Topic> out;
  std::set<std::string> ids;
  for (const auto& theme : thesaurus.themes) {
    std::string id = slugify(theme.topic);
    for (int n = 2; !ids.insert(id).second; ++n) id = slugify(theme.topic) + "-" + std::to_string(n);
    Topic t;
    t.id = TopicId(id);
    t.name = theme.topic;
    t.description = theme.description;
    t.subtopics = theme.subtopics;
    std::string embed_text = theme_embedding_text(theme);
    if (text::trim(embed_text).empty()) embed_text = theme.topic;
    t.embedding = embedder.embed(embed_text);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TopicLink> link_topics(const DebateGraph& graph, double threshold) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) throw ValidationError("topic link threshold must lie in [-1, 1]");
  std::vector<TopicLink> links;
  for (const auto& [pid, p] : graph.paragraphs()) {
    if (!p.embedding) continue;
    std::vector<TopicLink> row;
    for (const auto& [tid, topic] : graph.topics()) {
      if (!topic.embedding) continue;
      const double sim = embed::cosine(*p.embedding, *topic.embedding);
      if (sim >= threshold) row.push_back({pid, tid, sim});
    }
    std::stable_sort(row.begin(), row.end(), [](const TopicLink& a, const TopicLink& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.topic_id < b.topic_id;
    });
    if (row.size() > kMaxLinksPerParagraph) row.resize(kMaxLinksPerParagraph);
    for (auto& l : row) links.push_back(std::move(l));
  }
  return links;
}

ThesaurusBuild build_thesaurus(const DebateGraph& graph, llm::LlmGateway& gateway, embed::Embedder& embedder,
                               const ThesaurusBuildOptions& options) {
  if (graph.paragraphs().empty()) throw ValidationError("the corpus has no paragraphs");
  ThesaurusBuild build;
  build.chunks = chunk_corpus(graph, options.strategy);
  auto per_chunk = parallel_map(build.chunks.size(), options.parallelism, [&](std::size_t i) {
    return extract_topic_candidates(graph, build.chunks[i], gateway, embedder, options.rag);
  });
  for (auto& group : per_chunk) {
    for (auto& c : group) build.candidates.push_back(std::move(c));
  }
  if (build.candidates.empty()) throw ValidationError("no topic candidates were extracted");

  std::vector<Embedding> vectors;
  for (const auto& c : build.candidates) vectors.push_back(c.embedding);
  build.clustering = spectral_cluster(vectors, options.seed);
  std::vector<std::vector<const TopicCandidate*>> clusters;
  for (const auto& members : build.clustering.clusters) {
    auto& group = clusters.emplace_back();
    for (std::size_t i : members) group.push_back(&build.candidates[i]);
  }
  build.cluster_themes = summarize_clusters(clusters, graph.debate(), gateway);
  build.thesaurus = aggregate_thesaurus(build.cluster_themes, graph.debate(), gateway);
  return build;
}

std::string export_thesaurus(const Thesaurus& thesaurus) {
  std::string out = "<themes>\n";
  for (const auto& t : thesaurus.themes) {
    out += "  <theme>\n";
    out += "    <topic>" + markup::escape(t.topic) + "</topic>\n";
    out += "    <description>" + markup::escape(t.description) + "</description>\n";
    out += "    <subtopics>\n";
    for (const auto& s : t.subtopics) out += "      <subtopic>" + markup::escape(s) + "</subtopic>\n";
    out += "    </subtopics>\n";
    out += "  </theme>\n";
  }
  out += "</themes>\n";
  return out;
}

Thesaurus import_thesaurus(std::string_view xml) {
  Thesaurus result;
  for (auto& p : parse_themes(xml)) {
    Theme t;
    t.topic = std::move(p.topic);
    t.description = std::move(p.description);
    t.subtopics = std::move(p.subtopics);
    cap_subtopics(t);
    result.themes.push_back(std::move(t));
  }
  if (result.themes.size() > kMaxThemes) throw ValidationError("a thesaurus holds at most 10 themes");
  std::set<std::string> names;
  for (const auto& t : result.themes) {
    if (!names.insert(text::casefold(t.topic)).second) throw ValidationError("duplicate theme name '" + t.topic + "'");
  }
  return result;
}

void save_thesaurus(const Thesaurus& thesaurus, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write thesaurus '" + path.string() + "'");
  out << export_thesaurus(thesaurus);
}

Thesaurus load_thesaurus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("thesaurus '" + path.string() + "' not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return import_thesaurus(buf.str());
}

Thesaurus thesaurus_from_topics(const DebateGraph& graph) {
  Thesaurus result;
  for (const auto& [id, topic] : graph.topics()) result.themes.push_back({topic.name, topic.description, topic.subtopics, {}, false, {}});
  return result;
}

}  // namespace stancegraph::topics
