#include "stancegraph/core/snapshot.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "stancegraph/core/error.hpp"
#include "stancegraph/core/json_io.hpp"

namespace stancegraph {
namespace {

constexpr const char* kFormat = "stancegraph-snapshot";

void emit(std::ostream& out, const char* kind, json body, std::size_t& count) {
  body["record"] = kind;
  out << body.dump() << '\n';
  ++count;
}

}  // namespace

void write_snapshot(const DebateGraph& graph, std::ostream& out) {
  std::size_t count = 0;
  emit(out, "header", json{{"format", kFormat}, {"schema_version", kSnapshotSchemaVersion}}, count);
  emit(out, "debate", json(graph.debate()), count);
  for (const auto& [id, actor] : graph.actors()) emit(out, "actor", json(actor), count);
  for (const auto& [id, doc] : graph.documents()) emit(out, "document", json(doc), count);
  for (const auto& [id, p] : graph.paragraphs()) emit(out, "paragraph", json(p), count);
  for (const auto& edge : graph.relations()) emit(out, "relation", json(edge), count);
  for (const auto& [id, topic] : graph.topics()) emit(out, "topic", json(topic), count);
  for (const auto& [pid, row] : graph.topic_links()) {
    for (const auto& link : row) emit(out, "topic_link", json(link), count);
  }
  for (const auto& [id, spec] : graph.query_specs()) emit(out, "query_spec", json(spec), count);
  for (const auto& [id, report] : graph.query_reports()) emit(out, "query_report", json(report), count);
  for (const auto& [id, arg] : graph.arguments()) emit(out, "argument", json(arg), count);
  out << json{{"record", "end"}, {"records", count}}.dump() << '\n';
}

/// Rebuilds a graph record by record, checking references as it goes.
class SnapshotReader {
 public:
  DebateGraph read(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t records = 0;
    bool header = false;
    bool ended = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (ended) throw SnapshotError(line_no, "record after end marker");
      json record;
      try {
        record = json::parse(line);
      } catch (const json::exception&) {
        throw SnapshotError(line_no, "corrupt record");
      }
      try {
        const std::string kind = record.at("record").get<std::string>();
        if (!header) {
          if (kind != "header" || record.value("format", "") != kFormat) {
            throw SnapshotError(line_no, "missing snapshot header");
          }
          const int version = record.at("schema_version").get<int>();
          if (version != kSnapshotSchemaVersion) {
            throw SnapshotError(line_no, "unsupported schema version " + std::to_string(version) + " (expected " +
                                             std::to_string(kSnapshotSchemaVersion) + ")");
          }
          header = true;
          ++records;
          continue;
        }
        if (kind == "end") {
          if (record.at("records").get<std::size_t>() != records) {
            throw SnapshotError(line_no, "record count mismatch");
          }
          ended = true;
          continue;
        }
        apply(kind, record, line_no);
        ++records;
      } catch (const SnapshotError&) {
        throw;
      } catch (const std::exception& e) {
        throw SnapshotError(line_no, std::string("invalid record: ") + e.what());
      }
    }
    if (!header) throw SnapshotError(line_no + 1, "empty snapshot");
    if (!ended) throw SnapshotError(line_no + 1, "missing end marker (truncated snapshot)");
    return std::move(graph_);
  }

 private:
  void require(bool ok, std::size_t line_no, const std::string& what) {
    if (!ok) throw SnapshotError(line_no, what);
  }

  void apply(const std::string& kind, const json& record, std::size_t line_no) {
    if (kind == "debate") {
      graph_.debate_ = record.get<Debate>();
    } else if (kind == "actor") {
      auto actor = record.get<Actor>();
      graph_.actors_[actor.id] = std::move(actor);
    } else if (kind == "document") {
      auto doc = record.get<Document>();
      require(!doc.actor_id || graph_.actors_.contains(*doc.actor_id), line_no, "document cites unknown actor");
      graph_.documents_[doc.id] = std::move(doc);
    } else if (kind == "paragraph") {
      auto p = record.get<Paragraph>();
      require(graph_.documents_.contains(p.document_id), line_no, "paragraph cites unknown document");
      graph_.paragraphs_[p.id] = std::move(p);
    } else if (kind == "relation") {
      auto e = record.get<RelationEdge>();
      require(graph_.actors_.contains(e.actor_id) && graph_.paragraphs_.contains(e.paragraph_id), line_no,
              "relation cites unknown actor or paragraph");
      graph_.relations_.insert(std::move(e));
    } else if (kind == "topic") {
      auto t = record.get<Topic>();
      graph_.topics_[t.id] = std::move(t);
    } else if (kind == "topic_link") {
      auto l = record.get<TopicLink>();
      require(graph_.topics_.contains(l.topic_id) && graph_.paragraphs_.contains(l.paragraph_id), line_no,
              "topic link cites unknown topic or paragraph");
      graph_.topic_links_[l.paragraph_id].push_back(std::move(l));
    } else if (kind == "query_spec") {
      auto s = record.get<QuerySpec>();
      graph_.query_specs_[s.id] = std::move(s);
    } else if (kind == "query_report") {
      auto r = record.get<QueryReport>();
      graph_.query_reports_[r.spec_id] = std::move(r);
    } else if (kind == "argument") {
      auto a = record.get<Argument>();
      graph_.arguments_[a.id] = std::move(a);
    } else {
      throw SnapshotError(line_no, "unknown record kind '" + kind + "'");
    }
  }

  DebateGraph graph_;
};

DebateGraph read_snapshot(std::istream& in) { return SnapshotReader{}.read(in); }

void save_snapshot(const DebateGraph& graph, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write snapshot '" + tmp.string() + "'");
    write_snapshot(graph, out);
    if (!out.flush()) throw Error("cannot write snapshot '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

DebateGraph load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("snapshot '" + path.string() + "' not found");
  return read_snapshot(in);
}

}  // namespace stancegraph
