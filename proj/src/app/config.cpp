#include "stancegraph/app/config.hpp"

#include <fstream>
#include <sstream>

#ifndef STANCEGRAPH_TEMPLATE_DIR
#define STANCEGRAPH_TEMPLATE_DIR "templates"
#endif

namespace stancegraph::app {
namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& i : issues) out += "\n  - " + i;
  return out;
}

/// Collects field errors instead of stopping at the first one.
class FieldReader {
 public:
  FieldReader(const json& root, std::vector<std::string>& issues) : root_(root), issues_(issues) {}

  template <class T>
  void read(const char* path, T& out) {
    const json* node = find(path);
    if (!node) return;
    try {
      out = node->get<T>();
    } catch (const json::exception&) {
      issues_.push_back(std::string(path) + ": wrong type");
    }
  }

  void read_path(const char* path, std::filesystem::path& out, const std::filesystem::path& base) {
    std::string s;
    const json* node = find(path);
    if (!node) return;
    if (!node->is_string()) {
      issues_.push_back(std::string(path) + ": must be a string");
      return;
    }
    s = node->get<std::string>();
    std::filesystem::path p(s);
    out = p.is_absolute() || s.empty() ? p : base / p;
  }

  const json* find(const char* dotted) const {
    const json* node = &root_;
    std::string part;
    std::istringstream in(dotted);
    while (std::getline(in, part, '.')) {
      if (!node->is_object() || !node->contains(part)) return nullptr;
      node = &(*node)[part];
    }
    return node;
  }

 private:
  const json& root_;
  std::vector<std::string>& issues_;
};

std::string relative_to(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty()) return "";
  auto rel = p.lexically_relative(base);
  return rel.empty() || rel.string().starts_with("..") ? p.string() : rel.string();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues) : ValidationError(join_issues(issues)), issues_(std::move(issues)) {}

ProjectConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  std::vector<std::string> issues;
  if (!j.is_object()) throw ConfigError({"<root>: must be an object"});
  ProjectConfig c;
  FieldReader r(j, issues);

  if (const json* d = r.find("debate")) {
    try {
      c.debate = normalized(d->get<Debate>());
    } catch (const std::exception& e) {
      issues.push_back(std::string("debate: ") + e.what());
    }
  } else {
    issues.push_back("debate: required");
  }
  r.read_path("actors_path", c.actors_path, base_dir);
  r.read("thresholds.actor_fallback", c.thresholds.actor_fallback);
  r.read("thresholds.topic_link_t", c.thresholds.topic_link_t);
  r.read("thresholds.mmr_lambda", c.thresholds.mmr_lambda);
  r.read("thresholds.retrieve_k", c.thresholds.retrieve_k);
  if (const json* s = r.find("chunking")) {
    try {
      c.chunking = topics::parse_chunk_strategy(s->get<std::string>());
    } catch (const std::exception& e) {
      issues.push_back(std::string("chunking: ") + e.what());
    }
  }
  r.read("years", c.years);
  r.read("mining_enabled", c.mining_enabled);
  if (const json* m = r.find("llm.mode")) {
    try {
      c.llm.mode = llm::parse_llm_mode(m->get<std::string>());
    } catch (const std::exception& e) {
      issues.push_back(std::string("llm.mode: ") + e.what());
    }
  }
  r.read_path("llm.archive", c.llm.archive, base_dir);
  r.read("llm.parallelism", c.llm.parallelism);
  r.read("llm.max_attempts", c.llm.max_attempts);
  r.read("embedding.provider", c.embedding.provider);
  r.read("embedding.dimension", c.embedding.dimension);
  r.read("embedding.model", c.embedding.model);
  c.template_dir = STANCEGRAPH_TEMPLATE_DIR;
  r.read_path("template_dir", c.template_dir, base_dir);
  r.read_path("snapshot_path", c.snapshot_path, base_dir);
  r.read_path("report_path", c.report_path, base_dir);
  r.read_path("arguments_path", c.arguments_path, base_dir);
  r.read_path("map_path", c.map_path, base_dir);
  r.read_path("thesaurus_path", c.thesaurus_path, base_dir);
  r.read("output_language", c.output_language);
  r.read("min_segment_length", c.min_segment_length);
  if (const json* m = r.find("max_context_chars"); m && !m->is_null()) {
    std::size_t v = 0;
    r.read("max_context_chars", v);
    c.max_context_chars = v;
  }
  r.read("cluster_seed", c.cluster_seed);
  r.read("service.host", c.service.host);
  r.read("service.port", c.service.port);

  const auto& t = c.thresholds;
  if (!(t.topic_link_t >= 0.0 && t.topic_link_t <= 1.0)) issues.push_back("thresholds.topic_link_t: must lie in [0, 1]");
  if (!(t.mmr_lambda >= 0.0 && t.mmr_lambda <= 1.0)) issues.push_back("thresholds.mmr_lambda: must lie in [0, 1]");
  if (t.retrieve_k < 1 || t.retrieve_k > 1000) issues.push_back("thresholds.retrieve_k: must lie in [1, 1000]");
  if (t.actor_fallback > 100000) issues.push_back("thresholds.actor_fallback: must lie in [0, 100000]");
  if (c.mining_enabled && c.years.empty()) issues.push_back("years: must not be empty when mining is enabled");
  for (int y : c.years) {
    if (y < 1900 || y > 2200) issues.push_back("years: " + std::to_string(y) + " is out of range");
  }
  if (c.llm.parallelism < 1 || c.llm.parallelism > 64) issues.push_back("llm.parallelism: must lie in [1, 64]");
  if (c.llm.max_attempts < 1 || c.llm.max_attempts > 10) issues.push_back("llm.max_attempts: must lie in [1, 10]");
  if (c.llm.mode != llm::LlmMode::live && c.llm.archive.empty()) issues.push_back("llm.archive: required in record and replay modes");
  if (c.embedding.provider != "feature-hash" && c.embedding.provider != "http") {
    issues.push_back("embedding.provider: must be feature-hash or http");
  }
  if (c.embedding.dimension < 1 || c.embedding.dimension > 65536) issues.push_back("embedding.dimension: must lie in [1, 65536]");
  if (c.snapshot_path.empty()) issues.push_back("snapshot_path: required");
  if (c.min_segment_length < 1) issues.push_back("min_segment_length: must be at least 1");
  if (c.service.port < 0 || c.service.port > 65535) issues.push_back("service.port: must lie in [0, 65535]");
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

json config_to_json(const ProjectConfig& c, const std::filesystem::path& base) {
  json j;
  j["debate"] = c.debate;
  j["actors_path"] = relative_to(c.actors_path, base);
  j["thresholds"] = {{"actor_fallback", c.thresholds.actor_fallback},
                     {"topic_link_t", c.thresholds.topic_link_t},
                     {"mmr_lambda", c.thresholds.mmr_lambda},
                     {"retrieve_k", c.thresholds.retrieve_k}};
  j["chunking"] = std::string(topics::to_string(c.chunking));
  j["years"] = c.years;
  j["mining_enabled"] = c.mining_enabled;
  j["llm"] = {{"mode", std::string(llm::to_string(c.llm.mode))},
              {"archive", relative_to(c.llm.archive, base)},
              {"parallelism", c.llm.parallelism},
              {"max_attempts", c.llm.max_attempts}};
  j["embedding"] = {{"provider", c.embedding.provider}, {"dimension", c.embedding.dimension}, {"model", c.embedding.model}};
  j["template_dir"] = relative_to(c.template_dir, base);
  j["snapshot_path"] = relative_to(c.snapshot_path, base);
  j["report_path"] = relative_to(c.report_path, base);
  j["arguments_path"] = relative_to(c.arguments_path, base);
  j["map_path"] = relative_to(c.map_path, base);
  j["thesaurus_path"] = relative_to(c.thesaurus_path, base);
  j["output_language"] = c.output_language;
  j["min_segment_length"] = c.min_segment_length;
  j["max_context_chars"] = c.max_context_chars ? json(*c.max_context_chars) : json(nullptr);
  j["cluster_seed"] = c.cluster_seed;
  j["service"] = {{"host", c.service.host}, {"port", c.service.port}};
  return j;
}

ProjectConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("config '" + path.string() + "' not found (run `stancegraph init`)");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("<root>: not valid JSON: ") + e.what()});
  }
  return config_from_json(j, std::filesystem::absolute(path).parent_path());
}

ProjectConfig default_config(const std::filesystem::path& dir) {
  ProjectConfig c;
  c.debate.id = "my-debate";
  c.debate.name = "My Debate";
  c.debate.long_description = "Describe the project and the controversy around it.";
  c.debate.energy_type = "hydrogen";
  c.debate.scope = "Describe the geographic and thematic scope.";
  c.debate.languages = {"English"};
  c.debate = normalized(c.debate);
  c.actors_path = dir / "actors.json";
  c.years = {2023};
  c.llm.archive = dir / "llm_archive.jsonl";
  c.template_dir = STANCEGRAPH_TEMPLATE_DIR;
  c.snapshot_path = dir / "state" / "snapshot.jsonl";
  c.report_path = dir / "state" / "pipeline_report.jsonl";
  c.arguments_path = dir / "state" / "arguments.json";
  c.map_path = dir / "state" / "map.json";
  c.thesaurus_path = dir / "state" / "thesaurus.xml";
  return c;
}

std::vector<Actor> load_actors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("actor list '" + path.string() + "' not found");
  try {
    const json j = json::parse(in);
    std::vector<Actor> actors;
    for (const auto& a : j) actors.push_back(normalized(a.get<Actor>()));
    return actors;
  } catch (const json::exception& e) {
    throw ValidationError("actor list '" + path.string() + "': " + e.what());
  }
}

}  // namespace stancegraph::app
