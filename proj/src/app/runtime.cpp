#include "stancegraph/app/runtime.hpp"

#include <cstdlib>
#include <fstream>

#include "stancegraph/core/parallel.hpp"
#include "stancegraph/core/snapshot.hpp"
#include "stancegraph/core/text.hpp"

namespace stancegraph::app {
namespace {

DebateGraph initial_graph(const ProjectConfig& config) {
  DebateGraph graph = std::filesystem::exists(config.snapshot_path) ? load_snapshot(config.snapshot_path)
                                                                    : DebateGraph(config.debate);
  if (!(graph.debate() == config.debate)) graph.set_debate(config.debate);
  if (!config.actors_path.empty() && std::filesystem::exists(config.actors_path)) {
    for (auto& actor : load_actors(config.actors_path)) graph.upsert_actor(std::move(actor));
  }
  return graph;
}

}  // namespace

std::shared_ptr<embed::Embedder> make_embedder(const EmbeddingSettings& settings) {
  if (settings.provider == "http") {
    embed::HttpEmbedderOptions o;
    if (const char* v = std::getenv("STANCEGRAPH_EMBED_ENDPOINT")) o.endpoint = v;
    if (const char* v = std::getenv("STANCEGRAPH_EMBED_API_KEY")) o.api_key = v;
    if (!settings.model.empty()) o.model = settings.model;
    o.dimension = settings.dimension;
    if (o.endpoint.empty()) throw ValidationError("STANCEGRAPH_EMBED_ENDPOINT is not set");
    return std::make_shared<embed::HttpEmbedder>(o);
  }
  return std::make_shared<embed::FeatureHashEmbedder>(settings.dimension);
}

std::vector<Document> load_documents(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("document file '" + path.string() + "' not found");
  std::vector<Document> docs;
  try {
    auto add = [&](const json& j) {
      if (!j.is_object()) throw ValidationError(path.string() + ": document records must be objects");
      docs.push_back(j.get<Document>());
    };
    if (path.extension() == ".jsonl") {
      std::string line;
      while (std::getline(in, line)) {
        if (!text::trim(line).empty()) add(json::parse(line));
      }
      return docs;
    }
    const json j = json::parse(in);
    if (j.is_array()) {
      for (const auto& d : j) add(d);
    } else if (j.contains("documents")) {
      for (const auto& d : j.at("documents")) add(d);
    } else {
      add(j);
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return docs;
}

std::size_t IngestSummary::parse_failures() const {
  std::size_t n = 0;
  for (const auto& r : results) n += r.parse_failed ? 1 : 0;
  return n;
}

Runtime::Runtime(ProjectConfig config, RuntimeOptions options)
    : config_(std::move(config)),
      mode_(options.mode.value_or(config_.llm.mode)),
      provider_(std::move(options.provider)),
      embedder_(options.embedder ? std::move(options.embedder) : make_embedder(config_.embedding)),
      store_(initial_graph(config_)) {}

llm::LlmGateway& Runtime::gateway() {
  std::lock_guard lock(gateway_mutex_);
  if (!gateway_) {
    llm::GatewayOptions options;
    options.mode = mode_;
    options.parallelism = config_.llm.parallelism;
    options.max_attempts = config_.llm.max_attempts;
    std::shared_ptr<llm::ReplayArchive> archive;
    if (mode_ != llm::LlmMode::live) {
      if (config_.llm.archive.empty()) throw ValidationError("llm.archive is required in record and replay modes");
      if (mode_ == llm::LlmMode::replay && !std::filesystem::exists(config_.llm.archive)) {
        throw NotFoundError("replay archive '" + config_.llm.archive.string() + "' not found");
      }
      archive = llm::ReplayArchive::open(config_.llm.archive);
    }
    auto provider = provider_;
    if (!provider && mode_ != llm::LlmMode::replay) {
      provider = std::make_shared<llm::OpenAiProvider>(llm::provider_options_from_env());
    }
    gateway_ = std::make_unique<llm::LlmGateway>(options, llm::TemplateLibrary::load(config_.template_dir), provider,
                                                 archive);
  }
  return *gateway_;
}

void Runtime::save() const { save_snapshot(*store_.snapshot(), config_.snapshot_path); }

std::string Runtime::now() const { return mode_ == llm::LlmMode::replay ? kReplayTimestamp : mining::utc_now(); }

ingest::IngestOptions Runtime::ingest_options() const {
  return {config_.output_language, config_.min_segment_length};
}

mining::MiningSettings Runtime::mining_settings() const {
  mining::MiningSettings s;
  s.k = config_.thresholds.retrieve_k;
  s.lambda = config_.thresholds.mmr_lambda;
  s.actor_fallback = config_.thresholds.actor_fallback;
  s.max_context_chars = config_.max_context_chars;
  s.parallelism = config_.llm.parallelism;
  s.clock = [this] { return now(); };
  return s;
}

IngestSummary Runtime::ingest_documents(std::vector<Document> documents) {
  auto snapshot = store_.snapshot();
  for (const auto& d : documents) {
    if (text::trim(d.content).empty()) throw ValidationError("document '" + d.title + "' has no content");
    if (!d.date) throw ValidationError("document '" + d.title + "' has no date");
  }
  auto& gw = gateway();
  const auto options = ingest_options();
  auto prepared = parallel_map(documents.size(), config_.llm.parallelism, [&](std::size_t i) {
    return ingest::prepare_document(*snapshot, documents[i], gw, *embedder_, options);
  });
  IngestSummary summary;
  const ingest::AcceptAllVerifier verifier;
  store_.write([&](DebateGraph& g) {
    for (auto& p : prepared) summary.results.push_back(ingest::apply_prepared(g, std::move(p), verifier));
  });
  return summary;
}

topics::ThesaurusBuild Runtime::build_thesaurus() {
  auto snapshot = store_.snapshot();
  topics::ThesaurusBuildOptions options;
  options.strategy = config_.chunking;
  options.rag = {config_.thresholds.retrieve_k, config_.thresholds.mmr_lambda};
  options.seed = config_.cluster_seed;
  options.parallelism = config_.llm.parallelism;
  auto build = topics::build_thesaurus(*snapshot, gateway(), *embedder_, options);
  auto rows = topics::to_topics(build.thesaurus, *embedder_);
  store_.write([&](DebateGraph& g) { g.set_topics(std::move(rows)); });
  if (!config_.thesaurus_path.empty()) topics::save_thesaurus(build.thesaurus, config_.thesaurus_path);
  return build;
}

topics::Thesaurus Runtime::import_thesaurus(const std::filesystem::path& path) {
  auto thesaurus = topics::load_thesaurus(path);
  auto rows = topics::to_topics(thesaurus, *embedder_);
  store_.write([&](DebateGraph& g) { g.set_topics(std::move(rows)); });
  return thesaurus;
}

std::size_t Runtime::link_topics() {
  auto links = topics::link_topics(*store_.snapshot(), config_.thresholds.topic_link_t);
  const std::size_t n = links.size();
  store_.write([&](DebateGraph& g) { g.set_topic_links(std::move(links)); });
  return n;
}

std::vector<QuerySpec> Runtime::plan() const {
  auto snapshot = store_.snapshot();
  std::vector<Actor> actors;
  for (const auto& [id, a] : snapshot->actors()) actors.push_back(a);
  std::vector<Topic> topic_rows;
  for (const auto& [id, t] : snapshot->topics()) topic_rows.push_back(t);
  return mining::plan_queries(snapshot->debate(), actors, topic_rows, config_.years);
}

MineSummary Runtime::mine(bool force) {
  auto lease = store_.acquire_exclusive();
  return mine(lease, force);
}

MineSummary Runtime::mine(GraphStore::ExclusiveLease& lease, bool force) {
  MineSummary summary;
  summary.specs = plan();
  auto& gw = gateway();
  summary.run = mining::run_mining(lease, store_.snapshot(), summary.specs, gw, *embedder_, mining_settings(), force,
                                   [this](std::size_t done, std::size_t total) { update_progress(done, total); });
  return summary;
}

void Runtime::write_mining_outputs(const mining::MiningRun& run) const {
  if (!config_.report_path.empty()) mining::write_report(run.reports, config_.report_path);
  if (!config_.arguments_path.empty()) {
    if (config_.arguments_path.has_parent_path()) std::filesystem::create_directories(config_.arguments_path.parent_path());
    std::ofstream out(config_.arguments_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + config_.arguments_path.string() + "'");
    out << mining::export_arguments(*store_.snapshot()).dump(2) << '\n';
  }
}

network::InfluenceGraph Runtime::map() const { return network::build_graph(*store_.snapshot()); }

PipelineStatus Runtime::status() const {
  std::lock_guard lock(status_mutex_);
  return status_;
}

void Runtime::set_status(PipelineStatus status) {
  std::lock_guard lock(status_mutex_);
  status_ = std::move(status);
}

void Runtime::update_progress(std::size_t done, std::size_t total) {
  std::lock_guard lock(status_mutex_);
  status_.done = done;
  status_.total = total;
}

}  // namespace stancegraph::app
