#include "stancegraph/app/service.hpp"

#include <httplib.h>

#include <charconv>
#include <cstdlib>
#include <functional>
#include <regex>
#include <set>
#include <thread>

#include "stancegraph/embed/index.hpp"
#include "stancegraph/network/network.hpp"

namespace stancegraph::app {
namespace {

constexpr std::size_t kDefaultSearchLimit = 20;
constexpr std::size_t kMaxSearchLimit = 200;

class UnauthorizedError : public Error {
 public:
  using Error::Error;
};

std::string str(std::string_view v) { return std::string(v); }

ApiResponse error_response(int status, std::string_view kind, const std::string& message) {
  return {status, json{{"error", {{"kind", kind}, {"message", message}}}}};
}

std::optional<std::string> param(const ApiRequest& req, const std::string& name) {
  auto it = req.query.find(name);
  if (it == req.query.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

long parse_int(const std::string& name, const std::string& value) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ValidationError("parameter '" + name + "' must be an integer, got '" + value + "'");
  }
  return v;
}

json parse_body(const ApiRequest& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception&) {
    throw ValidationError("request body is not valid JSON");
  }
}

json feedback_counts(const Argument& a) {
  std::size_t relevant = 0;
  for (const auto& f : a.feedback) relevant += f.relevant ? 1 : 0;
  return {{"votes", a.feedback.size()}, {"relevant", relevant}};
}

/// Public view of an argument; never carries prompts or raw completions.
json argument_summary(const DebateGraph& g, const Argument& a) {
  json j{{"id", a.id.value},
         {"text", a.text},
         {"stance", str(to_string(a.stance))},
         {"verdict", str(to_string(a.judge_verdict))},
         {"quality", is_good(a.judge_verdict) ? "GOOD" : "BAD"},
         {"judge_comment", a.judge_comment},
         {"created_at", a.created_at},
         {"query_spec_id", a.query_spec_id.value},
         {"source_paragraph_ids", a.source_paragraph_ids},
         {"source_count", a.source_paragraph_ids.size()},
         {"feedback", feedback_counts(a)}};
  auto it = g.query_specs().find(a.query_spec_id);
  if (it != g.query_specs().end()) {
    const QuerySpec& s = it->second;
    j["family"] = str(to_string(s.family));
    j["question"] = s.question;
    j["year"] = s.year ? json(*s.year) : json(nullptr);
    j["actor_id"] = s.actor_id ? json(s.actor_id->value) : json(nullptr);
    j["topic_id"] = s.topic_id ? json(s.topic_id->value) : json(nullptr);
  }
  return j;
}

json document_meta(const Document& d) {
  return {{"id", d.id.value},
          {"title", d.title},
          {"editor", d.editor},
          {"date", d.date ? json(d.date->to_string()) : json(nullptr)},
          {"source_kind", str(to_string(d.source_kind))},
          {"actor_id", d.actor_id ? json(d.actor_id->value) : json(nullptr)}};
}

json paragraph_view(const DebateGraph& g, const Paragraph& p) {
  json j{{"id", p.id.value},
         {"text", p.text},
         {"speaker_name", p.speaker_name},
         {"speaker_function", p.speaker_function},
         {"date", p.date.to_string()},
         {"mentions_debate", p.mentions_debate}};
  if (const Document* d = g.find_document(p.document_id)) j["document"] = document_meta(*d);
  return j;
}

const Argument& served_argument(const DebateGraph& g, const std::string& id) {
  const Argument* a = g.find_argument(ArgumentId(id));
  if (!a || a->judge_verdict == Verdict::INVALID) throw NotFoundError("argument '" + id + "' not found");
  return *a;
}

std::map<std::string, std::size_t> relation_counts(const DebateGraph& g, const ActorId& id) {
  std::map<std::string, std::size_t> counts{{"is_author", 0}, {"is_mentioned_in_text", 0}, {"intervention", 0}};
  for (const auto& e : g.relations_of(id)) ++counts[str(to_string(e.kind))];
  return counts;
}

}  // namespace

struct Service::Impl {
  using Handler = std::function<ApiResponse(const ApiRequest&, const std::smatch&)>;
  struct Route {
    std::string method;
    std::regex pattern;
    Handler handler;
  };

  Runtime& rt;
  ServiceOptions options;
  std::vector<Route> routes;
  httplib::Server server;
  std::mutex save_mutex;
  std::mutex pipeline_mutex;
  std::thread pipeline;

  Impl(Runtime& runtime, ServiceOptions opts) : rt(runtime), options(std::move(opts)) {
    add("GET", "/api/status", [this](auto&, auto&) { return status(); });
    add("GET", "/api/arguments", [this](auto& r, auto&) { return list_arguments(r); });
    add("POST", "/api/arguments/(.+)/feedback", [this](auto& r, auto& m) { return post_feedback(r, m[1].str()); });
    add("GET", "/api/arguments/(.+)", [this](auto&, auto& m) { return get_argument(m[1].str()); });
    add("GET", "/api/feedback/summary", [this](auto&, auto&) { return feedback_summary(); });
    add("GET", "/api/actors", [this](auto&, auto&) { return list_actors(); });
    add("GET", "/api/actors/(.+)", [this](auto&, auto& m) { return get_actor(m[1].str()); });
    add("GET", "/api/topics", [this](auto&, auto&) { return list_topics(); });
    add("GET", "/api/map", [this](auto&, auto&) { return ApiResponse{200, network::graph_to_json(rt.map())}; });
    add("GET", "/api/search", [this](auto& r, auto&) { return search(r); });
    add("POST", "/api/documents", [this](auto& r, auto&) { return post_documents(r); });
    add("POST", "/api/pipeline/mine", [this](auto& r, auto&) { return start_mining(r); });
  }

  ~Impl() {
    server.stop();
    join_pipeline();
  }

  void add(std::string method, const std::string& pattern, Handler h) {
    routes.push_back({std::move(method), std::regex("^" + pattern + "$"), std::move(h)});
  }

  void join_pipeline() {
    std::lock_guard lock(pipeline_mutex);
    if (pipeline.joinable()) pipeline.join();
  }

  void persist() {
    if (!options.persist) return;
    std::lock_guard lock(save_mutex);
    rt.save();
  }

  ApiResponse dispatch(const ApiRequest& req) {
    try {
      if (!options.api_token.empty()) {
        auto it = req.headers.find("x-api-token");
        if (it == req.headers.end() || it->second != options.api_token) {
          throw UnauthorizedError("missing or invalid X-Api-Token");
        }
      }
      bool path_known = false;
      for (const auto& route : routes) {
        std::smatch m;
        if (!std::regex_match(req.path, m, route.pattern)) continue;
        path_known = true;
        if (route.method == req.method) return route.handler(req, m);
      }
      if (path_known) return error_response(405, "method_not_allowed", req.method + " " + req.path);
      return error_response(404, "not_found", "no endpoint " + req.path);
    } catch (const UnauthorizedError& e) {
      return error_response(401, "unauthorized", e.what());
    } catch (const ValidationError& e) {
      return error_response(400, "validation", e.what());
    } catch (const NotFoundError& e) {
      return error_response(404, "not_found", e.what());
    } catch (const BusyError& e) {
      return error_response(409, "busy", e.what());
    } catch (const TransportError& e) {
      return error_response(502, "transport", e.what());
    } catch (const llm::ReplayMissError& e) {
      return error_response(503, "replay_miss", e.what());
    } catch (const std::exception& e) {
      return error_response(500, "internal", e.what());
    }
  }

  ApiResponse status() {
    auto g = rt.store().snapshot();
    std::size_t served = 0;
    for (const auto& [id, a] : g->arguments()) served += a.judge_verdict != Verdict::INVALID ? 1 : 0;
    const PipelineStatus p = rt.status();
    json snapshot{{"documents", g->documents().size()},
                  {"paragraphs", g->paragraphs().size()},
                  {"actors", g->actors().size()},
                  {"topics", g->topics().size()},
                  {"relations", g->relations().size()},
                  {"topic_links", g->topic_link_count()},
                  {"query_reports", g->query_reports().size()},
                  {"arguments", served}};
    json pipeline{{"running", p.running},
                  {"kind", p.kind},
                  {"done", p.done},
                  {"total", p.total},
                  {"last_error", p.last_error},
                  {"last_summary", p.last_summary}};
    return {200, json{{"debate", {{"id", g->debate().id}, {"name", g->debate().name}}},
                      {"llm_mode", str(llm::to_string(rt.mode()))},
                      {"busy", rt.store().busy()},
                      {"snapshot", snapshot},
                      {"pipeline", pipeline}}};
  }

  ApiResponse list_arguments(const ApiRequest& req) {
    std::optional<Stance> stance;
    std::optional<QueryFamily> family;
    std::optional<int> year;
    std::optional<Verdict> verdict;
    if (auto v = param(req, "stance")) stance = parse_stance(*v);
    if (auto v = param(req, "family")) family = parse_query_family(*v);
    if (auto v = param(req, "year")) year = static_cast<int>(parse_int("year", *v));
    const auto actor = param(req, "actor");
    const auto topic = param(req, "topic");
    if (auto v = param(req, "quality")) {
      if (*v == "WEAK" || *v == "STRONG") {
        verdict = parse_verdict(*v);
      } else if (*v != "GOOD") {
        throw ValidationError("quality must be GOOD, WEAK or STRONG, got '" + *v + "'");
      }
    }
    std::size_t offset = 0;
    std::optional<std::size_t> limit;
    if (auto v = param(req, "offset")) offset = static_cast<std::size_t>(std::max(0L, parse_int("offset", *v)));
    if (auto v = param(req, "limit")) limit = static_cast<std::size_t>(std::max(0L, parse_int("limit", *v)));

    auto g = rt.store().snapshot();
    json items = json::array();
    std::size_t total = 0;
    for (const auto& [id, a] : g->arguments()) {
      if (a.judge_verdict == Verdict::INVALID) continue;
      if (stance && a.stance != *stance) continue;
      if (verdict && a.judge_verdict != *verdict) continue;
      auto it = g->query_specs().find(a.query_spec_id);
      const QuerySpec* spec = it == g->query_specs().end() ? nullptr : &it->second;
      if ((family || year || actor || topic) && !spec) continue;
      if (family && spec->family != *family) continue;
      if (year && spec->year != *year) continue;
      if (actor && (!spec->actor_id || spec->actor_id->value != *actor)) continue;
      if (topic && (!spec->topic_id || spec->topic_id->value != *topic)) continue;
      if (total++ < offset) continue;
      if (limit && items.size() >= *limit) continue;
      items.push_back(argument_summary(*g, a));
    }
    return {200, json{{"total", total}, {"items", items}}};
  }

  ApiResponse get_argument(const std::string& id) {
    auto g = rt.store().snapshot();
    const Argument& a = served_argument(*g, id);
    json j = argument_summary(*g, a);
    json sources = json::array();
    bool stale = false;
    for (const auto& pid : a.source_paragraph_ids) {
      const Paragraph* p = g->find_paragraph(pid);
      if (!p) {
        stale = true;
        sources.push_back({{"id", pid.value}, {"stale", true}});
        continue;
      }
      json s = paragraph_view(*g, *p);
      s["stale"] = false;
      sources.push_back(std::move(s));
    }
    j["sources"] = std::move(sources);
    j["stale"] = stale;
    return {200, j};
  }

  ApiResponse post_feedback(const ApiRequest& req, const std::string& id) {
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("relevant") || !body["relevant"].is_boolean()) {
      throw ValidationError("feedback body needs a boolean 'relevant'");
    }
    Feedback f;
    f.relevant = body["relevant"].get<bool>();
    if (body.contains("user")) {
      if (!body["user"].is_string()) throw ValidationError("'user' must be a string");
      f.user = body["user"].get<std::string>();
    }
    served_argument(*rt.store().snapshot(), id);
    json counts = rt.store().write([&](DebateGraph& g) {
      served_argument(g, id);
      g.add_feedback(ArgumentId(id), f);
      return feedback_counts(*g.find_argument(ArgumentId(id)));
    });
    persist();
    counts["argument_id"] = id;
    return {201, counts};
  }

  ApiResponse feedback_summary() {
    auto g = rt.store().snapshot();
    std::size_t votes = 0;
    std::size_t relevant = 0;
    for (const auto& [id, a] : g->arguments()) {
      for (const auto& f : a.feedback) {
        ++votes;
        relevant += f.relevant ? 1 : 0;
      }
    }
    json fraction = votes == 0 ? json(nullptr) : json(static_cast<double>(relevant) / static_cast<double>(votes));
    return {200, json{{"votes", votes}, {"relevant", relevant}, {"fraction", fraction}}};
  }

  ApiResponse list_actors() {
    auto g = rt.store().snapshot();
    json items = json::array();
    for (const auto& [id, a] : g->actors()) {
      items.push_back({{"id", id.value},
                       {"canonical_name", a.canonical_name},
                       {"function", a.function},
                       {"stance", str(to_string(network::aggregate_actor_stance(*g, id)))},
                       {"relations", relation_counts(*g, id)}});
    }
    return {200, json{{"items", items}}};
  }

  ApiResponse get_actor(const std::string& id) {
    auto g = rt.store().snapshot();
    const Actor* actor = g->find_actor(ActorId(id));
    if (!actor) throw NotFoundError("actor '" + id + "' not found");
    json arguments = json::array();
    for (const auto& [aid, a] : g->arguments()) {
      if (a.judge_verdict == Verdict::INVALID) continue;
      auto it = g->query_specs().find(a.query_spec_id);
      if (it == g->query_specs().end() || it->second.actor_id != actor->id) continue;
      arguments.push_back(argument_summary(*g, a));
    }
    const auto map = network::build_graph(*g);
    std::map<std::string, json> connected;
    for (const auto& e : map.edges) {
      if (e.from == actor->id) {
        auto& c = connected[e.to.value];
        c["actor_id"] = e.to.value;
        c["outgoing"] = e.weight;
      } else if (e.to == actor->id) {
        auto& c = connected[e.from.value];
        c["actor_id"] = e.from.value;
        c["incoming"] = e.weight;
      }
    }
    json conn = json::array();
    for (auto& [cid, c] : connected) {
      if (!c.contains("outgoing")) c["outgoing"] = 0;
      if (!c.contains("incoming")) c["incoming"] = 0;
      if (const Actor* other = g->find_actor(ActorId(cid))) c["canonical_name"] = other->canonical_name;
      conn.push_back(std::move(c));
    }
    json profile{{"id", actor->id.value},
                 {"canonical_name", actor->canonical_name},
                 {"aliases", actor->aliases},
                 {"function", actor->function},
                 {"stance", str(to_string(network::aggregate_actor_stance(*g, actor->id)))}};
    return {200, json{{"profile", profile},
                      {"relations", relation_counts(*g, actor->id)},
                      {"arguments", arguments},
                      {"connected_actors", conn}}};
  }

  ApiResponse list_topics() {
    auto g = rt.store().snapshot();
    std::map<TopicId, std::size_t> linked;
    for (const auto& [pid, row] : g->topic_links()) {
      for (const auto& l : row) ++linked[l.topic_id];
    }
    json items = json::array();
    for (const auto& [id, t] : g->topics()) {
      items.push_back({{"id", id.value},
                       {"name", t.name},
                       {"description", t.description},
                       {"subtopics", t.subtopics},
                       {"linked_paragraphs", linked[id]}});
    }
    return {200, json{{"items", items}}};
  }

  ApiResponse search(const ApiRequest& req) {
    const auto q = param(req, "q");
    if (!q) throw ValidationError("parameter 'q' is required");
    const std::string mode = param(req, "mode").value_or("fulltext");
    if (mode != "fulltext" && mode != "semantic") throw ValidationError("mode must be fulltext or semantic");
    std::optional<Date> from;
    std::optional<Date> to;
    if (auto v = param(req, "from")) from = Date::parse(*v);
    if (auto v = param(req, "to")) to = Date::parse(*v);
    std::size_t limit = kDefaultSearchLimit;
    if (auto v = param(req, "limit")) {
      const long n = parse_int("limit", *v);
      if (n < 1 || n > static_cast<long>(kMaxSearchLimit)) {
        throw ValidationError("limit must lie in [1, " + std::to_string(kMaxSearchLimit) + "]");
      }
      limit = static_cast<std::size_t>(n);
    }
    auto g = rt.store().snapshot();
    auto in_range = [&](const Paragraph& p) { return (!from || p.date >= *from) && (!to || p.date <= *to); };
    std::vector<embed::ScoredHit> hits;
    if (mode == "fulltext") {
      hits = embed::fulltext_search(*g, *q, limit, in_range);
    } else {
      const auto index = embed::VectorIndex::from_graph(*g);
      const Embedding query = rt.embedder().embed(*q);
      hits = index.search(query, [&](const ParagraphId& id) { return in_range(*g->find_paragraph(id)); }, limit);
    }
    json items = json::array();
    for (const auto& h : hits) {
      json j = paragraph_view(*g, *g->find_paragraph(h.paragraph_id));
      j["score"] = h.score;
      items.push_back(std::move(j));
    }
    return {200, json{{"mode", mode}, {"items", items}}};
  }

  ApiResponse post_documents(const ApiRequest& req) {
    const json body = parse_body(req);
    std::vector<Document> docs;
    try {
      if (body.is_array()) {
        for (const auto& d : body) docs.push_back(d.get<Document>());
      } else if (body.is_object() && body.contains("documents")) {
        for (const auto& d : body.at("documents")) docs.push_back(d.get<Document>());
      } else if (body.is_object()) {
        docs.push_back(body.get<Document>());
      } else {
        throw ValidationError("expected a document object or a list of documents");
      }
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed document: ") + e.what());
    }
    if (docs.empty()) throw ValidationError("no documents given");
    if (rt.store().busy()) throw BusyError("a pipeline run holds the writer");
    auto summary = rt.ingest_documents(std::move(docs));
    persist();
    json results = json::array();
    for (const auto& r : summary.results) {
      results.push_back({{"document_id", r.document_id.value},
                         {"paragraphs", r.paragraphs},
                         {"relations", r.relations},
                         {"parse_failed", r.parse_failed},
                         {"unchanged", r.unchanged}});
    }
    return {201, json{{"results", results}}};
  }

  ApiResponse start_mining(const ApiRequest& req) {
    bool force = false;
    if (!req.body.empty()) {
      const json body = parse_body(req);
      if (body.contains("force")) {
        if (!body["force"].is_boolean()) throw ValidationError("'force' must be a boolean");
        force = body["force"].get<bool>();
      }
    }
    std::lock_guard lock(pipeline_mutex);
    auto lease = rt.store().acquire_exclusive();
    if (pipeline.joinable()) pipeline.join();
    const std::size_t total = rt.plan().size();
    rt.set_status({true, "mine", 0, total, "", ""});
    pipeline = std::thread([this, force, lease = std::move(lease)]() mutable {
      PipelineStatus done{false, "mine", 0, 0, "", ""};
      try {
        auto result = rt.mine(lease, force);
        rt.write_mining_outputs(result.run);
        done.done = done.total = result.specs.size();
        done.last_summary = std::to_string(result.run.kept) + " kept, " + std::to_string(result.run.suppressed) +
                            " suppressed, " + std::to_string(result.run.skipped) + " skipped";
      } catch (const std::exception& e) {
        done.last_error = e.what();
      }
      {
        // Release the writer before saving so readers see the final state.
        auto released = std::move(lease);
      }
      try {
        persist();
      } catch (const std::exception& e) {
        done.last_error = e.what();
      }
      rt.set_status(std::move(done));
    });
    return {202, json{{"status", "started"}, {"specs", total}}};
  }
};

Service::Service(Runtime& runtime, ServiceOptions options)
    : impl_(std::make_unique<Impl>(runtime, std::move(options))) {
  impl_->server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(json{{"error", {{"kind", "http"}, {"message", "HTTP " + std::to_string(res.status)}}}}.dump(),
                      "application/json");
    }
  });
  auto serve = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    for (const auto& [k, v] : req.headers) {
      std::string key = k;
      for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      r.headers[key] = v;
    }
    r.body = req.body;
    ApiResponse out = impl_->dispatch(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  impl_->server.Get(".*", serve);
  impl_->server.Post(".*", serve);
}

Service::~Service() = default;

ApiResponse Service::handle(const ApiRequest& request) { return impl_->dispatch(request); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server.bind_to_any_port(host);
    if (p < 0) throw Error("cannot bind " + host);
    return p;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

void Service::wait_for_pipeline() { impl_->join_pipeline(); }

ServiceOptions service_options_from_env() {
  ServiceOptions o;
  if (const char* v = std::getenv("STANCEGRAPH_API_TOKEN")) o.api_token = v;
  return o;
}

}  // namespace stancegraph::app
