#include "stancegraph/mining/mining.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <regex>
#include <set>

#include "stancegraph/core/parallel.hpp"
#include "stancegraph/core/text.hpp"
#include "stancegraph/llm/debate_vars.hpp"

namespace stancegraph::mining {
namespace {

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

std::string upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string spec_prefix(const QuerySpec& spec) { return "spec '" + spec.id.value + "': "; }

std::optional<Verdict> verdict_from_label(std::string_view label) {
  const std::string l = text::casefold(label);
  if (l.find("invalid") != std::string::npos) return Verdict::INVALID;
  if (l.find("weak") != std::string::npos) return Verdict::WEAK;
  if (l.find("strong") != std::string::npos) return Verdict::STRONG;
  return std::nullopt;
}

}  // namespace

std::string global_question(const Debate& debate, Stance target) {
  if (target == Stance::PRO) return "What are all the arguments in favor of " + debate.name + "?";
  if (target == Stance::CON) return "What are all the arguments against " + debate.name + "?";
  throw ValidationError("global questions need a PRO or CON target");
}

std::string actor_question(const Debate& debate, const Actor& actor) {
  return "What are the arguments of the stakeholder " + actor.canonical_name + " about " + debate.name + "?";
}

std::string topic_question(const Topic& topic) { return "What are the arguments related to the topic " + topic.name + "?"; }

std::vector<QuerySpec> plan_queries(const Debate& debate, const std::vector<Actor>& actors,
                                    const std::vector<Topic>& topics, std::vector<int> years) {
  if (years.empty()) throw ValidationError("query planning needs at least one year");
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());

  std::vector<QuerySpec> specs;
  for (int year : years) {
    for (Stance target : {Stance::PRO, Stance::CON}) {
      QuerySpec s;
      s.id = QuerySpecId("global/" + std::to_string(year) + "/" + std::string(to_string(target)));
      s.family = QueryFamily::global;
      s.year = year;
      s.stance_target = target;
      s.question = global_question(debate, target);
      specs.push_back(std::move(s));
    }
  }
  std::map<ActorId, const Actor*> unique_actors;
  for (const auto& a : actors) unique_actors.emplace(a.id, &a);
  for (const auto& [id, actor] : unique_actors) {
    QuerySpec s;
    s.id = QuerySpecId("actor/" + id.value);
    s.family = QueryFamily::actor;
    s.actor_id = id;
    s.question = actor_question(debate, *actor);
    specs.push_back(std::move(s));
  }
  std::map<TopicId, const Topic*> unique_topics;
  for (const auto& t : topics) unique_topics.emplace(t.id, &t);
  for (const auto& [id, topic] : unique_topics) {
    for (int year : years) {
      QuerySpec s;
      s.id = QuerySpecId("topic/" + id.value + "/" + std::to_string(year));
      s.family = QueryFamily::topic;
      s.topic_id = id;
      s.year = year;
      s.question = topic_question(*topic);
      specs.push_back(std::move(s));
    }
  }
  return specs;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Retrieval retrieve(const DebateGraph& graph, const QuerySpec& spec, embed::Embedder& embedder,
                   const MiningSettings& settings) {
  std::vector<const Paragraph*> candidates;
  Retrieval r;
  switch (spec.family) {
    case QueryFamily::global:
      candidates = graph.select_paragraphs_global(*spec.year);
      break;
    case QueryFamily::actor: {
      auto selection = graph.select_paragraphs_actor(*spec.actor_id, settings.actor_fallback);
      candidates = std::move(selection.paragraphs);
      r.tier = selection.tier;
      break;
    }
    case QueryFamily::topic:
      candidates = graph.select_paragraphs_topic(*spec.topic_id, *spec.year);
      break;
  }
  std::vector<embed::MmrCandidate> pool;
  for (const Paragraph* p : candidates) {
    if (p->embedding) pool.push_back({p->id, *p->embedding});
  }
  r.candidate_count = static_cast<int>(pool.size());
  if (pool.empty()) return r;
  const Embedding query = embedder.embed(spec.question);
  r.context_ids = embed::mmr_select(query, pool, settings.k, settings.lambda);
  if (settings.max_context_chars) {
    while (r.context_ids.size() > 1 && render_context(graph, r.context_ids).size() > *settings.max_context_chars) {
      r.context_ids.pop_back();
      r.truncated = true;
    }
  }
  return r;
}

std::string render_context(const DebateGraph& graph, const std::vector<ParagraphId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Paragraph* p = graph.find_paragraph(ids[i]);
    if (!p) throw NotFoundError("unknown paragraph '" + ids[i].value + "'");
    if (i) out += '\n';
    out += "id-" + std::to_string(i + 1) + ": " + p->text;
  }
  return out;
}

bool is_dont_know(std::string_view s) {
  auto t = text::casefold(text::trim(s));
  while (!t.empty() && (t.back() == '.' || t.back() == '"' || t.back() == '\'')) t.pop_back();
  while (!t.empty() && (t.front() == '"' || t.front() == '\'')) t.erase(t.begin());
  return t == "i don't know" || t == "i don\xe2\x80\x99t know";
}

ParsedArguments parse_arguments(std::string_view response) {
  ParsedArguments out;
  if (is_dont_know(response)) return out;
  static const std::regex citation(R"(\(\s*id-(\d+)(\s*,\s*id-\d+)*\s*\)[\s.]*$)", std::regex::icase);
  static const std::regex token(R"(id-(\d+))", std::regex::icase);
  for (const auto& raw : text::split(response, '\n')) {
    std::string line = strip_list_marker(raw);
    if (line.empty()) continue;
    if (is_dont_know(line)) continue;
    std::smatch m;
    if (!std::regex_search(line, m, citation)) {
      ++out.dropped;
      continue;
    }
    RawArgumentLine arg;
    arg.text = text::trim(line.substr(0, static_cast<std::size_t>(m.position(0))));
    const std::string group = m.str(0);
    for (auto it = std::sregex_iterator(group.begin(), group.end(), token); it != std::sregex_iterator(); ++it) {
      arg.sources.push_back(std::stoi((*it)[1].str()));
    }
    if (arg.text.empty()) {
      ++out.dropped;
      continue;
    }
    out.lines.push_back(std::move(arg));
  }
  return out;
}

std::optional<Judgement> parse_verdict(std::string_view response) {
  const auto open = response.find('{');
  const auto close = response.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    const json obj = json::parse(response.substr(open, close - open + 1), nullptr, false);
    if (obj.is_object() && obj.contains("quality_argument") && obj["quality_argument"].is_string()) {
      if (auto v = verdict_from_label(obj["quality_argument"].get<std::string>())) {
        Judgement j{*v, ""};
        if (obj.contains("global_comment") && obj["global_comment"].is_string()) {
          j.comment = obj["global_comment"].get<std::string>();
        }
        return j;
      }
    }
  }
  static const std::regex quality(R"re("?quality_argument"?\s*:\s*"([^"]*)")re");
  static const std::regex comment(R"re("?global_comment"?\s*:\s*"((?:[^"\\]|\\.)*)")re");
  const std::string s(response);
  std::smatch m;
  if (!std::regex_search(s, m, quality)) return std::nullopt;
  auto v = verdict_from_label(m.str(1));
  if (!v) return std::nullopt;
  Judgement j{*v, ""};
  if (std::regex_search(s, m, comment)) j.comment = m.str(1);
  return j;
}

Judgement judge_argument(const Debate& debate, const std::string& argument, const std::vector<std::string>& sources,
                         llm::LlmGateway& gateway) {
  std::string source_text;
  for (std::size_t i = 0; i < sources.size(); ++i) source_text += (i ? "\n\n" : "") + sources[i];
  const llm::Variables vars{{"name", debate.name},
                            {"energy_type", debate.energy_type},
                            {"text", argument},
                            {"source_text", source_text}};
  for (int attempt = 1; attempt <= kJudgeAttempts; ++attempt) {
    llm::DecodingParams params;
    params.attempt = attempt;
    if (auto j = parse_verdict(gateway.run(llm::TemplateName::judge, vars, params))) return *j;
  }
  return {Verdict::INVALID, "verdict unparseable"};
}

Stance map_stance_label(std::string_view response) {
  const std::string label = upper_ascii(text::trim(response));
  if (label == "IN FAVOR") return Stance::PRO;
  if (label == "AGAINST") return Stance::CON;
  if (label == "NEUTRAL") return Stance::NEUTRAL;
  return Stance::UNKNOWN;
}

Stance classify_stance(const DebateGraph& graph, const QuerySpec& spec, const std::string& argument,
                       llm::LlmGateway& gateway) {
  if (is_dont_know(argument)) return Stance::UNKNOWN;
  switch (spec.family) {
    case QueryFamily::global:
      return spec.stance_target.value_or(Stance::UNKNOWN);
    case QueryFamily::actor: {
      const Actor* actor = graph.find_actor(*spec.actor_id);
      if (!actor) throw NotFoundError("unknown actor '" + spec.actor_id->value + "'");
      return map_stance_label(gateway.run(llm::TemplateName::stance_actor, {{"actor_name", actor->canonical_name},
                                                                            {"project_name", graph.debate().name},
                                                                            {"argument", argument}}));
    }
    case QueryFamily::topic: {
      const Topic* topic = graph.find_topic(*spec.topic_id);
      if (!topic) throw NotFoundError("unknown topic '" + spec.topic_id->value + "'");
      return map_stance_label(gateway.run(llm::TemplateName::stance_topic, {{"topic_name", topic->name},
                                                                            {"project_name", graph.debate().name},
                                                                            {"argument", argument}}));
    }
  }
  return Stance::UNKNOWN;
}

QueryOutcome run_query(const DebateGraph& graph, const QuerySpec& spec, llm::LlmGateway& gateway,
                       embed::Embedder& embedder, const MiningSettings& settings) {
  try {
    validate(spec);
    QueryOutcome out;
    out.report.spec_id = spec.id;
    out.report.family = spec.family;
    const Retrieval r = retrieve(graph, spec, embedder, settings);
    out.report.candidate_count = r.candidate_count;
    out.report.tier = r.tier;
    out.report.context_ids = r.context_ids;
    out.report.context_truncated = r.truncated;
    if (r.context_ids.empty()) {
      out.report.status = QueryStatus::empty;
      return out;
    }

    auto vars = llm::debate_variables(graph.debate());
    vars["context"] = render_context(graph, r.context_ids);
    vars["question"] = spec.question;
    auto request = gateway.prepare(llm::TemplateName::argument_extraction, vars);
    request.context_truncated = r.truncated;
    const ParsedArguments parsed = parse_arguments(gateway.complete(request));
    out.report.dropped_lines = parsed.dropped;

    std::set<std::string> seen;
    const std::string created_at = settings.clock ? settings.clock() : utc_now();
    for (const auto& line : parsed.lines) {
      if (!seen.insert(line.text).second) continue;
      std::vector<ParagraphId> sources;
      for (int local : line.sources) {
        if (local < 1 || static_cast<std::size_t>(local) > r.context_ids.size()) continue;
        const ParagraphId& pid = r.context_ids[static_cast<std::size_t>(local - 1)];
        if (std::find(sources.begin(), sources.end(), pid) == sources.end()) sources.push_back(pid);
      }
      if (sources.empty()) {
        ++out.report.dropped_lines;
        continue;
      }
      Argument arg;
      arg.id = ArgumentId(spec.id.value + "#" + std::to_string(out.arguments.size() + 1));
      arg.text = line.text;
      arg.source_paragraph_ids = std::move(sources);
      arg.query_spec_id = spec.id;
      arg.created_at = created_at;
      std::vector<std::string> source_texts;
      for (const auto& pid : arg.source_paragraph_ids) source_texts.push_back(graph.find_paragraph(pid)->text);
      const Judgement j = judge_argument(graph.debate(), arg.text, source_texts, gateway);
      arg.judge_verdict = j.verdict;
      arg.judge_comment = j.comment;
      if (j.verdict == Verdict::INVALID) {
        arg.stance = Stance::UNKNOWN;
        ++out.report.suppressed;
      } else {
        arg.stance = classify_stance(graph, spec, arg.text, gateway);
        ++out.report.kept;
      }
      out.arguments.push_back(std::move(arg));
    }
    out.report.generated = static_cast<int>(out.arguments.size());
    out.report.status = out.arguments.empty() ? QueryStatus::empty : QueryStatus::ok;
    return out;
  } catch (const std::exception& e) {
    throw Error(spec_prefix(spec) + e.what());
  }
}

MiningRun run_mining(GraphStore& store, const std::vector<QuerySpec>& specs, llm::LlmGateway& gateway,
                     embed::Embedder& embedder, const MiningSettings& settings, bool force, const ProgressFn& progress) {
  auto lease = store.acquire_exclusive();
  return run_mining(lease, store.snapshot(), specs, gateway, embedder, settings, force, progress);
}

MiningRun run_mining(GraphStore::ExclusiveLease& lease, const GraphStore::Snapshot& frozen,
                     const std::vector<QuerySpec>& specs, llm::LlmGateway& gateway, embed::Embedder& embedder,
                     const MiningSettings& settings, bool force, const ProgressFn& progress) {
  const DebateGraph& graph = *frozen;
  std::atomic<std::size_t> done{0};
  struct Row {
    QueryReport report;
    bool skipped = false;
  };
  auto rows = parallel_map(specs.size(), settings.parallelism, [&](std::size_t i) {
    const QuerySpec& spec = specs[i];
    Row row;
    if (auto it = graph.query_reports().find(spec.id);
        !force && it != graph.query_reports().end() && it->second.status != QueryStatus::failed) {
      row.report = it->second;
      row.skipped = true;
    } else {
      QueryOutcome outcome;
      try {
        outcome = run_query(graph, spec, gateway, embedder, settings);
      } catch (const std::exception& e) {
        outcome = {};
        outcome.report.spec_id = spec.id;
        outcome.report.family = spec.family;
        outcome.report.status = QueryStatus::failed;
        outcome.report.error = e.what();
      }
      row.report = outcome.report;
      lease.write([&](DebateGraph& g) { g.record_query(spec, outcome.report, std::move(outcome.arguments)); });
    }
    if (progress) progress(++done, specs.size());
    return row;
  });
  MiningRun run;
  for (auto& row : rows) {
    run.skipped += row.skipped ? 1 : 0;
    run.kept += static_cast<std::size_t>(row.report.kept);
    run.suppressed += static_cast<std::size_t>(row.report.suppressed);
    run.reports.push_back(std::move(row.report));
  }
  return run;
}

void write_report(const std::vector<QueryReport>& reports, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write pipeline report '" + path.string() + "'");
  for (const auto& r : reports) out << json(r).dump() << '\n';
}

json export_arguments(const DebateGraph& graph) {
  json out = json::array();
  for (const auto& [id, arg] : graph.arguments()) {
    const QuerySpec* spec = nullptr;
    if (auto it = graph.query_specs().find(arg.query_spec_id); it != graph.query_specs().end()) spec = &it->second;
    std::string dimension = spec ? upper_ascii(to_string(spec->family)) : "UNKNOWN";
    std::string quality = arg.judge_verdict == Verdict::INVALID ? "BAD: " + arg.judge_comment : "GOOD";
    json sources = json::array();
    for (const auto& s : arg.source_paragraph_ids) sources.push_back(s.value);
    out.push_back({{"id", id.value},
                   {"query", spec ? spec->question : ""},
                   {"dimension", dimension},
                   {"year", spec && spec->year ? json(*spec->year) : json(nullptr)},
                   {"text", arg.text},
                   {"sources", sources},
                   {"stance", to_string(arg.stance)},
                   {"verdict", to_string(arg.judge_verdict)},
                   {"quality", quality}});
  }
  return out;
}

}  // namespace stancegraph::mining
