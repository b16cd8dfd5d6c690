#include "stancegraph/app/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <set>

#include "stancegraph/app/service.hpp"
#include "stancegraph/core/snapshot.hpp"
#include "stancegraph/eval/eval.hpp"

namespace stancegraph::app {
namespace {

struct Failure {
  int code;
  std::string kind;
};

Failure classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return {kExitValidation, "config"};
  if (dynamic_cast<const SnapshotError*>(&e)) return {kExitValidation, "snapshot"};
  if (dynamic_cast<const ValidationError*>(&e)) return {kExitValidation, "validation"};
  if (dynamic_cast<const NotFoundError*>(&e)) return {kExitNotFound, "not_found"};
  if (dynamic_cast<const BusyError*>(&e)) return {kExitBusy, "busy"};
  if (dynamic_cast<const llm::ReplayMissError*>(&e)) return {kExitProvider, "replay_miss"};
  if (dynamic_cast<const TransportError*>(&e)) return {kExitProvider, "transport"};
  return {kExitFailure, "internal"};
}

void report_error(std::ostream& err, const std::string& command, const std::string& kind, const std::string& message,
                  const std::vector<std::string>& issues = {}) {
  json j{{"error", {{"command", command}, {"kind", kind}, {"message", message}}}};
  if (!issues.empty()) j["error"]["issues"] = issues;
  err << j.dump() << '\n';
}

template <class T>
std::vector<T> parse_list(const std::string& csv, const char* what) {
  std::vector<T> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(item, &used));
      } else {
        const long v = std::stol(item, &used);
        if (v < 1) throw std::invalid_argument(item);
        out.push_back(static_cast<T>(v));
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ValidationError(std::string("invalid ") + what + " value '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError(std::string("empty ") + what + " list");
  return out;
}

Verdict judge_label(const std::string& label) {
  if (label == "GOOD") return Verdict::STRONG;
  if (label == "BAD") return Verdict::INVALID;
  return parse_verdict(label);
}

struct Options {
  std::string config_path = "stancegraph.json";
  std::string llm_mode;

  std::string init_dir = ".";
  std::string init_name;
  bool init_force = false;

  std::vector<std::string> ingest_files;
  std::string thesaurus_import;
  bool mine_force = false;
  std::string map_out;

  std::string eval_sets;
  std::string eval_lambdas = "0.5,0.8";
  std::string eval_ks = "10,20";
  std::string eval_stance;
  std::string eval_judge;
  bool eval_json = false;

  std::string serve_host;
  int serve_port = -1;

  std::string snapshot_path;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err, const RuntimeOptions& base) : out_(out), err_(err), base_(base) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"stancegraph: debate analysis over a document corpus", "stancegraph"};
    app.require_subcommand(1);
    app.add_option("-c,--config", o_.config_path, "Project config file")->capture_default_str();
    app.add_option("--llm-mode", o_.llm_mode, "Override the LLM mode")->check(CLI::IsMember({"live", "record", "replay"}));

    auto* init = app.add_subcommand("init", "Scaffold a project config");
    init->add_option("--dir", o_.init_dir, "Project directory")->capture_default_str();
    init->add_option("--name", o_.init_name, "Debate name");
    init->add_flag("--force", o_.init_force, "Overwrite an existing config");

    auto* ingest = app.add_subcommand("ingest", "Upsert, parse and link documents");
    ingest->add_option("files", o_.ingest_files, "Document files (.json or .jsonl)")->required();

    auto* thesaurus = app.add_subcommand("build-thesaurus", "Build (or import) the debate thesaurus");
    thesaurus->add_option("--import", o_.thesaurus_import, "Install an edited thesaurus file instead");

    auto* link = app.add_subcommand("link-topics", "Link paragraphs to thesaurus topics");

    auto* mine = app.add_subcommand("mine", "Plan and run the argument query grid");
    mine->add_flag("--force", o_.mine_force, "Re-run specs that already have results");

    auto* map = app.add_subcommand("map", "Build and export the actor influence graph");
    map->add_option("--out", o_.map_out, "Output file (default: map_path from the config)");

    auto* evaluate = app.add_subcommand("evaluate", "Retrieval sweep and classification reports");
    evaluate->add_option("--sets", o_.eval_sets, "Labeled retrieval sets");
    evaluate->add_option("--lambdas", o_.eval_lambdas, "Comma-separated MMR lambdas")->capture_default_str();
    evaluate->add_option("--ks", o_.eval_ks, "Comma-separated cutoffs")->capture_default_str();
    evaluate->add_option("--stance", o_.eval_stance, "Stance label pairs");
    evaluate->add_option("--judge", o_.eval_judge, "Judge label pairs");
    evaluate->add_flag("--json", o_.eval_json, "Emit JSON");

    auto* serve = app.add_subcommand("serve", "Start the HTTP API");
    serve->add_option("--host", o_.serve_host, "Bind address (default from config)");
    serve->add_option("--port", o_.serve_port, "Port (default from config, 0 = any)");

    auto* snapshot = app.add_subcommand("snapshot", "Snapshot maintenance");
    snapshot->require_subcommand(1);
    auto* snap_save = snapshot->add_subcommand("save", "Write the project graph to a file");
    snap_save->add_option("path", o_.snapshot_path)->required();
    auto* snap_load = snapshot->add_subcommand("load", "Replace the project graph with a snapshot file");
    snap_load->add_option("path", o_.snapshot_path)->required();

    std::string command = args.empty() ? "" : args.front();
    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      report_error(err_, command, "usage", e.what());
      return kExitUsage;
    }
    if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();

    try {
      if (init->parsed()) return cmd_init();
      if (evaluate->parsed()) return cmd_evaluate();
      Runtime rt(load_config(o_.config_path), runtime_options());
      if (ingest->parsed()) return cmd_ingest(rt);
      if (thesaurus->parsed()) return cmd_thesaurus(rt);
      if (link->parsed()) return cmd_link(rt);
      if (mine->parsed()) return cmd_mine(rt);
      if (map->parsed()) return cmd_map(rt);
      if (serve->parsed()) return cmd_serve(rt);
      if (snap_save->parsed()) return cmd_snapshot_save(rt);
      if (snap_load->parsed()) return cmd_snapshot_load(rt);
      report_error(err_, command, "usage", "unknown command");
      return kExitUsage;
    } catch (const ConfigError& e) {
      report_error(err_, command, "config", "invalid config", e.issues());
      return kExitValidation;
    } catch (const std::exception& e) {
      const auto f = classify(e);
      report_error(err_, command, f.kind, e.what());
      return f.code;
    }
  }

 private:
  RuntimeOptions runtime_options() const {
    RuntimeOptions r = base_;
    if (!o_.llm_mode.empty()) r.mode = llm::parse_llm_mode(o_.llm_mode);
    return r;
  }

  int cmd_init() {
    const std::filesystem::path dir = o_.init_dir;
    std::filesystem::create_directories(dir);
    const auto path = dir / std::filesystem::path(o_.config_path).filename();
    if (std::filesystem::exists(path) && !o_.init_force) {
      throw ValidationError("'" + path.string() + "' exists (use --force to overwrite)");
    }
    auto config = default_config(std::filesystem::absolute(dir));
    if (!o_.init_name.empty()) {
      config.debate.name = o_.init_name;
      config.debate.aliases.clear();
      config.debate = normalized(config.debate);
    }
    std::ofstream(path) << config_to_json(config, std::filesystem::absolute(dir)).dump(2) << '\n';
    if (!std::filesystem::exists(config.actors_path)) std::ofstream(config.actors_path) << "[]\n";
    out_ << "wrote " << path.string() << '\n';
    return kExitOk;
  }

  int cmd_ingest(Runtime& rt) {
    std::vector<Document> docs;
    for (const auto& f : o_.ingest_files) {
      auto more = load_documents(f);
      docs.insert(docs.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    auto summary = rt.ingest_documents(std::move(docs));
    rt.save();
    for (const auto& r : summary.results) {
      out_ << r.document_id.value << "  paragraphs=" << r.paragraphs << " relations=" << r.relations
           << (r.parse_failed ? " parse-failed" : "") << (r.unchanged ? " unchanged" : "") << '\n';
    }
    out_ << "ingested " << summary.results.size() << " documents (" << summary.parse_failures()
         << " heuristic fallbacks)\n";
    return kExitOk;
  }

  int cmd_thesaurus(Runtime& rt) {
    topics::Thesaurus thesaurus;
    if (!o_.thesaurus_import.empty()) {
      thesaurus = rt.import_thesaurus(o_.thesaurus_import);
    } else {
      auto build = rt.build_thesaurus();
      out_ << build.chunks.size() << " chunks, " << build.candidates.size() << " candidates, " << build.clustering.k
           << " clusters\n";
      thesaurus = std::move(build.thesaurus);
    }
    rt.save();
    for (const auto& t : thesaurus.themes) {
      out_ << "- " << t.topic << (t.flagged ? "  [flagged: " + t.flag_reason + "]" : "") << '\n';
    }
    return kExitOk;
  }

  int cmd_link(Runtime& rt) {
    const auto n = rt.link_topics();
    rt.save();
    out_ << n << " topic links\n";
    return kExitOk;
  }

  int cmd_mine(Runtime& rt) {
    if (!rt.config().mining_enabled) throw ValidationError("mining is disabled in the config");
    auto summary = rt.mine(o_.mine_force);
    rt.write_mining_outputs(summary.run);
    rt.save();
    std::size_t failed = 0;
    for (const auto& r : summary.run.reports) failed += r.status == QueryStatus::failed ? 1 : 0;
    out_ << "specs=" << summary.specs.size() << " kept=" << summary.run.kept << " suppressed=" << summary.run.suppressed
         << " skipped=" << summary.run.skipped << " failed=" << failed << '\n';
    if (failed > 0) {
      report_error(err_, "mine", "partial_failure",
                   std::to_string(failed) + " query specs failed; rerun `mine` to retry them");
      return kExitFailure;
    }
    return kExitOk;
  }

  int cmd_map(Runtime& rt) {
    const std::filesystem::path path = o_.map_out.empty() ? rt.config().map_path : std::filesystem::path(o_.map_out);
    if (path.empty()) throw ValidationError("no output path (set map_path or pass --out)");
    const auto graph = rt.map();
    network::export_graph(graph, path);
    out_ << graph.nodes.size() << " actors, " << graph.edges.size() << " edges -> " << path.string() << '\n';
    return kExitOk;
  }

  int cmd_evaluate() {
    if (o_.eval_sets.empty() && o_.eval_stance.empty() && o_.eval_judge.empty()) {
      throw ValidationError("nothing to evaluate (give --sets, --stance or --judge)");
    }
    json report = json::object();
    if (!o_.eval_sets.empty()) {
      std::shared_ptr<embed::Embedder> embedder = base_.embedder;
      if (!embedder) {
        EmbeddingSettings settings;
        if (std::filesystem::exists(o_.config_path)) settings = load_config(o_.config_path).embedding;
        embedder = make_embedder(settings);
      }
      const auto sets = eval::load_labeled_sets(o_.eval_sets, *embedder);
      const auto table = eval::sweep_lambda(sets, parse_list<double>(o_.eval_lambdas, "lambda"),
                                            parse_list<std::size_t>(o_.eval_ks, "k"));
      if (o_.eval_json) {
        report["retrieval"] = eval::sweep_to_json(table);
      } else {
        out_ << "Retrieval (" << sets.size() << " queries)\n" << eval::format_sweep_table(table) << '\n';
      }
    }
    if (!o_.eval_stance.empty()) {
      std::vector<std::string> predicted;
      std::vector<std::string> gold;
      std::vector<std::string> classes{"PRO", "CON", "NEUTRAL"};
      for (const auto& [p, g] : eval::load_label_pairs(o_.eval_stance)) {
        predicted.push_back(std::string(to_string(parse_stance(p))));
        gold.push_back(std::string(to_string(parse_stance(g))));
      }
      if (std::find(predicted.begin(), predicted.end(), "UNKNOWN") != predicted.end() ||
          std::find(gold.begin(), gold.end(), "UNKNOWN") != gold.end()) {
        classes.push_back("UNKNOWN");
      }
      const auto r = eval::classification_report(predicted, gold, classes);
      if (o_.eval_json) {
        report["stance"] = eval::class_report_to_json(r);
      } else {
        out_ << "Stance\n" << eval::format_class_report(r) << '\n';
      }
    }
    if (!o_.eval_judge.empty()) {
      std::vector<eval::JudgePair> pairs;
      for (const auto& [p, g] : eval::load_label_pairs(o_.eval_judge)) {
        pairs.push_back({is_good(judge_label(p)), is_good(judge_label(g))});
      }
      const auto r = eval::judge_report(pairs);
      if (o_.eval_json) {
        report["judge"] = eval::class_report_to_json(r);
      } else {
        out_ << "Judge\n" << eval::format_class_report(r) << '\n';
      }
    }
    if (o_.eval_json) out_ << report.dump(2) << '\n';
    return kExitOk;
  }

  int cmd_serve(Runtime& rt) {
    Service service(rt, service_options_from_env());
    const std::string host = o_.serve_host.empty() ? rt.config().service.host : o_.serve_host;
    const int port = service.bind(host, o_.serve_port >= 0 ? o_.serve_port : rt.config().service.port);
    out_ << "listening on http://" << host << ':' << port << std::endl;
    service.listen();
    return kExitOk;
  }

  int cmd_snapshot_save(Runtime& rt) {
    save_snapshot(*rt.store().snapshot(), o_.snapshot_path);
    out_ << "saved " << o_.snapshot_path << '\n';
    return kExitOk;
  }

  int cmd_snapshot_load(Runtime& rt) {
    DebateGraph graph = load_snapshot(o_.snapshot_path);
    save_snapshot(graph, rt.config().snapshot_path);
    out_ << "loaded " << o_.snapshot_path << ": " << graph.documents().size() << " documents, "
         << graph.paragraphs().size() << " paragraphs, " << graph.arguments().size() << " arguments\n";
    return kExitOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  const RuntimeOptions& base_;
  Options o_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const RuntimeOptions& base) {
  return Cli(out, err, base).run(args);
}

}  // namespace stancegraph::app
