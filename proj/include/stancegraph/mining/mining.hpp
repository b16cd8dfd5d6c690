#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stancegraph/core/graph.hpp"
#include "stancegraph/core/json_io.hpp"
#include "stancegraph/core/store.hpp"
#include "stancegraph/embed/embedder.hpp"
#include "stancegraph/embed/mmr.hpp"
#include "stancegraph/llm/gateway.hpp"

namespace stancegraph::mining {

inline constexpr int kJudgeAttempts = 2;

// Planning -----------------------------------------------------------------

std::string global_question(const Debate& debate, Stance target);
std::string actor_question(const Debate& debate, const Actor& actor);
std::string topic_question(const Topic& topic);

/// Global specs (years x {PRO, CON}), then one spec per distinct actor, then
/// topics x years. Years are sorted and deduplicated. Throws ValidationError
/// when `years` is empty.
std::vector<QuerySpec> plan_queries(const Debate& debate, const std::vector<Actor>& actors,
                                    const std::vector<Topic>& topics, std::vector<int> years);

// Stages -------------------------------------------------------------------

struct MiningSettings {
  std::size_t k = embed::kDefaultRetrieveK;
  double lambda = embed::kDefaultMmrLambda;
  std::size_t actor_fallback = kDefaultActorFallbackThreshold;
  /// Character budget of the context block; lowest-ranked excerpts are cut
  /// first. Unlimited when absent.
  std::optional<std::size_t> max_context_chars;
  std::size_t parallelism = 4;
  /// Timestamp source for Argument::created_at.
  std::function<std::string()> clock;
};

std::string utc_now();

struct Retrieval {
  std::vector<ParagraphId> context_ids;  ///< MMR order; local id-N is index N-1
  int candidate_count = 0;
  std::optional<SelectionTier> tier;
  bool truncated = false;
};

/// Family filter, then MMR over the embedded candidates.
Retrieval retrieve(const DebateGraph& graph, const QuerySpec& spec, embed::Embedder& embedder,
                   const MiningSettings& settings);

/// "id-1: <text>" lines in retrieval order.
std::string render_context(const DebateGraph& graph, const std::vector<ParagraphId>& ids);

struct RawArgumentLine {
  std::string text;
  std::vector<int> sources;  ///< local excerpt numbers, citation order

  friend bool operator==(const RawArgumentLine&, const RawArgumentLine&) = default;
};

struct ParsedArguments {
  std::vector<RawArgumentLine> lines;
  int dropped = 0;
};

/// Lenient parser of the argument_extraction output. Each kept line ends
/// with a `(id-N[, id-M]*)` group; other non-empty lines are dropped and
/// counted. A sole "I don't know." gives an empty result.
ParsedArguments parse_arguments(std::string_view response);

bool is_dont_know(std::string_view text);

struct Judgement {
  Verdict verdict = Verdict::INVALID;
  std::string comment;
};

/// Reads the `quality_argument` / `global_comment` object; nullopt when no
/// verdict label can be found.
std::optional<Judgement> parse_verdict(std::string_view response);

/// Judge template over the argument and its concatenated sources. Two
/// attempts, then INVALID with comment "verdict unparseable".
Judgement judge_argument(const Debate& debate, const std::string& argument, const std::vector<std::string>& sources,
                         llm::LlmGateway& gateway);

/// Exact match after trim and upper-casing; anything unexpected is UNKNOWN.
Stance map_stance_label(std::string_view response);

/// Global specs inherit their polarity; actor and topic specs ask the
/// matching stance template.
Stance classify_stance(const DebateGraph& graph, const QuerySpec& spec, const std::string& argument,
                       llm::LlmGateway& gateway);

struct QueryOutcome {
  QueryReport report;
  std::vector<Argument> arguments;  ///< includes INVALID (suppressed) ones
};

/// Retrieve, generate, judge and classify one spec. Errors are rethrown as
/// Error prefixed with the spec id.
QueryOutcome run_query(const DebateGraph& graph, const QuerySpec& spec, llm::LlmGateway& gateway,
                       embed::Embedder& embedder, const MiningSettings& settings);

// Runs ---------------------------------------------------------------------

struct MiningRun {
  std::vector<QueryReport> reports;  ///< plan order, one per spec
  std::size_t skipped = 0;           ///< specs already mined (restart)
  std::size_t kept = 0;
  std::size_t suppressed = 0;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Mines every spec against a snapshot frozen at the start, holding the
/// store's writer exclusively. Specs that already have an ok/empty report
/// are skipped unless `force`. A failing spec yields a `failed` report row.
MiningRun run_mining(GraphStore& store, const std::vector<QuerySpec>& specs, llm::LlmGateway& gateway,
                     embed::Embedder& embedder, const MiningSettings& settings, bool force = false,
                     const ProgressFn& progress = {});

/// Same, with the lease already held by the caller.
MiningRun run_mining(GraphStore::ExclusiveLease& lease, const GraphStore::Snapshot& frozen,
                     const std::vector<QuerySpec>& specs, llm::LlmGateway& gateway, embed::Embedder& embedder,
                     const MiningSettings& settings, bool force = false, const ProgressFn& progress = {});

void write_report(const std::vector<QueryReport>& reports, const std::filesystem::path& path);

/// Records with the columns dimension, year, text, sources, stance, quality.
json export_arguments(const DebateGraph& graph);

}  // namespace stancegraph::mining
