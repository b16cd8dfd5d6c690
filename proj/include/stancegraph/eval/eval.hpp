#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "stancegraph/core/json_io.hpp"
#include "stancegraph/embed/embedder.hpp"

namespace stancegraph::eval {

/// |top-k ∩ relevant| / k. Missing ranks count as misses. Throws on k = 0.
double precision_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant, std::size_t k);

struct LabeledCandidate {
  std::string id;
  std::string text;
  bool relevant = false;
  Embedding embedding;
};

struct LabeledRetrievalSet {
  std::string query_id;
  std::string query;
  Embedding query_embedding;
  std::vector<LabeledCandidate> candidates;

  std::size_t relevant_count() const;
};

/// Reads `{query_id?, query, candidates: [{id?, text, relevant}]}` records
/// from a JSON array or a JSON-lines file and embeds every text.
std::vector<LabeledRetrievalSet> load_labeled_sets(const std::filesystem::path& path, embed::Embedder& embedder);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation
};

MeanStd mean_std(const std::vector<double>& values);

struct SweepTable {
  std::vector<double> lambdas;
  std::vector<std::size_t> ks;
  std::vector<std::vector<MeanStd>> cells;  ///< [lambda][k]
};

/// MMR over each set's full candidate pool for every lambda; P@k per set,
/// summarized across sets.
SweepTable sweep_lambda(const std::vector<LabeledRetrievalSet>& sets, const std::vector<double>& lambdas,
                        const std::vector<std::size_t>& ks);

/// Rows per lambda, "P@k" columns holding "mean ± std".
std::string format_sweep_table(const SweepTable& table);
json sweep_to_json(const SweepTable& table);

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassReport {
  std::vector<ClassMetrics> classes;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::size_t total = 0;
};

/// Per-class precision/recall/F1 from the confusion counts; macro values are
/// unweighted means over `classes`. Throws ValidationError on a length
/// mismatch or a label outside `classes`.
ClassReport classification_report(const std::vector<std::string>& predictions, const std::vector<std::string>& gold,
                                  const std::vector<std::string>& classes);

struct JudgePair {
  bool predicted_good = false;
  bool gold_good = false;
};

/// Binary report with classes BAD and GOOD. Throws on empty input.
ClassReport judge_report(const std::vector<JudgePair>& pairs);

std::string format_class_report(const ClassReport& report);
json class_report_to_json(const ClassReport& report);

/// Reads `{predicted, gold}` label pairs (JSON array or JSON lines).
std::vector<std::pair<std::string, std::string>> load_label_pairs(const std::filesystem::path& path);

}  // namespace stancegraph::eval
