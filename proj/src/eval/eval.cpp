#include "stancegraph/eval/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "stancegraph/core/error.hpp"
#include "stancegraph/core/text.hpp"
#include "stancegraph/embed/mmr.hpp"

namespace stancegraph::eval {
namespace {

std::vector<json> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("input file '" + path.string() + "' not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string body = buf.str();
  std::vector<json> records;
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && body[first] == '[') {
    try {
      for (auto& r : json::parse(body)) records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ValidationError("'" + path.string() + "': " + e.what());
    }
    return records;
  }
  std::istringstream lines(body);
  std::size_t line_no = 0;
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ValidationError("'" + path.string() + "' line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

double precision_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant, std::size_t k) {
  if (k == 0) throw ValidationError("precision@k needs k >= 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) hits += relevant.contains(ranked[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::size_t LabeledRetrievalSet::relevant_count() const {
  std::size_t n = 0;
  for (const auto& c : candidates) n += c.relevant ? 1 : 0;
  return n;
}

std::vector<LabeledRetrievalSet> load_labeled_sets(const std::filesystem::path& path, embed::Embedder& embedder) {
  std::vector<LabeledRetrievalSet> sets;
  for (const auto& r : read_records(path)) {
    LabeledRetrievalSet set;
    set.query = r.at("query").get<std::string>();
    set.query_id = r.value("query_id", "q" + std::to_string(sets.size() + 1));
    set.query_embedding = embedder.embed(set.query);
    for (const auto& c : r.at("candidates")) {
      LabeledCandidate cand;
      char fallback[16];
      std::snprintf(fallback, sizeof fallback, "c%05zu", set.candidates.size());
      cand.id = c.value("id", std::string(fallback));
      cand.text = c.at("text").get<std::string>();
      cand.relevant = c.at("relevant").get<bool>();
      cand.embedding = embedder.embed(cand.text);
      set.candidates.push_back(std::move(cand));
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

SweepTable sweep_lambda(const std::vector<LabeledRetrievalSet>& sets, const std::vector<double>& lambdas,
                        const std::vector<std::size_t>& ks) {
  if (sets.empty()) throw ValidationError("lambda sweep needs at least one labeled set");
  if (lambdas.empty() || ks.empty()) throw ValidationError("lambda sweep needs lambdas and ks");
  std::size_t max_k = 0;
  for (std::size_t k : ks) {
    if (k == 0) throw ValidationError("precision@k needs k >= 1");
    max_k = std::max(max_k, k);
  }
  SweepTable table{lambdas, ks, {}};
  for (double lambda : lambdas) {
    std::vector<std::vector<double>> per_k(ks.size());
    for (const auto& set : sets) {
      std::vector<embed::MmrCandidate> pool;
      std::set<std::string> relevant;
      for (const auto& c : set.candidates) {
        pool.push_back({ParagraphId(c.id), c.embedding});
        if (c.relevant) relevant.insert(c.id);
      }
      std::vector<std::string> ranked;
      if (!pool.empty()) {
        for (auto& id : embed::mmr_select(set.query_embedding, pool, max_k, lambda)) ranked.push_back(std::move(id.value));
      }
      for (std::size_t i = 0; i < ks.size(); ++i) per_k[i].push_back(precision_at_k(ranked, relevant, ks[i]));
    }
    auto& row = table.cells.emplace_back();
    for (const auto& values : per_k) row.push_back(mean_std(values));
  }
  return table;
}

std::string format_sweep_table(const SweepTable& table) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"lambda"};
  for (std::size_t k : table.ks) header.push_back("P@" + std::to_string(k));
  rows.push_back(header);
  for (std::size_t i = 0; i < table.lambdas.size(); ++i) {
    std::vector<std::string> row{fixed(table.lambdas[i], 2)};
    for (const auto& cell : table.cells[i]) row.push_back(fixed(cell.mean, 2) + " \xc2\xb1 " + fixed(cell.std, 2));
    rows.push_back(row);
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], text::utf8_length(row[c]));
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) out += std::string(widths[c] - text::utf8_length(row[c]) + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

json sweep_to_json(const SweepTable& table) {
  json rows = json::array();
  for (std::size_t i = 0; i < table.lambdas.size(); ++i) {
    for (std::size_t j = 0; j < table.ks.size(); ++j) {
      rows.push_back({{"lambda", table.lambdas[i]},
                      {"k", table.ks[j]},
                      {"mean", table.cells[i][j].mean},
                      {"std", table.cells[i][j].std}});
    }
  }
  return rows;
}

ClassReport classification_report(const std::vector<std::string>& predictions, const std::vector<std::string>& gold,
                                  const std::vector<std::string>& classes) {
  if (predictions.size() != gold.size()) throw ValidationError("predictions and gold labels differ in length");
  if (classes.empty()) throw ValidationError("classification report needs at least one class");
  std::map<std::string, std::size_t> index;
  for (const auto& c : classes) {
    if (!index.emplace(c, index.size()).second) throw ValidationError("duplicate class '" + c + "'");
  }
  const std::size_t n = classes.size();
  std::vector<std::vector<std::size_t>> confusion(n, std::vector<std::size_t>(n, 0));  // [gold][predicted]
  auto at = [&](const std::string& label) {
    auto it = index.find(label);
    if (it == index.end()) throw ValidationError("unknown label '" + label + "'");
    return it->second;
  };
  for (std::size_t i = 0; i < gold.size(); ++i) ++confusion[at(gold[i])][at(predictions[i])];

  ClassReport report;
  report.total = gold.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t o = 0; o < n; ++o) {
      predicted += confusion[o][c];
      actual += confusion[c][o];
    }
    ClassMetrics m;
    m.label = classes[c];
    m.support = actual;
    m.precision = ratio(static_cast<double>(confusion[c][c]), static_cast<double>(predicted));
    m.recall = ratio(static_cast<double>(confusion[c][c]), static_cast<double>(actual));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    report.macro_precision += m.precision / static_cast<double>(n);
    report.macro_recall += m.recall / static_cast<double>(n);
    report.macro_f1 += m.f1 / static_cast<double>(n);
    report.classes.push_back(std::move(m));
  }
  return report;
}

ClassReport judge_report(const std::vector<JudgePair>& pairs) {
  if (pairs.empty()) throw ValidationError("judge report needs at least one verdict");
  std::vector<std::string> predicted;
  std::vector<std::string> gold;
  for (const auto& p : pairs) {
    predicted.emplace_back(p.predicted_good ? "GOOD" : "BAD");
    gold.emplace_back(p.gold_good ? "GOOD" : "BAD");
  }
  return classification_report(predicted, gold, {"BAD", "GOOD"});
}

std::string format_class_report(const ClassReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %9s %9s %9s %9s\n", "class", "precision", "recall", "f1", "support");
  out += line;
  for (const auto& c : report.classes) {
    std::snprintf(line, sizeof line, "%-12s %9.3f %9.3f %9.3f %9zu\n", c.label.c_str(), c.precision, c.recall, c.f1,
                  c.support);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-12s %9.3f %9.3f %9.3f %9zu\n", "macro", report.macro_precision,
                report.macro_recall, report.macro_f1, report.total);
  out += line;
  return out;
}

json class_report_to_json(const ClassReport& report) {
  json classes = json::array();
  for (const auto& c : report.classes) {
    classes.push_back({{"label", c.label}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
  }
  return {{"classes", classes},
          {"macro", {{"precision", report.macro_precision}, {"recall", report.macro_recall}, {"f1", report.macro_f1}}},
          {"total", report.total}};
}

std::vector<std::pair<std::string, std::string>> load_label_pairs(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& r : read_records(path)) out.emplace_back(r.at("predicted").get<std::string>(), r.at("gold").get<std::string>());
  return out;
}

}  // namespace stancegraph::eval
