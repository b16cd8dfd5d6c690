// Acceptance suite: one PASS/FAIL line per criterion. The exit
// status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "graph_builders.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "stancegraph/app/config.hpp"
#include "stancegraph/app/runtime.hpp"
#include "stancegraph/app/service.hpp"
#include "stancegraph/core/snapshot.hpp"
#include "stancegraph/embed/mmr.hpp"
#include "stancegraph/embed/vector.hpp"
#include "stancegraph/eval/eval.hpp"
#include "stancegraph/ingest/ingest.hpp"
#include "stancegraph/mining/mining.hpp"
#include "stancegraph/topics/spectral.hpp"
#include "stancegraph/topics/topics.hpp"

namespace sg = stancegraph;
using sg::json;

namespace {

/// Collects mismatches for one criterion; an empty list is a pass.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ += ok ? 0 : 1;
  }
  bool ok() const { return failed_ == 0; }
  std::size_t checks() const { return checks_; }
  std::string summary() const {
    std::string out = std::to_string(failed_) + " of " + std::to_string(checks_) + " checks failed";
    for (const auto& f : failures_) out += "; " + f;
    return out;
  }
  std::string note;

 private:
  std::size_t checks_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

using Seconds = std::chrono::duration<double>;

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim) { return sg::testing::random_unit(rng, dim); }

std::vector<sg::ParagraphId> library_mmr(const std::vector<double>& q, const std::vector<sg::oracle::Item>& items,
                                         std::size_t k, double lambda) {
  std::vector<sg::embed::MmrCandidate> cands;
  for (const auto& it : items) cands.push_back({sg::ParagraphId(it.id), it.v});
  return sg::embed::mmr_select(q, cands, k, lambda);
}

std::vector<std::string> ids_of(const std::vector<sg::ParagraphId>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) out.push_back(id.value);
  return out;
}

/// n candidates with shuffled ids; some rounds plant exact duplicates so
/// ties have to be broken by id.
std::vector<sg::oracle::Item> random_items(std::mt19937_64& rng, std::size_t n, std::size_t dim, bool duplicates) {
  std::vector<std::size_t> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  std::shuffle(labels.begin(), labels.end(), rng);
  std::vector<sg::oracle::Item> items;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "c%04zu", labels[i]);
    if (duplicates && i > 0 && rng() % 4 == 0) {
      items.push_back({id, items[rng() % items.size()].v});
    } else {
      items.push_back({id, random_unit(rng, dim)});
    }
  }
  return items;
}

// 1 -------------------------------------------------------------------------

Checker mmr_oracle() {
  Checker c;
  std::mt19937_64 rng(20240101);
  const double lambdas[] = {0.0, 0.5, 0.8, 1.0};
  const auto start = std::chrono::steady_clock::now();
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t k = 1 + rng() % 25;
    const std::size_t dim = 2 + rng() % 15;
    const double lambda = lambdas[round % 4];
    const auto items = random_items(rng, n, dim, round % 3 == 0);
    const auto q = random_unit(rng, dim);
    const auto got = ids_of(library_mmr(q, items, k, lambda));
    const auto want = sg::oracle::mmr(q, items, k, lambda);
    c.expect(got == want, "instance " + std::to_string(round) + " (n=" + std::to_string(n) +
                              ", k=" + std::to_string(k) + ", lambda=" + std::to_string(lambda) + ")");
  }
  const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 30.0, "runtime " + std::to_string(secs) + " s");
  c.note = "200 instances in " + std::to_string(secs).substr(0, 5) + " s";
  return c;
}

// 2 -------------------------------------------------------------------------

Checker lambda_one() {
  Checker c;
  std::mt19937_64 rng(99);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t k = 1 + rng() % 25;
    const std::size_t dim = 2 + rng() % 10;
    const auto items = random_items(rng, n, dim, round % 2 == 0);
    const auto q = random_unit(rng, dim);
    c.expect(ids_of(library_mmr(q, items, k, 1.0)) == sg::oracle::top_k(q, items, k),
             "instance " + std::to_string(round));
  }
  c.note = "100 instances";
  return c;
}

// 3 -------------------------------------------------------------------------

/// One query along axis 0. Relevant candidates sit in three tight groups
/// close to the query (redundant with each other); the rest point into other
/// axes with a small query component, so they are far from everything
/// selected and win once diversity carries enough weight.
sg::eval::LabeledRetrievalSet planted_set(std::mt19937_64& rng, int index) {
  constexpr std::size_t kDim = 32;
  std::normal_distribution<double> noise(0.0, 0.02);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  sg::eval::LabeledRetrievalSet s;
  s.query_id = "q" + std::to_string(index);
  s.query = "planted query " + std::to_string(index);
  s.query_embedding.assign(kDim, 0.0);
  s.query_embedding[0] = 1.0;
  const std::size_t relevant = 30 + rng() % 11;
  std::vector<std::size_t> order(200);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < 200; ++i) {
    sg::eval::LabeledCandidate cand;
    char id[16];
    std::snprintf(id, sizeof id, "d%03zu", order[i]);
    cand.id = id;
    cand.text = id;
    cand.relevant = i < relevant;
    std::vector<double> v(kDim, 0.0);
    if (cand.relevant) {
      v[0] = 1.0;
      v[1 + i % 3] = 0.15 + 0.6 * unit(rng);
      for (auto& x : v) x += noise(rng);
    } else {
      v[0] = 0.05 + 0.5 * unit(rng);
      const auto spread = random_unit(rng, kDim - 4);
      for (std::size_t d = 0; d < spread.size(); ++d) v[4 + d] = std::abs(spread[d]) * (rng() % 2 ? 1.0 : -1.0);
    }
    cand.embedding = sg::embed::l2_normalized(v);
    s.candidates.push_back(std::move(cand));
  }
  return s;
}

Checker planted_sweep() {
  Checker c;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4242);
  std::vector<sg::eval::LabeledRetrievalSet> sets;
  std::size_t relevant_total = 0;
  for (int i = 0; i < 16; ++i) {
    sets.push_back(planted_set(rng, i));
    relevant_total += sets.back().relevant_count();
  }
  const std::vector<double> lambdas{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const std::vector<std::size_t> ks{10, 20};
  const auto table = sg::eval::sweep_lambda(sets, lambdas, ks);

  c.expect(table.cells.size() == lambdas.size(), "one row per lambda");
  for (const auto& row : table.cells) c.expect(row.size() == ks.size(), "P@10 and P@20 columns");
  if (!c.ok()) return c;

  // Independent recomputation of every cell with the naive MMR.
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      std::vector<double> ps;
      for (const auto& s : sets) {
        std::vector<sg::oracle::Item> items;
        std::set<std::string> rel;
        for (const auto& cand : s.candidates) {
          items.push_back({cand.id, cand.embedding});
          if (cand.relevant) rel.insert(cand.id);
        }
        ps.push_back(sg::oracle::precision_at(sg::oracle::mmr(s.query_embedding, items, ks[ki], lambdas[li]), rel,
                                              ks[ki]));
      }
      const double mean = std::accumulate(ps.begin(), ps.end(), 0.0) / static_cast<double>(ps.size());
      double var = 0.0;
      for (double p : ps) var += (p - mean) * (p - mean);
      const double sd = std::sqrt(var / static_cast<double>(ps.size()));
      c.expect(std::abs(table.cells[li][ki].mean - mean) < 1e-12 && std::abs(table.cells[li][ki].std - sd) < 1e-12,
               "cell lambda=" + std::to_string(lambdas[li]) + " k=" + std::to_string(ks[ki]));
    }
  }
  const double p10_08 = table.cells[3][0].mean;
  const double p10_05 = table.cells[0][0].mean;
  c.expect(p10_08 >= p10_05, "P@10 at 0.8 (" + std::to_string(p10_08) + ") < P@10 at 0.5 (" +
                                 std::to_string(p10_05) + ")");

  const std::string text = sg::eval::format_sweep_table(table);
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  c.expect(header.find("lambda") == 0 && header.find("P@10") != std::string::npos &&
               header.find("P@20") != std::string::npos,
           "header '" + header + "'");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) {
    if (line.empty()) continue;
    ++rows;
    std::size_t pm = 0;
    for (auto pos = line.find("\xc2\xb1"); pos != std::string::npos; pos = line.find("\xc2\xb1", pos + 1)) ++pm;
    c.expect(pm == 2, "row '" + line + "' lacks two mean \xc2\xb1 std cells");
  }
  c.expect(rows == lambdas.size(), "table has " + std::to_string(rows) + " rows");

  const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 60.0, "runtime " + std::to_string(secs) + " s");
  std::cout << text;
  c.note = "16 sets x 200 candidates, " + std::to_string(relevant_total / 16) + " relevant on average; P@10 " +
           std::to_string(p10_08).substr(0, 4) + " at 0.8 vs " + std::to_string(p10_05).substr(0, 4) + " at 0.5";
  return c;
}

// 4 -------------------------------------------------------------------------

Checker metric_oracles() {
  Checker c;
  const auto path = sg::testing::fixture_dir().parent_path() / "metrics" / "three_class.json";
  std::ifstream in(path);
  const json fixture = json::parse(in);
  std::vector<std::string> pred, gold;
  for (const auto& p : fixture["pairs"]) {
    pred.push_back(p["predicted"]);
    gold.push_back(p["gold"]);
  }
  const auto classes = fixture["classes"].get<std::vector<std::string>>();
  const auto r = sg::eval::classification_report(pred, gold, classes);
  const json& want = fixture["expected"];
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
  c.expect(r.classes.size() == classes.size(), "class count");
  for (std::size_t i = 0; i < r.classes.size() && i < classes.size(); ++i) {
    const auto& m = r.classes[i];
    c.expect(m.label == classes[i], "label order");
    c.expect(near(m.precision, want["precision"][i]), classes[i] + " precision");
    c.expect(near(m.recall, want["recall"][i]), classes[i] + " recall");
    c.expect(near(m.f1, want["f1"][i]), classes[i] + " f1");
    c.expect(m.support == want["support"][i].get<std::size_t>(), classes[i] + " support");
  }
  c.expect(near(r.macro_precision, want["macro_precision"]), "macro precision");
  c.expect(near(r.macro_recall, want["macro_recall"]), "macro recall");
  c.expect(near(r.macro_f1, want["macro_f1"]), "macro f1");

  // Definitional precision@k cases.
  const std::set<std::string> rel{"r1", "r2", "r3", "r4", "r5", "r6", "r7", "r8", "r9", "r10", "r11", "r12",
                                  "r13", "r14", "r15", "r16", "r17", "r18", "r19", "r20"};
  const std::vector<std::string> six{"r1", "x1", "r2", "r3", "x2", "r4", "x3", "r5", "x4", "r6"};
  c.expect(sg::eval::precision_at_k(six, rel, 10) == 0.6, "6 of 10 relevant");
  std::vector<std::string> twenty(rel.begin(), rel.end());
  c.expect(sg::eval::precision_at_k(twenty, rel, 20) == 1.0, "20 of 20 relevant");
  c.expect(sg::eval::precision_at_k({"r1", "r2", "r3", "r4", "r5"}, rel, 10) == 0.5, "5 returned, k=10");

  // Binary judge report on 739 synthetic pairs with known counts.
  std::vector<sg::eval::JudgePair> pairs;
  const std::size_t bad_bad = 180, bad_good = 60, good_bad = 95, good_good = 404;  // predicted_gold
  for (std::size_t i = 0; i < bad_bad; ++i) pairs.push_back({false, false});
  for (std::size_t i = 0; i < bad_good; ++i) pairs.push_back({false, true});
  for (std::size_t i = 0; i < good_bad; ++i) pairs.push_back({true, false});
  for (std::size_t i = 0; i < good_good; ++i) pairs.push_back({true, true});
  std::shuffle(pairs.begin(), pairs.end(), std::mt19937_64(5));
  const auto j = sg::eval::judge_report(pairs);
  c.expect(j.total == 739, "739 pairs");
  c.expect(j.classes.size() == 2 && j.classes[0].label == "BAD" && j.classes[1].label == "GOOD", "BAD, GOOD rows");
  if (j.classes.size() == 2) {
    c.expect(near(j.classes[0].precision, 180.0 / 240), "BAD precision");
    c.expect(near(j.classes[0].recall, 180.0 / 275), "BAD recall");
    c.expect(near(j.classes[1].precision, 404.0 / 499), "GOOD precision");
    c.expect(near(j.classes[1].recall, 404.0 / 464), "GOOD recall");
  }
  c.note = "3-class fixture, precision@k cases, 739-pair judge report";
  return c;
}

// 5 -------------------------------------------------------------------------

Checker query_grid() {
  Checker c;
  std::vector<sg::Actor> actors;
  for (int i = 0; i < 50; ++i) {
    actors.push_back({sg::ActorId("actor-" + std::to_string(i)), "Actor " + std::to_string(i), {}, "", {}});
  }
  std::vector<sg::Topic> topics;
  for (int i = 0; i < 8; ++i) {
    topics.push_back({sg::TopicId("topic-" + std::to_string(i)), "Topic " + std::to_string(i), "", {}, {}});
  }
  const auto specs = sg::mining::plan_queries(sg::testing::sample_debate(), actors, topics, {2019, 2020, 2021, 2022, 2023});
  c.expect(specs.size() == 100, "got " + std::to_string(specs.size()) + " specs");
  c.expect(specs.size() == sg::oracle::grid_size(50, 8, 5), "formula");
  std::map<sg::QueryFamily, std::size_t> families;
  std::set<sg::QuerySpecId> ids;
  for (const auto& s : specs) {
    ++families[s.family];
    ids.insert(s.id);
  }
  c.expect(families[sg::QueryFamily::global] == 10 && families[sg::QueryFamily::actor] == 50 &&
               families[sg::QueryFamily::topic] == 40,
           "family split 10/50/40");
  c.expect(ids.size() == specs.size(), "spec ids unique");
  c.note = std::to_string(specs.size()) + " specs";
  return c;
}

// 6 -------------------------------------------------------------------------

Checker actor_fallback() {
  Checker c;
  struct Case {
    std::size_t debate, topic, plain;
    sg::SelectionTier tier;
    std::size_t size;
  };
  const Case cases[] = {
      {26, 3, 4, sg::SelectionTier::debate, 26},
      {25, 3, 4, sg::SelectionTier::all, 32},
      {5, 26, 4, sg::SelectionTier::topic, 26},
      {5, 25, 4, sg::SelectionTier::all, 34},
      {0, 0, 7, sg::SelectionTier::all, 7},
  };
  for (const auto& k : cases) {
    const auto g = sg::testing::tier_graph(k.debate, k.topic, k.plain);
    const auto sel = g.select_paragraphs_actor(sg::ActorId("a"));
    const std::string label = std::to_string(k.debate) + "/" + std::to_string(k.topic) + "/" + std::to_string(k.plain);
    c.expect(sel.tier == k.tier, label + " tier");
    c.expect(sel.paragraphs.size() == k.size, label + " size " + std::to_string(sel.paragraphs.size()));
  }
  c.note = "debate, topic and all tiers; 25 falls through";
  return c;
}

// 7 -------------------------------------------------------------------------

sg::DebateGraph linking_graph(const sg::Embedding& p, const std::vector<std::pair<std::string, sg::Embedding>>& tv) {
  sg::DebateGraph g(sg::testing::sample_debate());
  const auto ids = sg::testing::add_document(g, "d", "2023-01-01", {"text"});
  g.set_paragraph_embedding(ids[0], p);
  std::vector<sg::Topic> topics;
  for (const auto& [id, v] : tv) topics.push_back({sg::TopicId(id), id, "", {}, v});
  g.set_topics(topics);
  return g;
}

Checker topic_linking() {
  Checker c;
  // cos = 3/20 = 0.15 exactly; 7/50 = 0.14.
  {
    const auto g = linking_graph({1, 0, 0, 0, 0}, {{"at", {3, 19, 5, 2, 1}}, {"below", {7, 49, 7, 1, 0}}});
    const auto links = sg::topics::link_topics(g, 0.15);
    c.expect(links.size() == 1 && links[0].topic_id.value == "at", "inclusive 0.15 boundary");
  }
  // Four qualify, three kept: best first, equal scores by topic id.
  {
    const auto g = linking_graph({1, 0}, {{"d", {1, 1}}, {"c", {1, 1}}, {"b", {1, 0}}, {"a", {1, 1}}, {"z", {0, 1}}});
    const auto links = sg::topics::link_topics(g, 0.15);
    std::vector<std::string> got;
    for (const auto& l : links) got.push_back(l.topic_id.value);
    c.expect(got == std::vector<std::string>{"b", "a", "c"}, "top three were " + join(got));
  }
  // Random fixtures against a brute-force count.
  std::mt19937_64 rng(31);
  for (int round = 0; round < 50; ++round) {
    sg::DebateGraph g(sg::testing::sample_debate());
    const auto ids = sg::testing::add_document(g, "d", "2023-01-01", {"a", "b", "c", "d"});
    for (const auto& id : ids) g.set_paragraph_embedding(id, random_unit(rng, 3));
    std::vector<sg::Topic> topics;
    for (int t = 0; t < 7; ++t) topics.push_back({sg::TopicId("t" + std::to_string(t)), "T", "", {}, random_unit(rng, 3)});
    g.set_topics(topics);
    const auto links = sg::topics::link_topics(g, 0.15);
    std::map<std::string, std::size_t> per;
    for (const auto& l : links) {
      ++per[l.paragraph_id.value];
      c.expect(l.similarity >= 0.15, "link below threshold");
    }
    for (const auto& id : ids) {
      std::size_t qualifying = 0;
      for (const auto& t : topics) {
        qualifying += sg::oracle::cos_sim(*g.find_paragraph(id)->embedding, *t.embedding) >= 0.15 ? 1 : 0;
      }
      c.expect(per[id.value] == std::min<std::size_t>(qualifying, 3), "round " + std::to_string(round));
    }
  }
  c.note = "boundary, 4 qualifying -> 3 kept, 50 random fixtures";
  return c;
}

// 8 -------------------------------------------------------------------------

Checker spectral() {
  Checker c;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int round = 0; round < 5; ++round) {
    std::vector<sg::Embedding> data;
    std::vector<std::size_t> truth;
    for (std::size_t b = 0; b < 3; ++b) {
      for (int i = 0; i < 10; ++i) {
        sg::Embedding e(9, 0.0);
        for (auto& v : e) v = std::abs(noise(rng));
        e[3 * b] += 1.0;
        e[3 * b + 1] += 0.4;
        data.push_back(e);
        truth.push_back(b);
      }
    }
    std::vector<std::size_t> perm(data.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<sg::Embedding> shuffled;
    std::vector<std::size_t> shuffled_truth;
    for (auto i : perm) {
      shuffled.push_back(data[i]);
      shuffled_truth.push_back(truth[i]);
    }
    const auto result = sg::topics::spectral_cluster(shuffled);
    c.expect(result.k == 3, "round " + std::to_string(round) + " chose k=" + std::to_string(result.k));
    // Exact membership: the partition equals the planted one.
    std::set<std::vector<std::size_t>> got(result.clusters.begin(), result.clusters.end());
    std::map<std::size_t, std::vector<std::size_t>> planted;
    for (std::size_t i = 0; i < shuffled_truth.size(); ++i) planted[shuffled_truth[i]].push_back(i);
    std::set<std::vector<std::size_t>> want;
    for (auto& [b, members] : planted) want.insert(members);
    c.expect(got == want, "round " + std::to_string(round) + " membership");
  }
  const auto pair = sg::topics::spectral_cluster({{1, 0}, {0, 1}});
  c.expect(pair.clusters == std::vector<std::vector<std::size_t>>{{0}, {1}}, "orthogonal pair");
  c.note = "3 blobs of 10 (5 shuffles), orthogonal pair";
  return c;
}

// 9 -------------------------------------------------------------------------

std::filesystem::path make_temp(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("stancegraph-acceptance-" + tag + "-" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

struct ReplayProject {
  std::filesystem::path dir;
  ~ReplayProject() {
    std::error_code ec;
    if (!dir.empty()) std::filesystem::remove_all(dir, ec);
  }
};

ReplayProject g_project;  // reused by the feedback criterion

Checker end_to_end() {
  Checker c;
  const auto start = std::chrono::steady_clock::now();
  ReplayProject second{make_temp("b")};
  g_project.dir = make_temp("a");
  for (const auto& dir : {g_project.dir, second.dir}) {
    const auto results = sg::testing::run_replay_pipeline(dir);
    const bool ok = results.size() == 5 && results.back().code == 0;
    c.expect(ok, "pipeline in " + dir.string() + ": " + (results.empty() ? "" : results.back().err));
    if (!ok) return c;
  }
  const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 120.0, "two runs took " + std::to_string(secs) + " s");

  const auto config = sg::app::load_config(g_project.dir / "stancegraph.json");
  const auto other = sg::app::load_config(second.dir / "stancegraph.json");
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string snap = read(config.snapshot_path);
  c.expect(!snap.empty() && snap == read(other.snapshot_path), "snapshots differ between runs");
  c.expect(read(config.report_path) == read(other.report_path), "pipeline reports differ");
  c.expect(read(config.arguments_path) == read(other.arguments_path), "argument exports differ");
  c.expect(read(config.map_path) == read(other.map_path), "maps differ");

  const auto graph = sg::load_snapshot(config.snapshot_path);
  std::size_t kept = 0, unresolved = 0;
  for (const auto& [id, a] : graph.arguments()) {
    kept += a.judge_verdict != sg::Verdict::INVALID ? 1 : 0;
    for (const auto& pid : a.source_paragraph_ids) unresolved += graph.find_paragraph(pid) ? 0 : 1;
  }
  c.expect(kept >= 8, "only " + std::to_string(kept) + " kept arguments");
  c.expect(unresolved == 0, std::to_string(unresolved) + " unresolved source ids");

  sg::app::Runtime rt(config);
  const auto plan = rt.plan();
  std::set<std::string> reported;
  std::ifstream report(config.report_path);
  for (std::string line; std::getline(report, line);) {
    if (!line.empty()) reported.insert(json::parse(line).at("spec_id").get<std::string>());
  }
  std::size_t missing = 0;
  for (const auto& s : plan) missing += reported.count(s.id.value) ? 0 : 1;
  c.expect(!plan.empty() && missing == 0, std::to_string(missing) + " of " + std::to_string(plan.size()) +
                                              " specs missing from the report");
  c.note = std::to_string(graph.documents().size()) + " documents, " + std::to_string(plan.size()) + " specs, " +
           std::to_string(kept) + " kept arguments, " + std::to_string(secs).substr(0, 4) + " s for two runs";
  return c;
}

// 10 ------------------------------------------------------------------------

Checker parsers() {
  Checker c;
  const auto dir = sg::testing::fixture_dir().parent_path() / "parsers";
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const auto paragraphs = sg::ingest::parse_edited_content(read(dir / "edited_content.xml"));
  c.expect(paragraphs.size() == 2, "paragraph count " + std::to_string(paragraphs.size()));
  if (paragraphs.size() == 2) {
    c.expect(paragraphs[0].speaker_name.empty() && paragraphs[0].speaker_function.empty(), "first is unattributed");
    c.expect(paragraphs[0].text == "Port Elm Energy filed its planning application for the reformer in March.",
             "first text '" + paragraphs[0].text + "'");
    c.expect(paragraphs[1].speaker_name == "Mara Lind", "second speaker");
    c.expect(paragraphs[1].speaker_function == "Harbour Master", "second function");
    c.expect(paragraphs[1].text ==
                 "\"Tanker traffic will double once the hub runs,\" said Mara Lind, the harbour master.",
             "second text '" + paragraphs[1].text + "'");
  }

  const auto parsed = sg::mining::parse_arguments(read(dir / "argument_lines.txt"));
  using Line = sg::mining::RawArgumentLine;
  c.expect(parsed.lines.size() == 2, "kept lines " + std::to_string(parsed.lines.size()));
  if (parsed.lines.size() == 2) {
    c.expect(parsed.lines[0] == Line{"The reformer would add 120 permanent jobs in the estate", {2}}, "single source");
    c.expect(parsed.lines[1] == Line{"Capturing 95% of the CO2 is unproven at this scale", {1, 3}}, "multi source");
  }
  // The uncited claim is dropped; a refusal line among real ones is skipped, not counted.
  c.expect(parsed.dropped == 1, "dropped " + std::to_string(parsed.dropped));
  const auto dont_know = sg::mining::parse_arguments("I don't know.");
  c.expect(dont_know.lines.empty() && dont_know.dropped == 0, "lone \"I don't know.\"");
  c.note = "markup fixture and argument-line fixture";
  return c;
}

// 11 ------------------------------------------------------------------------

Checker persistence() {
  Checker c;
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 100; ++i) {
    const sg::DebateGraph g = sg::testing::random_graph(rng);
    std::stringstream out;
    sg::write_snapshot(g, out);
    const std::string bytes = out.str();
    std::stringstream in(bytes);
    const sg::DebateGraph back = sg::read_snapshot(in);
    c.expect(back == g, "graph " + std::to_string(i) + " differs after reload");
    std::stringstream again;
    sg::write_snapshot(back, again);
    c.expect(again.str() == bytes, "graph " + std::to_string(i) + " re-serializes differently");
  }
  c.note = "100 random graphs";
  return c;
}

// 12 ------------------------------------------------------------------------

Checker feedback() {
  Checker c;
  if (g_project.dir.empty()) {
    c.expect(false, "needs the end-to-end project");
    return c;
  }
  sg::app::Runtime rt(sg::app::load_config(g_project.dir / "stancegraph.json"));
  sg::app::Service service(rt, sg::app::ServiceOptions{"", false});
  const auto list = service.handle({"GET", "/api/arguments", {}, {}, ""});
  const auto& items = list.body["items"];
  c.expect(list.status == 200 && !items.empty(), "no served arguments");
  if (!c.ok()) return c;
  for (int i = 0; i < 200; ++i) {
    const std::string id = items[static_cast<std::size_t>(i) % items.size()]["id"];
    const json vote{{"relevant", i % 4 != 3}};
    const auto r = service.handle({"POST", "/api/arguments/" + id + "/feedback", {}, {}, vote.dump()});
    c.expect(r.status == 201, "vote " + std::to_string(i) + " answered " + std::to_string(r.status));
  }
  const auto summary = service.handle({"GET", "/api/feedback/summary", {}, {}, ""}).body;
  c.expect(summary["votes"] == 200 && summary["relevant"] == 150, "counts " + summary.dump());
  c.expect(summary["fraction"].is_number() && summary["fraction"].get<double>() == 0.75, "fraction " + summary.dump());
  c.note = "150 of 200 votes relevant -> " + summary["fraction"].dump();
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Checker()>>> criteria{
      {"mmr-oracle-equivalence", mmr_oracle},
      {"mmr-lambda-one-is-top-k", lambda_one},
      {"planted-diversity-sweep", planted_sweep},
      {"metric-oracles", metric_oracles},
      {"query-grid-arithmetic", query_grid},
      {"actor-fallback-tiers", actor_fallback},
      {"topic-linking", topic_linking},
      {"spectral-clustering", spectral},
      {"end-to-end-replay", end_to_end},
      {"parser-suite", parsers},
      {"snapshot-persistence", persistence},
      {"feedback-arithmetic", feedback},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Checker result;
    try {
      result = run();
    } catch (const std::exception& e) {
      result.expect(false, std::string("exception: ") + e.what());
    }
    if (result.ok()) {
      std::cout << "PASS " << name << " (" << result.note << ")\n";
    } else {
      ++failed;
      std::cout << "FAIL " << name << " (" << result.summary() << ")\n";
    }
    std::cout.flush();
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
