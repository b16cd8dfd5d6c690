#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <regex>

#include "graph_builders.hpp"
#include "oracles.hpp"
#include "stancegraph/core/error.hpp"
#include "stancegraph/eval/eval.hpp"
#include "stancegraph/network/network.hpp"

namespace stancegraph {
namespace {

// Network ------------------------------------------------------------------

const std::vector<std::string> kNames{"Ada Port", "Ben Quay", "Cy Dock", "Di Pier", "Ed Wharf"};

/// Speeches by random speakers that name random other actors.
DebateGraph speech_graph(std::mt19937_64& rng, std::size_t actors) {
  DebateGraph g(testing::sample_debate());
  for (std::size_t i = 0; i < actors; ++i) {
    g.upsert_actor({ActorId("a" + std::to_string(i)), kNames[i], {}, "", {}});
  }
  Document d;
  d.id = DocumentId("d");
  d.content = "transcript";
  d.date = Date::parse("2023-01-01");
  g.upsert_document(d);
  std::vector<Paragraph> ps;
  for (int i = 0, n = 5 + static_cast<int>(rng() % 25); i < n; ++i) {
    Paragraph p;
    p.ordinal = i;
    p.speaker_name = kNames[rng() % actors];
    p.text = "I reply to";
    for (std::size_t k = 0; k < actors; ++k) {
      if (rng() % 3 == 0) p.text += " " + kNames[k] + (rng() % 2 ? "," : "s") + " and";
    }
    if (rng() % 2) p.text += " Harbour Hydrogen";
    ps.push_back(p);
  }
  g.replace_paragraphs(d.id, ps);
  for (const Paragraph* p : g.paragraphs_of(d.id)) {
    g.set_mentions_debate(p->id, p->text.find("Harbour Hydrogen") != std::string::npos);
    for (const auto& [id, a] : g.actors()) {
      if (a.canonical_name == p->speaker_name) g.add_relation({id, p->id, RelationKind::intervention});
      if (p->text.find(a.canonical_name) != std::string::npos) {
        g.add_relation({id, p->id, RelationKind::is_mentioned_in_text});
      }
    }
  }
  return g;
}

TEST(Network, EdgesAndSizesMatchOracle) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 2 + rng() % 4;
    const DebateGraph g = speech_graph(rng, n);
    const auto net = network::build_graph(g);

    // Oracle: regex word-boundary counting over the raw paragraphs.
    std::map<std::pair<std::string, std::string>, int> edges;
    std::map<std::string, int> sizes;
    for (const auto& [pid, p] : g.paragraphs()) {
      const std::string from = "a" + std::to_string(std::find(kNames.begin(), kNames.end(), p.speaker_name) - kNames.begin());
      if (p.text.find("Harbour Hydrogen") != std::string::npos) ++sizes[from];
      for (std::size_t k = 0; k < n; ++k) {
        const std::string to = "a" + std::to_string(k);
        if (to == from) continue;
        if (std::regex_search(p.text, std::regex("\\b" + kNames[k] + "\\b", std::regex::icase))) ++edges[{from, to}];
      }
    }
    std::map<std::pair<std::string, std::string>, int> got;
    for (const auto& e : net.edges) {
      EXPECT_NE(e.from, e.to);
      EXPECT_GT(e.weight, 0);
      got[{e.from.value, e.to.value}] = e.weight;
    }
    EXPECT_EQ(got, edges);
    for (const auto& node : net.nodes) EXPECT_EQ(node.size_weight, sizes[node.actor_id.value]) << node.actor_id;
    for (std::size_t i = 1; i < net.edges.size(); ++i) {
      EXPECT_TRUE(std::tie(net.edges[i - 1].from, net.edges[i - 1].to) < std::tie(net.edges[i].from, net.edges[i].to));
    }
  }
}

TEST(Network, StanceMajorityIgnoresInvalidAndOtherFamilies) {
  DebateGraph g(testing::sample_debate());
  g.upsert_actor({ActorId("a"), "Alpha", {}, "", {}});
  const auto ids = testing::add_document(g, "d", "2023-01-01", {"Alpha talks"});
  g.add_relation({ActorId("a"), ids[0], RelationKind::is_mentioned_in_text});
  EXPECT_EQ(network::aggregate_actor_stance(g, ActorId("a")), Stance::NEUTRAL);

  auto record = [&](const QuerySpec& spec, std::vector<std::pair<Stance, Verdict>> rows) {
    std::vector<Argument> args;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Argument a;
      a.id = ArgumentId(spec.id.value + "#" + std::to_string(i + 1));
      a.text = "arg";
      a.source_paragraph_ids = {ids[0]};
      a.query_spec_id = spec.id;
      a.stance = rows[i].first;
      a.judge_verdict = rows[i].second;
      args.push_back(a);
    }
    QueryReport r;
    r.spec_id = spec.id;
    r.family = spec.family;
    g.record_query(spec, r, args);
  };
  const QuerySpec actor{QuerySpecId("actor/a"), QueryFamily::actor, std::nullopt, std::nullopt, ActorId("a"), std::nullopt, "q"};
  const QuerySpec global{QuerySpecId("global/2023/CON"), QueryFamily::global, 2023, Stance::CON, std::nullopt, std::nullopt, "q"};
  record(actor, {{Stance::PRO, Verdict::STRONG}, {Stance::CON, Verdict::WEAK}, {Stance::CON, Verdict::INVALID}});
  record(global, {{Stance::CON, Verdict::STRONG}, {Stance::CON, Verdict::STRONG}});
  EXPECT_EQ(network::aggregate_actor_stance(g, ActorId("a")), Stance::NEUTRAL);
  record(actor, {{Stance::PRO, Verdict::STRONG}, {Stance::PRO, Verdict::WEAK}, {Stance::CON, Verdict::STRONG}});
  EXPECT_EQ(network::aggregate_actor_stance(g, ActorId("a")), Stance::PRO);

  const auto net = network::build_graph(g);
  ASSERT_EQ(net.nodes.size(), 1u);
  EXPECT_EQ(net.nodes[0].stance, Stance::PRO);
  const json j = network::graph_to_json(net);
  EXPECT_EQ(j["meta"]["stance_colors"]["PRO"], "green");
  EXPECT_EQ(j["nodes"][0]["stance"], "PRO");
  EXPECT_EQ(network::render_graph(net).back(), '\n');
}

// Evaluation ---------------------------------------------------------------

TEST(Metrics, PrecisionAtK) {
  const std::set<std::string> rel{"a", "c", "e", "g"};
  const std::vector<std::string> ranked{"a", "b", "c", "d", "e"};
  EXPECT_DOUBLE_EQ(eval::precision_at_k(ranked, rel, 5), 0.6);
  EXPECT_DOUBLE_EQ(eval::precision_at_k({"a", "c", "e", "g"}, rel, 4), 1.0);
  // Only two ranks returned for k = 4: the missing ranks are misses.
  EXPECT_DOUBLE_EQ(eval::precision_at_k({"a", "c"}, rel, 4), 0.5);
  EXPECT_THROW(eval::precision_at_k(ranked, rel, 0), ValidationError);

  std::mt19937_64 rng(6);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> r;
    std::set<std::string> relevant;
    for (int i = 0, n = static_cast<int>(rng() % 30); i < n; ++i) {
      r.push_back("p" + std::to_string(i));
      if (rng() % 3 == 0) relevant.insert(r.back());
    }
    const std::size_t k = 1 + rng() % 30;
    EXPECT_DOUBLE_EQ(eval::precision_at_k(r, relevant, k), oracle::precision_at(r, relevant, k));
  }
}

TEST(Metrics, ThreeClassReportByHand) {
  // Confusion (rows gold, columns predicted):
  //   A: 5 1 0   B: 2 3 1   C: 0 1 4
  const int confusion[3][3] = {{5, 1, 0}, {2, 3, 1}, {0, 1, 4}};
  const std::vector<std::string> labels{"A", "B", "C"};
  std::vector<std::string> pred, gold;
  for (int gi = 0; gi < 3; ++gi) {
    for (int pi = 0; pi < 3; ++pi) {
      for (int n = 0; n < confusion[gi][pi]; ++n) {
        gold.push_back(labels[gi]);
        pred.push_back(labels[pi]);
      }
    }
  }
  const auto r = eval::classification_report(pred, gold, labels);
  const double p[] = {5.0 / 7, 3.0 / 5, 4.0 / 5};
  const double rc[] = {5.0 / 6, 1.0 / 2, 4.0 / 5};
  const double f[] = {10.0 / 13, 6.0 / 11, 4.0 / 5};
  const std::size_t support[] = {6, 6, 5};
  ASSERT_EQ(r.classes.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(r.classes[i].label, labels[i]);
    EXPECT_NEAR(r.classes[i].precision, p[i], 1e-12);
    EXPECT_NEAR(r.classes[i].recall, rc[i], 1e-12);
    EXPECT_NEAR(r.classes[i].f1, f[i], 1e-12);
    EXPECT_EQ(r.classes[i].support, support[i]);
  }
  EXPECT_NEAR(r.macro_precision, (p[0] + p[1] + p[2]) / 3, 1e-12);
  EXPECT_NEAR(r.macro_recall, (rc[0] + rc[1] + rc[2]) / 3, 1e-12);
  EXPECT_NEAR(r.macro_f1, (f[0] + f[1] + f[2]) / 3, 1e-12);
  EXPECT_EQ(r.total, 17u);
}

TEST(Metrics, DegenerateClassesAndErrors) {
  // A class never predicted has precision 0 rather than NaN.
  const auto r = eval::classification_report({"A", "A"}, {"A", "B"}, {"A", "B"});
  EXPECT_DOUBLE_EQ(r.classes[1].precision, 0.0);
  EXPECT_DOUBLE_EQ(r.classes[1].f1, 0.0);
  EXPECT_DOUBLE_EQ(r.classes[0].precision, 0.5);
  EXPECT_THROW(eval::classification_report({"A"}, {"A", "B"}, {"A", "B"}), ValidationError);
  EXPECT_THROW(eval::classification_report({"Z"}, {"A"}, {"A", "B"}), ValidationError);
  EXPECT_THROW(eval::judge_report({}), ValidationError);

  const auto j = eval::judge_report({{true, true}, {true, false}, {false, false}, {true, true}});
  ASSERT_EQ(j.classes.size(), 2u);
  EXPECT_EQ(j.classes[0].label, "BAD");
  EXPECT_DOUBLE_EQ(j.classes[0].precision, 1.0);
  EXPECT_DOUBLE_EQ(j.classes[0].recall, 0.5);
  EXPECT_NEAR(j.classes[1].precision, 2.0 / 3, 1e-12);
}

TEST(Metrics, MeanStdIsPopulation) {
  const auto m = eval::mean_std({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_DOUBLE_EQ(m.std, 2.0);
}

TEST(Sweep, TableShapeAndFormatting) {
  std::mt19937_64 rng(12);
  std::vector<eval::LabeledRetrievalSet> sets(3);
  for (auto& s : sets) {
    s.query = "q";
    s.query_embedding = testing::random_unit(rng, 6);
    for (int i = 0; i < 40; ++i) {
      s.candidates.push_back({"c" + std::to_string(i), "t", i % 4 == 0, testing::random_unit(rng, 6)});
    }
  }
  const auto table = eval::sweep_lambda(sets, {0.5, 0.8}, {10, 20});
  ASSERT_EQ(table.cells.size(), 2u);
  ASSERT_EQ(table.cells[0].size(), 2u);
  for (const auto& row : table.cells) {
    for (const auto& cell : row) {
      EXPECT_GE(cell.mean, 0.0);
      EXPECT_LE(cell.mean, 1.0);
      EXPECT_GE(cell.std, 0.0);
    }
  }
  const std::string text = eval::format_sweep_table(table);
  EXPECT_NE(text.find("P@10"), std::string::npos);
  EXPECT_NE(text.find("P@20"), std::string::npos);
  EXPECT_NE(text.find("\xc2\xb1"), std::string::npos);
  const json j = eval::sweep_to_json(table);
  EXPECT_TRUE(j.is_object() || j.is_array());
}

TEST(Sweep, ArithmeticOnDegenerateSets) {
  std::mt19937_64 rng(21);
  auto set_with = [&](std::size_t relevant) {
    eval::LabeledRetrievalSet s;
    s.query_embedding = testing::random_unit(rng, 4);
    for (std::size_t i = 0; i < 10; ++i) {
      s.candidates.push_back({"c" + std::to_string(i), "t", i < relevant, testing::random_unit(rng, 4)});
    }
    return s;
  };
  const auto all = eval::sweep_lambda({set_with(10)}, {0.3, 1.0}, {5, 10});
  for (const auto& row : all.cells) {
    for (const auto& cell : row) {
      EXPECT_DOUBLE_EQ(cell.mean, 1.0);
      EXPECT_DOUBLE_EQ(cell.std, 0.0);
    }
  }
  // Ten candidates per set, so P@10 is the relevant share whatever the order.
  const auto two = eval::sweep_lambda({set_with(4), set_with(8)}, {0.8}, {10});
  EXPECT_NEAR(two.cells[0][0].mean, 0.6, 1e-12);
  EXPECT_NEAR(two.cells[0][0].std, 0.2, 1e-12);
  EXPECT_THROW(eval::sweep_lambda({}, {0.8}, {10}), ValidationError);
}

TEST(Sweep, CellsAgreeWithOracleMmr) {
  std::mt19937_64 rng(77);
  std::vector<eval::LabeledRetrievalSet> sets(4);
  std::vector<std::vector<double>> per_set;
  for (auto& s : sets) {
    s.query_embedding = testing::random_unit(rng, 5);
    for (int i = 0; i < 30; ++i) {
      char id[8];
      std::snprintf(id, sizeof id, "c%02d", i);
      s.candidates.push_back({id, "t", rng() % 3 == 0, testing::random_unit(rng, 5)});
    }
    std::vector<oracle::Item> items;
    std::set<std::string> relevant;
    for (const auto& c : s.candidates) {
      items.push_back({c.id, c.embedding});
      if (c.relevant) relevant.insert(c.id);
    }
    per_set.push_back({oracle::precision_at(oracle::mmr(s.query_embedding, items, 10, 0.7), relevant, 10)});
  }
  const auto table = eval::sweep_lambda(sets, {0.7}, {10});
  double mean = 0;
  for (const auto& v : per_set) mean += v[0];
  mean /= static_cast<double>(per_set.size());
  double var = 0;
  for (const auto& v : per_set) var += (v[0] - mean) * (v[0] - mean);
  EXPECT_NEAR(table.cells[0][0].mean, mean, 1e-12);
  EXPECT_NEAR(table.cells[0][0].std, std::sqrt(var / static_cast<double>(per_set.size())), 1e-12);
}

TEST(Sweep, LoadsLabeledSetsFromJsonLines) {
  testing::TempDir dir;
  {
    std::ofstream out(dir / "sets.jsonl");
    out << R"({"query_id":"q1","query":"hydrogen jobs","candidates":[{"id":"x","text":"jobs jobs","relevant":true},{"text":"bay leak","relevant":false}]})"
        << "\n";
  }
  embed::FeatureHashEmbedder e(32);
  const auto sets = eval::load_labeled_sets(dir / "sets.jsonl", e);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].query_id, "q1");
  ASSERT_EQ(sets[0].candidates.size(), 2u);
  EXPECT_EQ(sets[0].relevant_count(), 1u);
  EXPECT_EQ(sets[0].candidates[0].embedding.size(), 32u);
  EXPECT_FALSE(sets[0].candidates[1].id.empty());
}

}  // namespace
}  // namespace stancegraph
