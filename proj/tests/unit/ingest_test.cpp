#include <gtest/gtest.h>

#include "fixture_provider.hpp"
#include "graph_builders.hpp"
#include "stancegraph/app/runtime.hpp"
#include "stancegraph/ingest/ingest.hpp"

namespace stancegraph::ingest {
namespace {

constexpr const char* kTwoSpeakers = R"(Sure, here is the edited document.
<edited_content>
  <p speakerName="Clara Voss" speakerFunction="Chief Executive">The hub will create
     450 jobs &amp; train &quot;apprentices&quot;.</p>
  <p speakerName="" speakerFunction="ignored">The council meets in <b>March</b>.</p>
</edited_content>
Anything else?)";

TEST(ParseMarkup, ExtractsParagraphsAndSpeakers) {
  const auto ps = parse_edited_content(kTwoSpeakers);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0], (ParsedParagraphTag{"The hub will create 450 jobs & train \"apprentices\".", "Clara Voss",
                                       "Chief Executive"}));
  // No speaker means no function either.
  EXPECT_EQ(ps[1], (ParsedParagraphTag{"The council meets in March .", "", ""}));
}

TEST(ParseMarkup, RejectsBrokenMarkup) {
  for (const char* bad : {"no block at all", "<edited_content><p>open", "<edited_content></edited_content>",
                          "<edited_content><p>a<p>b</p></p></edited_content>",
                          "<edited_content><p speakerName=x>a</p></edited_content>",
                          "<edited_content><p>   </p></edited_content>"}) {
    EXPECT_THROW(parse_edited_content(bad), MarkupError) << bad;
  }
}

TEST(ParseMarkup, IgnoresLookalikeTags) {
  const auto ps = parse_edited_content("<edited_content><pre>x</pre><p>real</p><param/></edited_content>");
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].text, "real");
}

TEST(HeuristicSplit, MergesShortBlocksForward) {
  const std::string longer(30, 'x');
  const auto segs = heuristic_split("ab\n\ncd\n\n" + longer + "\n\nz", 10);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], "ab\n\ncd\n\n" + longer + "\n\nz");

  const auto two = heuristic_split(longer + "\n\n\n" + longer + "\nsame block", 10);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[1], longer + "\nsame block");
  EXPECT_EQ(heuristic_split("short", 200), (std::vector<std::string>{"short"}));
  EXPECT_TRUE(heuristic_split(" \n\n ", 10).empty());
}

TEST(HeuristicSplit, EverySegmentLongEnoughAndNothingLost) {
  std::mt19937_64 rng(4);
  for (int round = 0; round < 100; ++round) {
    std::string content;
    std::string letters;
    for (int b = 0, n = 1 + static_cast<int>(rng() % 12); b < n; ++b) {
      const std::string block(1 + rng() % 80, static_cast<char>('a' + b));
      letters += block;
      content += block + (rng() % 2 ? "\n\n" : "\n \n\n");
    }
    const std::size_t min_len = 1 + rng() % 100;
    const auto segs = heuristic_split(content, min_len);
    std::string rebuilt;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs.size() > 1) EXPECT_GE(text::utf8_length(segs[i]), min_len);
      for (char c : segs[i]) {
        if (c != '\n') rebuilt += c;
      }
    }
    EXPECT_EQ(rebuilt, letters);
  }
}

class RejectingVerifier final : public MentionVerifier {
 public:
  bool verify(std::string_view, std::string_view alias, text::Span) const override { return alias != "NW"; }
};

TEST(Mentions, WholeWordAliasesAndVerifier) {
  const Actor nw = normalized(Actor{ActorId("nw"), "Northwind Energy", {"Northwind", "NW"}, "", {}});
  const Actor tw = normalized(Actor{ActorId("tw"), "Tidewater", {}, "", {}});
  Paragraph p;
  p.id = ParagraphId("p");
  p.text = "NW and the Tidewaters met.";
  EXPECT_EQ(detect_actor_mentions(p, {&nw, &tw}, AcceptAllVerifier{}).size(), 1u);
  EXPECT_TRUE(detect_actor_mentions(p, {&nw, &tw}, RejectingVerifier{}).empty());
  p.text = "northwind spoke.";
  EXPECT_EQ(detect_actor_mentions(p, {&nw}, RejectingVerifier{}).size(), 1u);

  Debate d = normalized(testing::sample_debate());
  p.text = "The Harbour hub plan";
  EXPECT_TRUE(detect_debate_mentions(p, d));
  p.text = "The harbourhub plan";
  EXPECT_FALSE(detect_debate_mentions(p, d));
}

llm::LlmGateway fixture_gateway(std::shared_ptr<testing::FixtureProvider> provider) {
  llm::GatewayOptions o;
  o.mode = llm::LlmMode::live;
  return llm::LlmGateway(o, llm::TemplateLibrary::load(STANCEGRAPH_TEMPLATE_DIR), provider, nullptr);
}

Document doc(const std::string& content) {
  Document d;
  d.title = "t";
  d.editor = "e";
  d.date = Date::parse("2023-05-01");
  d.content = content;
  return d;
}

TEST(ParseDocument, SpeakersThenRelations) {
  auto provider = std::make_shared<testing::FixtureProvider>();
  auto gw = fixture_gateway(provider);
  DebateGraph g(testing::sample_debate());
  g.upsert_actor({ActorId("nw"), "Northwind", {"Clara Voss"}, "", {}});
  embed::FeatureHashEmbedder embedder(32);
  Document d = doc("Clara Voss (Chief Executive): Harbour Hydrogen is good.\n\nNorthwind was mentioned here.");
  d.actor_id = ActorId("nw");
  auto prepared = prepare_document(g, d, gw, embedder);
  ASSERT_FALSE(prepared.parse.parse_failed);
  ASSERT_EQ(prepared.parse.paragraphs.size(), 2u);
  EXPECT_EQ(prepared.parse.paragraphs[0].speaker_name, "Clara Voss");
  EXPECT_EQ(prepared.embeddings.size(), 2u);

  const auto result = apply_prepared(g, prepared, AcceptAllVerifier{});
  const auto ps = g.paragraphs_of(result.document_id);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_TRUE(ps[0]->mentions_debate);
  EXPECT_FALSE(ps[1]->mentions_debate);
  const std::set<RelationEdge> expected{
      {ActorId("nw"), ps[0]->id, RelationKind::is_author},
      {ActorId("nw"), ps[1]->id, RelationKind::is_author},
      {ActorId("nw"), ps[0]->id, RelationKind::intervention},
      // The rewritten paragraph names the speaker in its text as well.
      {ActorId("nw"), ps[0]->id, RelationKind::is_mentioned_in_text},
      {ActorId("nw"), ps[1]->id, RelationKind::is_mentioned_in_text},
  };
  EXPECT_EQ(g.relations(), expected);

  // Re-preparing identical content is detected without calling the model.
  const auto before = provider->calls();
  EXPECT_TRUE(prepare_document(g, d, gw, embedder).unchanged);
  EXPECT_EQ(provider->calls(), before);
}

TEST(ParseDocument, MalformedResponsesFallBackAfterTwoAttempts) {
  auto provider = std::make_shared<testing::FixtureProvider>();
  auto gw = fixture_gateway(provider);
  IngestOptions options;
  options.min_segment_length = 5;
  const auto outcome = parse_document(doc("[garbled] first block\n\nsecond block"), gw, options);
  EXPECT_TRUE(outcome.parse_failed);
  EXPECT_EQ(outcome.attempts, 2);
  EXPECT_EQ(provider->calls(), 2u);
  ASSERT_EQ(outcome.paragraphs.size(), 2u);
  EXPECT_EQ(outcome.paragraphs[0].speaker_name, "");
}

TEST(RuntimeIngest, BatchIsAllOrNothing) {
  testing::TempDir dir;
  auto config = app::load_config(testing::copy_fixture(dir.path()));
  app::RuntimeOptions options;
  options.mode = llm::LlmMode::live;
  options.provider = std::make_shared<testing::FixtureProvider>();
  app::Runtime rt(config, options);
  std::vector<Document> batch{doc("A fine paragraph about hydrogen."), doc("Another one.")};
  batch[1].date.reset();
  EXPECT_THROW(rt.ingest_documents(batch), ValidationError);
  EXPECT_TRUE(rt.store().snapshot()->documents().empty());

  batch[1].date = Date::parse("2023-01-02");
  const auto summary = rt.ingest_documents(batch);
  EXPECT_EQ(summary.results.size(), 2u);
  EXPECT_EQ(rt.store().snapshot()->documents().size(), 2u);
}

}  // namespace
}  // namespace stancegraph::ingest
