#pragma once

#include <filesystem>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "stancegraph/core/graph.hpp"
#include "temp_dir.hpp"

namespace stancegraph {

// Readable gtest failure output.
inline void PrintTo(const RelationEdge& e, std::ostream* os) {
  *os << e.actor_id << " " << to_string(e.kind) << " " << e.paragraph_id;
}

}  // namespace stancegraph

namespace stancegraph::testing {

Debate sample_debate();

/// Adds a document dated `date` with one paragraph per text; returns the
/// paragraph ids in order.
std::vector<ParagraphId> add_document(DebateGraph& g, const std::string& id, const std::string& date,
                                      const std::vector<std::string>& texts,
                                      const std::optional<ActorId>& actor = std::nullopt);

/// Random but valid graph covering every entity and edge kind, with awkward
/// strings (quotes, unicode, newlines) and full-precision embeddings.
DebateGraph random_graph(std::mt19937_64& rng);

/// Actor "a" linked to `debate` debate-mentioning paragraphs, `topic`
/// topic-linked ones and `plain` others (all by mention edges).
DebateGraph tier_graph(std::size_t debate, std::size_t topic, std::size_t plain);

/// Unit vector with a 1 at `axis`.
Embedding basis(std::size_t dimension, std::size_t axis);
Embedding random_unit(std::mt19937_64& rng, std::size_t dimension);

/// The bundled replay fixture.
std::filesystem::path fixture_dir();
/// Copies the fixture inputs into `dir` and returns the config path there.
std::filesystem::path copy_fixture(const std::filesystem::path& dir);

}  // namespace stancegraph::testing
