#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stancegraph/core/graph.hpp"
#include "stancegraph/core/json_io.hpp"

namespace stancegraph::network {

struct ActorNode {
  ActorId actor_id;
  std::string label;
  Stance stance = Stance::NEUTRAL;
  int size_weight = 0;

  friend bool operator==(const ActorNode&, const ActorNode&) = default;
};

struct InfluenceEdge {
  ActorId from;
  ActorId to;
  int weight = 0;

  friend bool operator==(const InfluenceEdge&, const InfluenceEdge&) = default;
};

struct InfluenceGraph {
  std::vector<ActorNode> nodes;  ///< ascending actor id
  std::vector<InfluenceEdge> edges;  ///< ascending (from, to)
};

/// Majority of PRO vs CON over the actor's non-INVALID actor-family
/// arguments; ties and no votes give NEUTRAL.
Stance aggregate_actor_stance(const DebateGraph& graph, const ActorId& actor);

/// Nodes for actors with at least one relation. size_weight counts the
/// actor's intervention paragraphs flagged as mentioning the debate; edge
/// A->B counts A's intervention paragraphs whose text names B.
InfluenceGraph build_graph(const DebateGraph& graph);

std::string_view stance_color(Stance stance);

/// Sorted keys, two-space indent, trailing newline.
json graph_to_json(const InfluenceGraph& graph);
std::string render_graph(const InfluenceGraph& graph);
void export_graph(const InfluenceGraph& graph, const std::filesystem::path& path);

}  // namespace stancegraph::network
