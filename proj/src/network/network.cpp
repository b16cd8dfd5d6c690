#include "stancegraph/network/network.hpp"

#include <fstream>

#include "stancegraph/core/error.hpp"
#include <map>
#include <set>

namespace stancegraph::network {

Stance aggregate_actor_stance(const DebateGraph& graph, const ActorId& actor) {
  int pro = 0;
  int con = 0;
  for (const auto& [id, arg] : graph.arguments()) {
    if (arg.judge_verdict == Verdict::INVALID) continue;
    auto spec = graph.query_specs().find(arg.query_spec_id);
    if (spec == graph.query_specs().end() || spec->second.family != QueryFamily::actor) continue;
    if (spec->second.actor_id != actor) continue;
    pro += arg.stance == Stance::PRO ? 1 : 0;
    con += arg.stance == Stance::CON ? 1 : 0;
  }
  if (pro > con) return Stance::PRO;
  if (con > pro) return Stance::CON;
  return Stance::NEUTRAL;
}

InfluenceGraph build_graph(const DebateGraph& graph) {
  std::map<ActorId, std::vector<const Paragraph*>> interventions;
  std::set<ActorId> present;
  for (const auto& e : graph.relations()) {
    present.insert(e.actor_id);
    if (e.kind == RelationKind::intervention) {
      if (const Paragraph* p = graph.find_paragraph(e.paragraph_id)) interventions[e.actor_id].push_back(p);
    }
  }
  InfluenceGraph out;
  for (const auto& id : present) {
    const Actor* actor = graph.find_actor(id);
    if (!actor) continue;
    ActorNode node{id, actor->canonical_name, aggregate_actor_stance(graph, id), 0};
    for (const Paragraph* p : interventions[id]) node.size_weight += p->mentions_debate ? 1 : 0;
    out.nodes.push_back(std::move(node));
  }
  for (const auto& from : out.nodes) {
    for (const auto& to : out.nodes) {
      if (from.actor_id == to.actor_id) continue;
      const Actor& target = *graph.find_actor(to.actor_id);
      int weight = 0;
      for (const Paragraph* p : interventions[from.actor_id]) weight += alias_matches(target, p->text) ? 1 : 0;
      if (weight > 0) out.edges.push_back({from.actor_id, to.actor_id, weight});
    }
  }
  return out;
}

std::string_view stance_color(Stance stance) {
  switch (stance) {
    case Stance::PRO: return "green";
    case Stance::CON: return "red";
    default: return "grey";
  }
}

json graph_to_json(const InfluenceGraph& graph) {
  json nodes = json::array();
  for (const auto& n : graph.nodes) {
    nodes.push_back({{"id", n.actor_id.value}, {"label", n.label}, {"stance", to_string(n.stance)}, {"size_weight", n.size_weight}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges) edges.push_back({{"from", e.from.value}, {"to", e.to.value}, {"weight", e.weight}});
  json colors = json::object();
  for (Stance s : {Stance::PRO, Stance::CON, Stance::NEUTRAL}) colors[std::string(to_string(s))] = stance_color(s);
  return {{"nodes", nodes}, {"edges", edges}, {"meta", {{"stance_colors", colors}}}};
}

std::string render_graph(const InfluenceGraph& graph) { return graph_to_json(graph).dump(2) + "\n"; }

void export_graph(const InfluenceGraph& graph, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write graph export '" + path.string() + "'");
  out << render_graph(graph);
  if (!out.flush()) throw Error("cannot write graph export '" + path.string() + "'");
}

}  // namespace stancegraph::network
