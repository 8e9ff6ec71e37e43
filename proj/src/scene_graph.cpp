#include "tabletop/scene_graph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "tabletop/errors.hpp"
#include "tabletop/image.hpp"

namespace tabletop {

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Above: return "Above";
    case Relation::On: return "On";
    case Relation::In: return "In";
    case Relation::Grasp: return "Grasp";
    case Relation::NextTo: return "NextTo";
  }
  return "?";
}

Relation relation_from_string(const std::string& name) {
  if (name == "Above") return Relation::Above;
  if (name == "On") return Relation::On;
  if (name == "In") return Relation::In;
  if (name == "Grasp") return Relation::Grasp;
  if (name == "NextTo") return Relation::NextTo;
  throw Error(ErrorCategory::IoError, "unknown relation name: " + name);
}

const char* to_string(DeltaKind k) {
  switch (k) {
    case DeltaKind::Added: return "Added";
    case DeltaKind::Removed: return "Removed";
    case DeltaKind::Relabeled: return "Relabeled";
  }
  return "?";
}

void SceneGraph::add_node(const ObjectNode& node) {
  if (nodes_.count(node.id)) {
    throw Error(ErrorCategory::InvariantViolation, "duplicate node id " + std::to_string(node.id));
  }
  nodes_[node.id] = node;
}

const ObjectNode& SceneGraph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCategory::UnknownNode, "node " + std::to_string(id));
  return it->second;
}

ObjectNode& SceneGraph::node_mut(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCategory::UnknownNode, "node " + std::to_string(id));
  return it->second;
}

NodeId SceneGraph::gripper_id() const {
  for (const auto& [id, n] : nodes_) {
    if (n.is_gripper) return id;
  }
  throw Error(ErrorCategory::UnknownNode, "graph has no gripper node");
}

void SceneGraph::add_edge(const Edge& e) {
  Edge c = e.canonical();
  auto key = std::make_pair(c.src, c.dst);
  if (edges_.count(key)) {
    throw Error(ErrorCategory::InvariantViolation,
                "ordered pair already holds a relation: " + std::to_string(c.src) + "->" +
                    std::to_string(c.dst));
  }
  edges_[key] = c.relation;
}

void SceneGraph::remove_edge(NodeId src, NodeId dst) {
  edges_.erase(std::make_pair(src, dst));
}

bool SceneGraph::has_edge(const Edge& e) const {
  Edge c = e.canonical();
  auto it = edges_.find(std::make_pair(c.src, c.dst));
  return it != edges_.end() && it->second == c.relation;
}

std::optional<Relation> SceneGraph::relation_between(NodeId src, NodeId dst) const {
  auto it = edges_.find(std::make_pair(src, dst));
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::vector<Edge> SceneGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto& [key, rel] : edges_) out.push_back({key.first, rel, key.second});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> SceneGraph::edges_from(NodeId src) const {
  std::vector<Edge> out;
  for (const auto& [key, rel] : edges_) {
    if (key.first == src) out.push_back({key.first, rel, key.second});
  }
  return out;
}

std::vector<Edge> SceneGraph::edges_to(NodeId dst) const {
  std::vector<Edge> out;
  for (const auto& [key, rel] : edges_) {
    if (key.second == dst) out.push_back({key.first, rel, key.second});
  }
  return out;
}

std::optional<Edge> SceneGraph::grasped_edge() const {
  for (const auto& [key, rel] : edges_) {
    if (rel == Relation::Grasp) return Edge{key.first, rel, key.second};
  }
  return std::nullopt;
}

std::optional<Edge> SceneGraph::support_edge(NodeId id) const {
  for (const auto& [key, rel] : edges_) {
    if (key.first == id && (rel == Relation::On || rel == Relation::In)) {
      return Edge{key.first, rel, key.second};
    }
  }
  return std::nullopt;
}

SceneGraph apply_delta(const SceneGraph& g, const EdgeDelta& d) {
  SceneGraph out = g;
  switch (d.kind) {
    case DeltaKind::Added: {
      if (!d.after) throw Error(ErrorCategory::InapplicableDelta, "Added delta without edge");
      Edge e = d.after->canonical();
      if (out.relation_between(e.src, e.dst)) {
        throw Error(ErrorCategory::InapplicableDelta, "edge to add already present");
      }
      out.add_edge(e);
      break;
    }
    case DeltaKind::Removed: {
      if (!d.before) throw Error(ErrorCategory::InapplicableDelta, "Removed delta without edge");
      Edge e = d.before->canonical();
      if (!out.has_edge(e)) throw Error(ErrorCategory::InapplicableDelta, "edge to remove absent");
      out.remove_edge(e.src, e.dst);
      break;
    }
    case DeltaKind::Relabeled: {
      if (!d.before || !d.after) {
        throw Error(ErrorCategory::InapplicableDelta, "Relabeled delta missing before/after");
      }
      Edge from = d.before->canonical();
      Edge to = d.after->canonical();
      if (from.src != to.src || from.dst != to.dst) {
        throw Error(ErrorCategory::InapplicableDelta, "relabel must keep the (src,dst) pair");
      }
      if (from.relation == to.relation) {
        throw Error(ErrorCategory::InapplicableDelta, "relabel must change the relation");
      }
      if (!out.has_edge(from)) throw Error(ErrorCategory::InapplicableDelta, "edge to relabel absent");
      out.remove_edge(from.src, from.dst);
      out.add_edge(to);
      break;
    }
  }
  ValidationReport report = validate(out);
  if (!report.empty()) {
    std::ostringstream msg;
    msg << "delta would break invariants:";
    for (const auto& v : report) msg << " [" << v.code << "] " << v.detail;
    throw Error(ErrorCategory::InvariantViolation, msg.str());
  }
  return out;
}

std::vector<EdgeDelta> diff(const SceneGraph& g_a, const SceneGraph& g_b) {
  if (g_a.nodes().size() != g_b.nodes().size()) {
    throw Error(ErrorCategory::NodeSetMismatch, "graphs have different node counts");
  }
  for (const auto& [id, n] : g_a.nodes()) {
    if (!g_b.has_node(id)) {
      throw Error(ErrorCategory::NodeSetMismatch, "node " + std::to_string(id) + " missing in g_b");
    }
  }

  std::vector<EdgeDelta> removed, relabeled, added;
  std::map<std::pair<NodeId, NodeId>, Relation> in_a, in_b;
  for (const Edge& e : g_a.edges()) in_a[{e.src, e.dst}] = e.relation;
  for (const Edge& e : g_b.edges()) in_b[{e.src, e.dst}] = e.relation;

  for (const auto& [pair, rel] : in_a) {
    auto it = in_b.find(pair);
    if (it == in_b.end()) {
      removed.push_back(EdgeDelta::removed({pair.first, rel, pair.second}));
    } else if (it->second != rel) {
      relabeled.push_back(EdgeDelta::relabeled({pair.first, rel, pair.second},
                                               {pair.first, it->second, pair.second}));
    }
  }
  for (const auto& [pair, rel] : in_b) {
    if (!in_a.count(pair)) added.push_back(EdgeDelta::added({pair.first, rel, pair.second}));
  }

  // Map iteration already orders by (src, dst); removals first keeps every
  // intermediate replay state valid (e.g. a Grasp never doubles up).
  std::vector<EdgeDelta> out;
  out.insert(out.end(), removed.begin(), removed.end());
  out.insert(out.end(), relabeled.begin(), relabeled.end());
  out.insert(out.end(), added.begin(), added.end());
  return out;
}

std::uint64_t canonical_hash(const SceneGraph& g) {
  std::ostringstream buf;
  for (const auto& [id, n] : g.nodes()) {
    buf << "n|" << id << "|" << n.label << "|" << n.is_container << n.is_gripper << n.is_static;
    if (n.accessible) buf << "|a" << (*n.accessible ? 1 : 0);
    buf << ";";
  }
  for (const Edge& e : g.edges()) {
    buf << "e|" << e.src << "|" << to_string(e.relation) << "|" << e.dst << ";";
  }
  std::string s = buf.str();
  return fnv1a(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

namespace {

bool has_vertical_cycle(const SceneGraph& g) {
  // Cycle check over the directed support-like relations Above/On/In.
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const Edge& e : g.edges()) {
    if (e.relation == Relation::Above || e.relation == Relation::On || e.relation == Relation::In) {
      adj[e.src].push_back(e.dst);
    }
  }
  std::map<NodeId, int> state;  // 0 new, 1 open, 2 done
  std::function<bool(NodeId)> visit = [&](NodeId v) {
    state[v] = 1;
    for (NodeId w : adj[v]) {
      if (state[w] == 1) return true;
      if (state[w] == 0 && visit(w)) return true;
    }
    state[v] = 2;
    return false;
  };
  for (const auto& [id, n] : g.nodes()) {
    (void)n;
    if (state[id] == 0 && visit(id)) return true;
  }
  return false;
}

}  // namespace

ValidationReport validate(const SceneGraph& g) {
  ValidationReport report;
  auto flag = [&](const std::string& code, const std::string& detail) {
    report.push_back({code, detail});
  };

  int gripper_count = 0;
  for (const auto& [id, n] : g.nodes()) {
    if (n.id != id) flag("node_id_mismatch", "key " + std::to_string(id));
    if (n.is_gripper) ++gripper_count;
    if (n.is_gripper && n.is_container) {
      flag("gripper_container_conflict", n.label);
    }
    if (n.accessible.has_value() && !n.is_container) {
      flag("accessible_on_non_container", n.label);
    }
    if (n.is_container && !n.accessible.has_value()) {
      flag("container_missing_accessible", n.label);
    }
  }
  if (gripper_count != 1) {
    flag("gripper_count", "expected exactly 1 gripper, found " + std::to_string(gripper_count));
  }

  int grasp_edges = 0;
  for (const Edge& e : g.edges()) {
    std::string tag = std::to_string(e.src) + "-" + to_string(e.relation) + "->" + std::to_string(e.dst);
    if (!g.has_node(e.src) || !g.has_node(e.dst)) {
      flag("dangling_edge", tag);
      continue;
    }
    if (e.src == e.dst) flag("self_edge", tag);
    if (e.relation == Relation::NextTo && e.src > e.dst) flag("nextto_not_canonical", tag);
    if (e.relation == Relation::Grasp) {
      ++grasp_edges;
      if (!g.node(e.src).is_gripper) flag("grasp_from_non_gripper", tag);
    }
  }
  if (grasp_edges > 1) flag("multi_grasp", std::to_string(grasp_edges) + " grasp edges");

  if (has_vertical_cycle(g)) flag("vertical_cycle", "Above/On/In cycle");

  return report;
}

bool satisfies(const SceneGraph& g, const std::vector<Edge>& goal_edges) {
  for (const Edge& e : goal_edges) {
    if (!g.has_node(e.src) || !g.has_node(e.dst)) {
      throw Error(ErrorCategory::UnknownNode,
                  "goal references unknown node " + std::to_string(g.has_node(e.src) ? e.dst : e.src));
    }
    if (!g.has_edge(e)) return false;
  }
  return true;
}

}  // namespace tabletop
