#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tabletop {

using NodeId = std::int32_t;

enum class Relation { Above, On, In, Grasp, NextTo };

const char* to_string(Relation r);
Relation relation_from_string(const std::string& name);

struct ObjectNode {
  NodeId id = 0;
  std::string label;
  bool is_container = false;
  bool is_gripper = false;
  bool is_static = false;                 // landmarks (table, grill, stack base)
  std::optional<bool> accessible;         // containers only; drawers toggle it

  bool operator==(const ObjectNode&) const = default;
};

struct Edge {
  NodeId src = 0;
  Relation relation = Relation::On;
  NodeId dst = 0;

  auto operator<=>(const Edge&) const = default;

  // NextTo is symmetric; stored and compared with src.id < dst.id.
  Edge canonical() const {
    if (relation == Relation::NextTo && src > dst) return Edge{dst, relation, src};
    return *this;
  }
};

enum class DeltaKind { Added, Removed, Relabeled };

const char* to_string(DeltaKind k);

struct EdgeDelta {
  DeltaKind kind = DeltaKind::Added;
  std::optional<Edge> before;
  std::optional<Edge> after;

  bool operator==(const EdgeDelta&) const = default;

  static EdgeDelta added(const Edge& e) { return {DeltaKind::Added, std::nullopt, e.canonical()}; }
  static EdgeDelta removed(const Edge& e) { return {DeltaKind::Removed, e.canonical(), std::nullopt}; }
  static EdgeDelta relabeled(const Edge& from, const Edge& to) {
    return {DeltaKind::Relabeled, from.canonical(), to.canonical()};
  }
};

struct Violation {
  std::string code;
  std::string detail;
  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

// Immutable-by-convention scene state: object nodes plus directed typed
// relation edges, at most one relation per ordered node pair.
class SceneGraph {
 public:
  SceneGraph() = default;

  void add_node(const ObjectNode& node);
  bool has_node(NodeId id) const { return nodes_.count(id) > 0; }
  const ObjectNode& node(NodeId id) const;
  ObjectNode& node_mut(NodeId id);
  const std::map<NodeId, ObjectNode>& nodes() const { return nodes_; }
  NodeId gripper_id() const;

  // Edge accessors work on canonical form (NextTo endpoint order normalized).
  void add_edge(const Edge& e);
  void remove_edge(NodeId src, NodeId dst);
  bool has_edge(const Edge& e) const;
  std::optional<Relation> relation_between(NodeId src, NodeId dst) const;
  std::vector<Edge> edges() const;  // sorted by (src, dst, relation)

  std::vector<Edge> edges_from(NodeId src) const;
  std::vector<Edge> edges_to(NodeId dst) const;
  std::optional<Edge> grasped_edge() const;           // the gripper's Grasp edge, if any
  std::optional<Edge> support_edge(NodeId id) const;  // the node's outgoing On/In edge, if any

  bool operator==(const SceneGraph&) const = default;

 private:
  std::map<NodeId, ObjectNode> nodes_;
  std::map<std::pair<NodeId, NodeId>, Relation> edges_;
};

// Applies a single delta, returning the mutated copy. Throws
// InapplicableDelta when the precondition fails and InvariantViolation when
// the result would not validate cleanly.
SceneGraph apply_delta(const SceneGraph& g, const EdgeDelta& d);

// Minimal edge-delta list turning g_a into g_b (relabels reported as one
// delta). Ordered removals-first so that replaying through apply_delta never
// passes through an invariant-violating state; within each kind sorted by
// (src, dst, relation).
std::vector<EdgeDelta> diff(const SceneGraph& g_a, const SceneGraph& g_b);

// Order-independent digest over nodes (id, label, flags) and canonical edges.
std::uint64_t canonical_hash(const SceneGraph& g);

// Lists every violated structural invariant; empty report means valid.
ValidationReport validate(const SceneGraph& g);

// True iff every goal edge is present (exact relation, NextTo canonical).
bool satisfies(const SceneGraph& g, const std::vector<Edge>& goal_edges);

}  // namespace tabletop
