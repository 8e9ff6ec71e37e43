#include "tabletop/geom_parser.hpp"

#include <algorithm>
#include <cmath>

#include "tabletop/errors.hpp"

namespace tabletop {

bool on_predicate(const Box& subject, const Box& target, const GeomThresholds& th) {
  double gap = target.top() - subject.bottom();
  if (std::abs(gap) > th.contact_eps) return false;
  int overlap = horizontal_overlap(subject, target);
  return overlap >= th.overlap_tau * std::min(subject.w, target.w);
}

bool above_predicate(const Box& subject, const Box& target, const GeomThresholds& th) {
  double gap = target.top() - subject.bottom();
  if (gap <= th.contact_eps || gap > th.above_max) return false;
  double cx = subject.cx();
  return cx >= target.left() && cx <= target.right();
}

bool in_predicate(const Box& subject, const Box& container_interior) {
  return container_interior.contains_box(subject);
}

bool next_to_predicate(const Box& a, const Box& b, const GeomThresholds& th) {
  if (!vertical_extents_overlap(a, b)) return false;
  return horizontal_gap(a, b) < th.near_dist;
}

SceneGraph parse(const WorldState& world, const GeomThresholds& th) {
  if (!world_settled(world)) {
    throw Error(ErrorCategory::UnsettledWorld, "unattached object without support");
  }
  std::vector<ObjectNode> nodes;
  nodes.push_back({world.table_id, "table", false, false, true, std::nullopt});
  nodes.push_back({world.gripper_id, "gripper", false, true, false, std::nullopt});
  std::optional<NodeId> attached;
  for (const auto& o : world.objects) {
    ObjectNode n{o.id, o.label, o.is_container, false, o.is_static, std::nullopt};
    if (o.is_container) n.accessible = world.container_accessible(o);
    nodes.push_back(n);
    if (o.attached) attached = o.id;
  }
  return parse_geometry(nodes, extract_layout(world), attached, world.table_id, world.params, th);
}

SceneGraph parse_geometry(const std::vector<ObjectNode>& nodes, const Layout& layout,
                          std::optional<NodeId> attached, NodeId table_id,
                          const WorldParams& params, const GeomThresholds& th) {
  SceneGraph g;
  for (const ObjectNode& n : nodes) g.add_node(n);
  NodeId gripper = g.gripper_id();

  auto interior_of = [&](NodeId id) {
    Box b = layout.box(id);
    return Box{b.x + params.container_wall, b.y, b.w - 2 * params.container_wall,
               b.h - params.container_floor};
  };

  // Containment first: a contained object keeps only its In edge.
  std::map<NodeId, NodeId> container_of;
  for (const ObjectNode& n : nodes) {
    if (n.is_gripper || n.id == table_id) continue;
    for (const ObjectNode& c : nodes) {
      if (!c.is_container || c.id == n.id) continue;
      if (in_predicate(layout.box(n.id), interior_of(c.id))) {
        if (!container_of.count(n.id)) container_of[n.id] = c.id;
      }
    }
  }
  for (const auto& [obj, container] : container_of) {
    g.add_edge({obj, Relation::In, container});
  }

  if (attached) g.add_edge({gripper, Relation::Grasp, *attached});

  // Gripper hover edges: Above every non-table node under its center within
  // the hover band. Containment does not block these; the claw reaches into
  // open containers.
  Box gbox = layout.box(gripper);
  for (const ObjectNode& n : nodes) {
    if (n.is_gripper || n.id == table_id) continue;
    if (attached && *attached == n.id) continue;  // Grasp wins the pair
    if (above_predicate(gbox, layout.box(n.id), th)) {
      g.add_edge({gripper, Relation::Above, n.id});
    }
  }

  // Object pairwise relations with per-pair priority On > Above (In handled
  // above; a contained subject emits nothing else).
  for (const ObjectNode& a : nodes) {
    if (a.is_gripper || a.id == table_id) continue;
    if (container_of.count(a.id)) continue;
    const Box& abox = layout.box(a.id);
    for (const ObjectNode& b : nodes) {
      if (b.id == a.id || b.is_gripper) continue;
      const Box& bbox = layout.box(b.id);
      if (on_predicate(abox, bbox, th)) {
        g.add_edge({a.id, Relation::On, b.id});
        continue;
      }
      if (b.id == table_id) continue;             // lifted objects are not "Above the table"
      if (container_of.count(b.id)) continue;     // containment subsumes the target too
      if (above_predicate(abox, bbox, th)) {
        g.add_edge({a.id, Relation::Above, b.id});
      }
    }
  }

  // NextTo for still-unrelated side-by-side pairs, canonical src < dst.
  for (const ObjectNode& a : nodes) {
    if (a.is_gripper || a.id == table_id || container_of.count(a.id)) continue;
    for (const ObjectNode& b : nodes) {
      if (b.id <= a.id || b.is_gripper || b.id == table_id || container_of.count(b.id)) continue;
      if (g.relation_between(a.id, b.id) || g.relation_between(b.id, a.id)) continue;
      if (next_to_predicate(layout.box(a.id), layout.box(b.id), th)) {
        g.add_edge({a.id, Relation::NextTo, b.id});
      }
    }
  }

  return g;
}

bool phase_graphs_match(const SceneGraph& parsed, const SceneGraph& expected) {
  auto strict_edges = [](const SceneGraph& g) {
    std::vector<Edge> out;
    for (const Edge& e : g.edges()) {
      if (e.relation != Relation::Above) out.push_back(e);
    }
    return out;
  };
  if (strict_edges(parsed) != strict_edges(expected)) return false;
  for (const Edge& e : expected.edges()) {
    if (e.relation == Relation::Above && !parsed.has_edge(e)) return false;
  }
  // Node attributes (container accessibility) must agree as well.
  for (const auto& [id, n] : expected.nodes()) {
    if (!parsed.has_node(id)) return false;
    if (parsed.node(id).accessible != n.accessible) return false;
  }
  return true;
}

}  // namespace tabletop
