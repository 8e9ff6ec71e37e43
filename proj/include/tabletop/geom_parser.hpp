#pragma once

#include <optional>
#include <vector>

#include "tabletop/layout.hpp"
#include "tabletop/scene_graph.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

// Pixel thresholds for the relation predicates, at 640x360 render scale.
struct GeomThresholds {
  double contact_eps = 3.0;   // max vertical gap that still counts as contact
  double overlap_tau = 0.5;   // min horizontal overlap fraction of the smaller width
  double near_dist = 40.0;    // max horizontal gap for NextTo
  double above_max = 55.0;    // hover band ceiling; higher separations carry no edge
};

// Box-level relation predicates shared by the parser, its tests and the
// layout-consistency checks.
bool on_predicate(const Box& subject, const Box& target, const GeomThresholds& th);
bool above_predicate(const Box& subject, const Box& target, const GeomThresholds& th);
bool in_predicate(const Box& subject, const Box& container_interior);
bool next_to_predicate(const Box& a, const Box& b, const GeomThresholds& th);

// Geometric scene parsing over extracted boxes. Relations per ordered pair
// resolve with priority In > On > Above > NextTo; a contained object keeps
// only its In edge (containment subsumes its other relations); the gripper
// participates only in Grasp (from attachment) and Above edges; nothing
// relates to the gripper; nothing is Above the table.
SceneGraph parse(const WorldState& world, const GeomThresholds& th);

// Same parse over pre-extracted geometry; `attached` is the grasped node.
SceneGraph parse_geometry(const std::vector<ObjectNode>& nodes, const Layout& layout,
                          std::optional<NodeId> attached, NodeId table_id,
                          const WorldParams& params, const GeomThresholds& th);

// Phase-level graph check: Grasp/On/In/NextTo edge sets must match exactly;
// Above edges are transient hover states, so expected Above edges must be
// present in the parsed graph but extra parsed Above edges are tolerated.
bool phase_graphs_match(const SceneGraph& parsed, const SceneGraph& expected);

}  // namespace tabletop
