#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabletop/json.hpp"
#include "tabletop/scene_graph.hpp"

namespace tabletop {

enum class SchemaName {
  ApproachFree,  // free gripper hovers over an object
  GraspObj,      // hover turns into a grasp
  Lift,          // grasped object loses its support edge
  Transport,     // grasped free object hovers over a target
  Place,         // hover settles to On (or In for accessible containers)
  Release,       // grasp opens, object stays supported
  PullOpen,      // grasped container becomes accessible
  PushClosed,    // grasped container becomes inaccessible
};

const char* to_string(SchemaName name);
SchemaName schema_from_string(const std::string& name);

struct ActionInstance {
  SchemaName name = SchemaName::ApproachFree;
  std::vector<NodeId> params;  // [o] or [o, t]

  bool operator==(const ActionInstance&) const = default;
  std::string describe() const;
};

// One goal unit: edges that must hold, container accessibility requirements,
// and optionally a free gripper.
struct GoalGroup {
  std::string name;
  std::vector<Edge> edges;
  std::vector<std::pair<NodeId, bool>> flags;  // (container, required accessible)
  bool require_gripper_free = false;
};

enum class Ordering { Sequential, Flexible, Partial };

const char* to_string(Ordering o);
Ordering ordering_from_string(const std::string& name);

struct TaskSpec {
  Ordering ordering = Ordering::Sequential;
  std::vector<GoalGroup> goals;
  std::vector<std::pair<int, int>> dag;  // Partial only: group i before group j
  std::string description;
};

struct ChainStep {
  ActionInstance action;
  std::optional<EdgeDelta> delta;                  // edge-mutating steps
  std::optional<std::pair<NodeId, bool>> toggle;   // Pull/Push accessibility toggle
};

struct TransitionChain {
  std::vector<SceneGraph> graphs;  // N+1 states, graphs[0] == the start graph
  std::vector<ChainStep> steps;    // N transitions

  std::size_t length() const { return steps.size(); }
};

// Grounded schema instances whose preconditions hold, ordered by
// (schema name, parameter ids) for deterministic search.
std::vector<ActionInstance> applicable_actions(const SceneGraph& g);

struct AppliedAction {
  ChainStep step;
  SceneGraph result;
};

// Applies one grounded action; throws InapplicableDelta when its
// precondition does not hold in g.
AppliedAction apply_action(const SceneGraph& g, const ActionInstance& a);

bool group_satisfied(const SceneGraph& g, const GoalGroup& group);

// Valid execution order over goal groups. Seed 0 picks the lexicographically
// first choice at every step; other seeds enumerate the remaining orders
// (mixed-radix decode). Throws CyclicOrdering for an invalid Partial DAG.
std::vector<int> expand_flexible(const TaskSpec& task, std::uint64_t tiebreak_seed);

// Breadth-first search over canonical-hashed graph states, goal group by
// goal group. Minimal per group with deterministic tie-breaks. Throws
// GoalConflict for self-inconsistent groups and Unsolvable when the search
// exhausts the reachable space.
TransitionChain plan(const SceneGraph& g0, const TaskSpec& task, std::uint64_t tiebreak_seed = 0);

struct ChainIssue {
  int step = -1;  // -1 for chain-wide issues
  std::string code;
  std::string detail;
};

// Flags non-single-edge steps, precondition violations, repeated states and
// invalid intermediate graphs. Empty report = physically grounded chain.
std::vector<ChainIssue> validate_chain(const TransitionChain& chain);

Json task_to_json(const TaskSpec& task);
TaskSpec task_from_json(const Json& j);
Json chain_to_json(const TransitionChain& chain);
TransitionChain chain_from_json(const Json& j);

}  // namespace tabletop
