#include "tabletop/planner.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tabletop/errors.hpp"

namespace tabletop {

const char* to_string(SchemaName name) {
  switch (name) {
    case SchemaName::ApproachFree: return "ApproachFree";
    case SchemaName::GraspObj: return "GraspObj";
    case SchemaName::Lift: return "Lift";
    case SchemaName::Transport: return "Transport";
    case SchemaName::Place: return "Place";
    case SchemaName::Release: return "Release";
    case SchemaName::PullOpen: return "PullOpen";
    case SchemaName::PushClosed: return "PushClosed";
  }
  return "?";
}

SchemaName schema_from_string(const std::string& name) {
  for (SchemaName s : {SchemaName::ApproachFree, SchemaName::GraspObj, SchemaName::Lift,
                       SchemaName::Transport, SchemaName::Place, SchemaName::Release,
                       SchemaName::PullOpen, SchemaName::PushClosed}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCategory::IoError, "unknown schema name: " + name);
}

std::string ActionInstance::describe() const {
  std::ostringstream out;
  out << to_string(name) << "(";
  for (std::size_t i = 0; i < params.size(); ++i) out << (i ? "," : "") << params[i];
  out << ")";
  return out.str();
}

const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::Sequential: return "sequential";
    case Ordering::Flexible: return "flexible";
    case Ordering::Partial: return "partial";
  }
  return "?";
}

Ordering ordering_from_string(const std::string& name) {
  if (name == "sequential") return Ordering::Sequential;
  if (name == "flexible") return Ordering::Flexible;
  if (name == "partial") return Ordering::Partial;
  throw Error(ErrorCategory::IoError, "unknown ordering: " + name);
}

namespace {

bool gripper_edge_free(const SceneGraph& g, NodeId gripper) {
  return g.edges_from(gripper).empty();
}

bool is_clear(const SceneGraph& g, NodeId o) {
  for (const Edge& e : g.edges_to(o)) {
    if (e.relation == Relation::On) return false;
  }
  return true;
}

std::optional<NodeId> containing_container(const SceneGraph& g, NodeId o) {
  for (const Edge& e : g.edges_from(o)) {
    if (e.relation == Relation::In) return e.dst;
  }
  return std::nullopt;
}

bool accessible_if_contained(const SceneGraph& g, NodeId o) {
  auto c = containing_container(g, o);
  if (!c) return true;
  const ObjectNode& node = g.node(*c);
  return node.accessible.value_or(true);
}

SceneGraph with_accessible(const SceneGraph& g, NodeId id, bool value) {
  SceneGraph out = g;
  out.node_mut(id).accessible = value;
  return out;
}

}  // namespace

std::vector<ActionInstance> applicable_actions(const SceneGraph& g) {
  std::vector<ActionInstance> out;
  NodeId gripper = g.gripper_id();
  std::optional<Edge> grasp = g.grasped_edge();

  std::vector<NodeId> movables, targets;
  for (const auto& [id, n] : g.nodes()) {
    if (n.is_gripper) continue;
    targets.push_back(id);
    if (!n.is_static) movables.push_back(id);
  }

  if (!grasp) {
    if (gripper_edge_free(g, gripper)) {
      for (NodeId o : movables) out.push_back({SchemaName::ApproachFree, {o}});
    }
    for (const Edge& e : g.edges_from(gripper)) {
      if (e.relation != Relation::Above) continue;
      NodeId o = e.dst;
      if (g.node(o).is_static) continue;
      if (!is_clear(g, o)) continue;
      if (!accessible_if_contained(g, o)) continue;
      out.push_back({SchemaName::GraspObj, {o}});
    }
  } else {
    NodeId o = grasp->dst;
    std::optional<Edge> support = g.support_edge(o);
    bool hovering = false;
    for (const Edge& e : g.edges_from(o)) {
      if (e.relation == Relation::Above) hovering = true;
    }

    if (support) {
      out.push_back({SchemaName::Lift, {o}});
      out.push_back({SchemaName::Release, {o}});
    }
    if (!support && !hovering) {
      for (NodeId t : targets) {
        if (t == o) continue;
        if (containing_container(g, t)) continue;  // no stacking into occupied interiors
        out.push_back({SchemaName::Transport, {o, t}});
      }
    }
    if (hovering && !support) {
      for (const Edge& e : g.edges_from(o)) {
        if (e.relation == Relation::Above) out.push_back({SchemaName::Place, {o, e.dst}});
      }
    }
    const ObjectNode& node = g.node(o);
    if (node.is_container && node.accessible.has_value()) {
      if (!*node.accessible) out.push_back({SchemaName::PullOpen, {o}});
      if (*node.accessible) out.push_back({SchemaName::PushClosed, {o}});
    }
  }

  std::sort(out.begin(), out.end(), [](const ActionInstance& a, const ActionInstance& b) {
    std::string an = to_string(a.name), bn = to_string(b.name);
    if (an != bn) return an < bn;
    return a.params < b.params;
  });
  return out;
}

AppliedAction apply_action(const SceneGraph& g, const ActionInstance& a) {
  std::vector<ActionInstance> legal = applicable_actions(g);
  if (std::find(legal.begin(), legal.end(), a) == legal.end()) {
    throw Error(ErrorCategory::InapplicableDelta, "precondition fails for " + a.describe());
  }
  NodeId gripper = g.gripper_id();
  ChainStep step;
  step.action = a;

  switch (a.name) {
    case SchemaName::ApproachFree:
      step.delta = EdgeDelta::added({gripper, Relation::Above, a.params[0]});
      break;
    case SchemaName::GraspObj:
      step.delta = EdgeDelta::relabeled({gripper, Relation::Above, a.params[0]},
                                        {gripper, Relation::Grasp, a.params[0]});
      break;
    case SchemaName::Lift:
      step.delta = EdgeDelta::removed(*g.support_edge(a.params[0]));
      break;
    case SchemaName::Transport:
      step.delta = EdgeDelta::added({a.params[0], Relation::Above, a.params[1]});
      break;
    case SchemaName::Place: {
      const ObjectNode& t = g.node(a.params[1]);
      Relation settled =
          (t.is_container && t.accessible.value_or(false)) ? Relation::In : Relation::On;
      step.delta = EdgeDelta::relabeled({a.params[0], Relation::Above, a.params[1]},
                                        {a.params[0], settled, a.params[1]});
      break;
    }
    case SchemaName::Release:
      step.delta = EdgeDelta::removed({gripper, Relation::Grasp, a.params[0]});
      break;
    case SchemaName::PullOpen:
      step.toggle = {a.params[0], true};
      break;
    case SchemaName::PushClosed:
      step.toggle = {a.params[0], false};
      break;
  }

  SceneGraph result =
      step.delta ? apply_delta(g, *step.delta)
                 : with_accessible(g, step.toggle->first, step.toggle->second);
  return {std::move(step), std::move(result)};
}

bool group_satisfied(const SceneGraph& g, const GoalGroup& group) {
  if (!satisfies(g, group.edges)) return false;
  for (const auto& [node, value] : group.flags) {
    if (g.node(node).accessible != value) return false;
  }
  if (group.require_gripper_free && !g.edges_from(g.gripper_id()).empty()) return false;
  return true;
}

std::vector<int> expand_flexible(const TaskSpec& task, std::uint64_t tiebreak_seed) {
  const int n = static_cast<int>(task.goals.size());
  std::vector<std::set<int>> preds(n);
  if (task.ordering == Ordering::Partial) {
    for (const auto& [before, after] : task.dag) {
      if (before < 0 || before >= n || after < 0 || after >= n) {
        throw Error(ErrorCategory::CyclicOrdering, "dag references unknown group");
      }
      preds[after].insert(before);
    }
  }

  std::vector<int> order;
  std::vector<bool> done(n, false);
  std::uint64_t r = tiebreak_seed;
  for (int emitted = 0; emitted < n; ++emitted) {
    std::vector<int> available;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      bool ready = true;
      for (int p : preds[i]) {
        if (!done[p]) ready = false;
      }
      if (ready) available.push_back(i);
    }
    if (available.empty()) {
      throw Error(ErrorCategory::CyclicOrdering, "partial ordering contains a cycle");
    }
    std::sort(available.begin(), available.end(),
              [&](int a, int b) { return task.goals[a].name < task.goals[b].name; });
    std::uint64_t k = available.size();
    int pick = available[r % k];
    r /= k;
    done[pick] = true;
    order.push_back(pick);
  }
  return order;
}

namespace {

void check_group_consistency(const SceneGraph& g0, const GoalGroup& group) {
  std::map<std::pair<NodeId, NodeId>, Relation> pairs;
  int grasps = 0;
  for (const Edge& raw : group.edges) {
    Edge e = raw.canonical();
    if (!g0.has_node(e.src) || !g0.has_node(e.dst)) {
      throw Error(ErrorCategory::UnknownNode, "goal references a node missing from the start graph");
    }
    auto key = std::make_pair(e.src, e.dst);
    auto it = pairs.find(key);
    if (it != pairs.end() && it->second != e.relation) {
      throw Error(ErrorCategory::GoalConflict,
                  "group '" + group.name + "' requires two relations for one pair");
    }
    pairs[key] = e.relation;
    if (e.relation == Relation::Grasp) ++grasps;
  }
  if (grasps > 1) {
    throw Error(ErrorCategory::GoalConflict, "group '" + group.name + "' needs multiple grasps");
  }
  // Cycle among required vertical edges means the group is unachievable.
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& [key, rel] : pairs) {
    if (rel == Relation::Above || rel == Relation::On || rel == Relation::In) {
      adj[key.first].push_back(key.second);
    }
  }
  std::set<NodeId> open, closed;
  std::function<bool(NodeId)> dfs = [&](NodeId v) {
    open.insert(v);
    for (NodeId w : adj[v]) {
      if (open.count(w)) return true;
      if (!closed.count(w) && dfs(w)) return true;
    }
    open.erase(v);
    closed.insert(v);
    return false;
  };
  for (const auto& [v, _] : adj) {
    if (!closed.count(v) && dfs(v)) {
      throw Error(ErrorCategory::GoalConflict, "group '" + group.name + "' requires a support cycle");
    }
  }
}

struct SearchNode {
  SceneGraph graph;
  std::vector<std::pair<ChainStep, SceneGraph>> path;
};

std::vector<std::pair<ChainStep, SceneGraph>> bfs_to_group(const SceneGraph& start,
                                                           const GoalGroup& group) {
  if (group_satisfied(start, group)) return {};
  std::deque<SearchNode> queue;
  std::unordered_set<std::uint64_t> closed;
  queue.push_back({start, {}});
  closed.insert(canonical_hash(start));

  while (!queue.empty()) {
    SearchNode node = std::move(queue.front());
    queue.pop_front();
    for (const ActionInstance& a : applicable_actions(node.graph)) {
      AppliedAction applied = apply_action(node.graph, a);
      std::uint64_t h = canonical_hash(applied.result);
      if (closed.count(h)) continue;
      closed.insert(h);
      std::vector<std::pair<ChainStep, SceneGraph>> path = node.path;
      path.emplace_back(std::move(applied.step), applied.result);
      if (group_satisfied(applied.result, group)) return path;
      queue.push_back({std::move(applied.result), std::move(path)});
    }
  }
  throw Error(ErrorCategory::Unsolvable, "search exhausted without satisfying '" + group.name + "'");
}

}  // namespace

TransitionChain plan(const SceneGraph& g0, const TaskSpec& task, std::uint64_t tiebreak_seed) {
  for (const GoalGroup& group : task.goals) check_group_consistency(g0, group);

  std::vector<int> order;
  if (task.ordering == Ordering::Sequential) {
    order.resize(task.goals.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  } else {
    order = expand_flexible(task, tiebreak_seed);
  }

  TransitionChain chain;
  chain.graphs.push_back(g0);
  SceneGraph cur = g0;
  for (int idx : order) {
    auto path = bfs_to_group(cur, task.goals[idx]);
    for (auto& [step, graph] : path) {
      chain.steps.push_back(std::move(step));
      chain.graphs.push_back(graph);
      cur = std::move(graph);
    }
  }
  return chain;
}

std::vector<ChainIssue> validate_chain(const TransitionChain& chain) {
  std::vector<ChainIssue> issues;
  if (chain.graphs.size() != chain.steps.size() + 1) {
    issues.push_back({-1, "shape", "graph count must be step count + 1"});
    return issues;
  }

  for (std::size_t k = 0; k < chain.graphs.size(); ++k) {
    ValidationReport report = validate(chain.graphs[k]);
    for (const Violation& v : report) {
      issues.push_back({static_cast<int>(k), "invalid_graph", v.code + ": " + v.detail});
    }
  }

  std::map<std::uint64_t, int> seen;
  for (std::size_t k = 0; k < chain.graphs.size(); ++k) {
    std::uint64_t h = canonical_hash(chain.graphs[k]);
    auto it = seen.find(h);
    if (it != seen.end()) {
      issues.push_back({static_cast<int>(k), "repeated_state",
                        "state repeats graph " + std::to_string(it->second)});
    } else {
      seen[h] = static_cast<int>(k);
    }
  }

  for (std::size_t k = 0; k < chain.steps.size(); ++k) {
    const SceneGraph& from = chain.graphs[k];
    const SceneGraph& to = chain.graphs[k + 1];
    const ChainStep& step = chain.steps[k];
    int idx = static_cast<int>(k);

    std::vector<EdgeDelta> deltas;
    try {
      deltas = diff(from, to);
    } catch (const Error& e) {
      issues.push_back({idx, "node_set", e.what()});
      continue;
    }
    if (step.toggle) {
      if (!deltas.empty()) {
        issues.push_back({idx, "delta_count", "toggle step must not change edges"});
      }
      int changed = 0;
      for (const auto& [id, n] : from.nodes()) {
        if (to.node(id).accessible != n.accessible) ++changed;
      }
      if (changed != 1) {
        issues.push_back({idx, "toggle_count",
                          "expected exactly one accessibility change, saw " +
                              std::to_string(changed)});
      }
    } else if (deltas.size() != 1) {
      issues.push_back({idx, "delta_count",
                        "step changes " + std::to_string(deltas.size()) + " edges"});
    }

    std::vector<ActionInstance> legal = applicable_actions(from);
    if (std::find(legal.begin(), legal.end(), step.action) == legal.end()) {
      issues.push_back({idx, "precondition", step.action.describe() + " not applicable"});
    }
  }
  return issues;
}

Json task_to_json(const TaskSpec& task) {
  Json groups = Json::array();
  for (const GoalGroup& g : task.goals) {
    Json jg;
    jg["name"] = g.name;
    Json edges = Json::array();
    for (const Edge& e : g.edges) edges.push_back(edge_to_json(e));
    jg["edges"] = edges;
    if (!g.flags.empty()) {
      Json flags = Json::array();
      for (const auto& [node, value] : g.flags) {
        flags.push_back(Json{{"node", node}, {"accessible", value}});
      }
      jg["flags"] = flags;
    }
    if (g.require_gripper_free) jg["gripper_free"] = true;
    groups.push_back(jg);
  }
  Json j;
  j["ordering"] = to_string(task.ordering);
  j["groups"] = groups;
  if (!task.dag.empty()) {
    Json dag = Json::array();
    for (const auto& [a, b] : task.dag) dag.push_back(Json::array({a, b}));
    j["dag"] = dag;
  }
  j["description"] = task.description;
  return j;
}

TaskSpec task_from_json(const Json& j) {
  TaskSpec task;
  task.ordering = ordering_from_string(j.at("ordering").get<std::string>());
  for (const Json& jg : j.at("groups")) {
    GoalGroup g;
    g.name = jg.at("name").get<std::string>();
    for (const Json& je : jg.at("edges")) g.edges.push_back(edge_from_json(je));
    if (jg.contains("flags")) {
      for (const Json& jf : jg.at("flags")) {
        g.flags.emplace_back(jf.at("node").get<NodeId>(), jf.at("accessible").get<bool>());
      }
    }
    g.require_gripper_free = jg.value("gripper_free", false);
    task.goals.push_back(g);
  }
  if (j.contains("dag")) {
    for (const Json& jd : j.at("dag")) {
      task.dag.emplace_back(jd.at(0).get<int>(), jd.at(1).get<int>());
    }
  }
  task.description = j.value("description", "");
  return task;
}

Json chain_to_json(const TransitionChain& chain) {
  Json graphs = Json::array();
  for (const SceneGraph& g : chain.graphs) graphs.push_back(graph_to_json(g));
  Json steps = Json::array();
  for (const ChainStep& s : chain.steps) {
    Json js;
    js["schema"] = to_string(s.action.name);
    js["params"] = s.action.params;
    if (s.delta) js["delta"] = delta_to_json(*s.delta);
    if (s.toggle) js["toggle"] = Json{{"node", s.toggle->first}, {"accessible", s.toggle->second}};
    steps.push_back(js);
  }
  return Json{{"graphs", graphs}, {"steps", steps}};
}

TransitionChain chain_from_json(const Json& j) {
  TransitionChain chain;
  for (const Json& jg : j.at("graphs")) chain.graphs.push_back(graph_from_json(jg));
  for (const Json& js : j.at("steps")) {
    ChainStep step;
    step.action.name = schema_from_string(js.at("schema").get<std::string>());
    step.action.params = js.at("params").get<std::vector<NodeId>>();
    if (js.contains("delta")) step.delta = delta_from_json(js.at("delta"));
    if (js.contains("toggle")) {
      step.toggle = {js.at("toggle").at("node").get<NodeId>(),
                     js.at("toggle").at("accessible").get<bool>()};
    }
    chain.steps.push_back(step);
  }
  return chain;
}

}  // namespace tabletop
