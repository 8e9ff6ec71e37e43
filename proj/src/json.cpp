#include "tabletop/json.hpp"

#include <fstream>

#include "tabletop/errors.hpp"

namespace tabletop {

Json parse_json(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCategory::IoError, "malformed JSON in " + what);
  return j;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::IoError, "cannot open: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_json(text, path.string());
}

void save_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::IoError, "cannot open for write: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error(ErrorCategory::IoError, "write failed: " + path.string());
}

Json graph_to_json(const SceneGraph& g) {
  Json nodes = Json::array();
  for (const auto& [id, n] : g.nodes()) {
    Json jn;
    jn["id"] = id;
    jn["label"] = n.label;
    jn["is_container"] = n.is_container;
    jn["is_gripper"] = n.is_gripper;
    jn["is_static"] = n.is_static;
    if (n.accessible.has_value()) jn["accessible"] = *n.accessible;
    nodes.push_back(jn);
  }
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back(edge_to_json(e));
  return Json{{"nodes", nodes}, {"edges", edges}};
}

SceneGraph graph_from_json(const Json& j) {
  SceneGraph g;
  for (const Json& jn : j.at("nodes")) {
    ObjectNode n;
    n.id = jn.at("id").get<NodeId>();
    n.label = jn.at("label").get<std::string>();
    n.is_container = jn.value("is_container", false);
    n.is_gripper = jn.value("is_gripper", false);
    n.is_static = jn.value("is_static", false);
    if (jn.contains("accessible")) n.accessible = jn.at("accessible").get<bool>();
    g.add_node(n);
  }
  for (const Json& je : j.at("edges")) g.add_edge(edge_from_json(je));
  return g;
}

Json edge_to_json(const Edge& e) {
  return Json{{"src", e.src}, {"relation", to_string(e.relation)}, {"dst", e.dst}};
}

Edge edge_from_json(const Json& j) {
  return Edge{j.at("src").get<NodeId>(), relation_from_string(j.at("relation").get<std::string>()),
              j.at("dst").get<NodeId>()};
}

Json delta_to_json(const EdgeDelta& d) {
  Json j;
  j["kind"] = to_string(d.kind);
  if (d.before) j["before"] = edge_to_json(*d.before);
  if (d.after) j["after"] = edge_to_json(*d.after);
  return j;
}

EdgeDelta delta_from_json(const Json& j) {
  EdgeDelta d;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "Added") {
    d = EdgeDelta::added(edge_from_json(j.at("after")));
  } else if (kind == "Removed") {
    d = EdgeDelta::removed(edge_from_json(j.at("before")));
  } else if (kind == "Relabeled") {
    d = EdgeDelta::relabeled(edge_from_json(j.at("before")), edge_from_json(j.at("after")));
  } else {
    throw Error(ErrorCategory::IoError, "unknown delta kind: " + kind);
  }
  return d;
}

Json box_to_json(const Box& b) {
  return Json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

Box box_from_json(const Json& j) {
  return Box{j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(),
             j.at("h").get<int>()};
}

Json layout_to_json(const Layout& l) {
  Json boxes = Json::array();
  for (const auto& [id, b] : l.boxes) {
    Json jb = box_to_json(b);
    jb["id"] = id;
    if (l.occluded.count(id)) jb["occluded"] = true;
    boxes.push_back(jb);
  }
  return Json{{"boxes", boxes}};
}

Layout layout_from_json(const Json& j) {
  Layout l;
  for (const Json& jb : j.at("boxes")) {
    NodeId id = jb.at("id").get<NodeId>();
    l.boxes[id] = box_from_json(jb);
    if (jb.value("occluded", false)) l.occluded.insert(id);
  }
  return l;
}

Json world_params_to_json(const WorldParams& p) {
  Json j;
  j["frame_w"] = p.frame_w;
  j["frame_h"] = p.frame_h;
  j["table_h"] = p.table_h;
  j["max_step"] = p.max_step;
  j["grasp_eps"] = p.grasp_eps;
  j["settle_overlap_tau"] = p.settle_overlap_tau;
  j["container_wall"] = p.container_wall;
  j["container_floor"] = p.container_floor;
  j["drawer_open_dx"] = p.drawer_open_dx;
  j["drawer_open_fraction"] = p.drawer_open_fraction;
  return j;
}

WorldParams world_params_from_json(const Json& j) {
  WorldParams p;
  p.frame_w = j.value("frame_w", p.frame_w);
  p.frame_h = j.value("frame_h", p.frame_h);
  p.table_h = j.value("table_h", p.table_h);
  p.max_step = j.value("max_step", p.max_step);
  p.grasp_eps = j.value("grasp_eps", p.grasp_eps);
  p.settle_overlap_tau = j.value("settle_overlap_tau", p.settle_overlap_tau);
  p.container_wall = j.value("container_wall", p.container_wall);
  p.container_floor = j.value("container_floor", p.container_floor);
  p.drawer_open_dx = j.value("drawer_open_dx", p.drawer_open_dx);
  p.drawer_open_fraction = j.value("drawer_open_fraction", p.drawer_open_fraction);
  return p;
}

Json world_to_json(const WorldState& w) {
  Json j;
  j["params"] = world_params_to_json(w.params);
  j["table_id"] = w.table_id;
  j["gripper_id"] = w.gripper_id;
  j["gripper"] = Json{{"x", w.gripper.x}, {"y", w.gripper.y},     {"w", w.gripper.w},
                      {"h", w.gripper.h}, {"bite", w.gripper.bite}, {"closed", w.gripper.closed}};
  Json objects = Json::array();
  for (const auto& o : w.objects) {
    Json jo;
    jo["id"] = o.id;
    jo["label"] = o.label;
    jo["x"] = o.x;
    jo["y"] = o.y;
    jo["w"] = o.w;
    jo["h"] = o.h;
    jo["is_container"] = o.is_container;
    jo["is_static"] = o.is_static;
    jo["attached"] = o.attached;
    jo["home_x"] = o.home_x;
    jo["opens"] = o.opens;
    objects.push_back(jo);
  }
  j["objects"] = objects;
  return j;
}

WorldState world_from_json(const Json& j) {
  WorldState w;
  w.params = world_params_from_json(j.at("params"));
  w.table_id = j.at("table_id").get<NodeId>();
  w.gripper_id = j.at("gripper_id").get<NodeId>();
  const Json& jg = j.at("gripper");
  w.gripper.x = jg.at("x").get<double>();
  w.gripper.y = jg.at("y").get<double>();
  w.gripper.w = jg.at("w").get<int>();
  w.gripper.h = jg.at("h").get<int>();
  w.gripper.bite = jg.at("bite").get<int>();
  w.gripper.closed = jg.at("closed").get<bool>();
  for (const Json& jo : j.at("objects")) {
    SimObject o;
    o.id = jo.at("id").get<NodeId>();
    o.label = jo.at("label").get<std::string>();
    o.x = jo.at("x").get<double>();
    o.y = jo.at("y").get<double>();
    o.w = jo.at("w").get<int>();
    o.h = jo.at("h").get<int>();
    o.is_container = jo.at("is_container").get<bool>();
    o.is_static = jo.at("is_static").get<bool>();
    o.attached = jo.at("attached").get<bool>();
    o.home_x = jo.at("home_x").get<double>();
    o.opens = jo.at("opens").get<bool>();
    w.objects.push_back(o);
  }
  return w;
}

}  // namespace tabletop
