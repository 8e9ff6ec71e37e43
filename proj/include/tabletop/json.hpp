#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tabletop/layout.hpp"
#include "tabletop/scene_graph.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

using Json = nlohmann::json;

Json parse_json(const std::string& text, const std::string& what);
Json load_json(const std::filesystem::path& path);
void save_json(const Json& j, const std::filesystem::path& path);

// Graph interchange: `nodes` (id, label, flags) and `edges` (src, relation,
// dst) arrays, edges sorted by (src, dst, relation).
Json graph_to_json(const SceneGraph& g);
SceneGraph graph_from_json(const Json& j);

Json edge_to_json(const Edge& e);
Edge edge_from_json(const Json& j);
Json delta_to_json(const EdgeDelta& d);
EdgeDelta delta_from_json(const Json& j);

Json box_to_json(const Box& b);
Box box_from_json(const Json& j);
Json layout_to_json(const Layout& l);
Layout layout_from_json(const Json& j);

Json world_params_to_json(const WorldParams& p);
WorldParams world_params_from_json(const Json& j);
Json world_to_json(const WorldState& w);
WorldState world_from_json(const Json& j);

}  // namespace tabletop
