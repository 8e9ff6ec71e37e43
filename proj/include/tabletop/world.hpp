#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tabletop/geometry.hpp"
#include "tabletop/scene_graph.hpp"

namespace tabletop {

// Shared desk geometry. Pixel units at the default 640x360 render scale.
struct WorldParams {
  int frame_w = 640;
  int frame_h = 360;
  int table_h = 40;                // table slab height; top edge at frame_h - table_h
  double max_step = 10.0;          // per-tick gripper motion cap, px
  double grasp_eps = 6.0;          // palm-to-top distance that allows attachment
  double settle_overlap_tau = 0.5; // min horizontal overlap fraction for support
  int container_wall = 6;
  int container_floor = 8;
  double drawer_open_dx = 100.0;   // leftward travel of an opened drawer
  double drawer_open_fraction = 0.8;  // displacement fraction that counts as open

  int table_top() const { return frame_h - table_h; }
};

struct SimObject {
  NodeId id = 0;
  std::string label;
  double x = 0;  // top-left, px
  double y = 0;
  int w = 0;
  int h = 0;
  bool is_container = false;
  bool is_static = false;
  bool attached = false;     // held by the gripper
  double home_x = 0;         // containers: closed-position reference (drawers)
  bool opens = false;        // true for containers that slide open (drawer)
};

enum class Grip { Open, Close, Hold };

struct Action {
  double dx = 0;
  double dy = 0;
  Grip grip = Grip::Hold;
  bool operator==(const Action&) const = default;
};

struct Gripper {
  double x = 0;
  double y = 0;
  int w = 56;
  int h = 34;
  int bite = 10;  // finger reach below the palm line
  bool closed = false;

  double palm_x() const { return x + w / 2.0; }
  double palm_y() const { return y + h - bite; }
};

// Ground-truth 2D kinematic scene. The gripper id is fixed alongside the
// object list; the table is implicit scenery owned by params.
struct WorldState {
  WorldParams params;
  NodeId table_id = 0;
  NodeId gripper_id = 1;
  Gripper gripper;
  std::vector<SimObject> objects;  // ids unique, never table/gripper ids

  const SimObject* find(NodeId id) const;
  SimObject* find(NodeId id);
  const SimObject* attached_object() const;
  Box object_box(const SimObject& o) const;
  Box gripper_box() const;
  Box table_box() const;
  Box container_interior(const SimObject& c) const;
  bool container_accessible(const SimObject& c) const;
};

// Advances the world by one capped action: move (clamped to frame), then
// apply the grip event. Close attaches the topmost clear object whose top is
// within grasp range of the palm; Open detaches and gravity-settles the
// object onto the highest support below, or into an accessible container
// interior. Never throws; infeasible motion clamps.
WorldState step(const WorldState& w, const Action& a);

// Instantly drops an object from its current x column onto its support.
// Exposed for scenario construction.
void settle_object(WorldState& w, SimObject& obj);

// True when every unattached object rests on a support (used by the parser's
// settledness precondition).
bool world_settled(const WorldState& w);

// Nodes transitively riding on `root` (settled on top of it, or inside it
// when it is a container). Used when dragging containers.
std::vector<NodeId> riders_of(const WorldState& w, NodeId root);

}  // namespace tabletop
