#include "tabletop/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tabletop {

const SimObject* WorldState::find(NodeId id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

SimObject* WorldState::find(NodeId id) {
  for (auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

const SimObject* WorldState::attached_object() const {
  for (const auto& o : objects) {
    if (o.attached) return &o;
  }
  return nullptr;
}

Box WorldState::object_box(const SimObject& o) const {
  return Box{static_cast<int>(std::lround(o.x)), static_cast<int>(std::lround(o.y)), o.w, o.h};
}

Box WorldState::gripper_box() const {
  return Box{static_cast<int>(std::lround(gripper.x)), static_cast<int>(std::lround(gripper.y)),
             gripper.w, gripper.h};
}

Box WorldState::table_box() const {
  return Box{0, params.table_top(), params.frame_w, params.table_h};
}

Box WorldState::container_interior(const SimObject& c) const {
  Box b = object_box(c);
  return Box{b.x + params.container_wall, b.y, b.w - 2 * params.container_wall,
             b.h - params.container_floor};
}

bool WorldState::container_accessible(const SimObject& c) const {
  if (!c.is_container) return false;
  if (!c.opens) return true;  // boxes and pans are always open-topped
  return std::abs(c.x - c.home_x) >= params.drawer_open_fraction * params.drawer_open_dx;
}

namespace {

double overlap_len(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

bool supports_horizontally(const WorldParams& p, double sub_x, int sub_w, double sup_x, int sup_w) {
  double ov = overlap_len(sub_x, sub_x + sub_w, sup_x, sup_x + sup_w);
  return ov >= p.settle_overlap_tau * std::min(sub_w, sup_w);
}

// True when `obj` rests directly on `sup` (contact within half a pixel).
bool rests_on(const WorldParams& p, const SimObject& obj, const SimObject& sup) {
  if (std::abs((obj.y + obj.h) - sup.y) > 0.51) return false;
  return supports_horizontally(p, obj.x, obj.w, sup.x, sup.w);
}

bool inside_interior(const WorldState& w, const SimObject& obj, const SimObject& c) {
  if (!c.is_container) return false;
  Box interior = w.container_interior(c);
  return obj.x >= interior.left() - 0.51 && obj.x + obj.w <= interior.right() + 0.51 &&
         obj.y >= interior.top() - 0.51 && obj.y + obj.h <= interior.bottom() + 0.51;
}

}  // namespace

std::vector<NodeId> riders_of(const WorldState& w, NodeId root) {
  std::set<NodeId> carried{root};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& o : w.objects) {
      if (carried.count(o.id)) continue;
      for (NodeId cid : carried) {
        const SimObject* c = w.find(cid);
        if (!c) continue;
        if (rests_on(w.params, o, *c) || inside_interior(w, o, *c)) {
          carried.insert(o.id);
          grew = true;
          break;
        }
      }
    }
  }
  carried.erase(root);
  return {carried.begin(), carried.end()};
}

void settle_object(WorldState& w, SimObject& obj) {
  const WorldParams& p = w.params;
  double best_top = p.table_top();  // the table catches everything

  for (const auto& other : w.objects) {
    if (other.id == obj.id || other.attached) continue;
    if (!supports_horizontally(p, obj.x, obj.w, other.x, other.w)) continue;
    if (other.is_container && w.container_accessible(other)) continue;  // handled below
    if (other.y >= obj.y + obj.h - 0.51 && other.y < best_top) best_top = other.y;
  }

  // An accessible container whose interior spans the drop column catches the
  // object on its floor, or on top of whatever already sits inside.
  for (const auto& c : w.objects) {
    if (!c.is_container || c.id == obj.id || !w.container_accessible(c)) continue;
    Box interior = w.container_interior(c);
    if (obj.x < interior.left() || obj.x + obj.w > interior.right()) continue;
    if (obj.y + obj.h > interior.bottom() + 0.51) continue;
    double floor_top = interior.bottom();
    for (const auto& inner : w.objects) {
      if (inner.id == obj.id || inner.id == c.id || inner.attached) continue;
      if (!inside_interior(w, inner, c)) continue;
      if (!supports_horizontally(p, obj.x, obj.w, inner.x, inner.w)) continue;
      floor_top = std::min(floor_top, inner.y);
    }
    if (floor_top < best_top) best_top = floor_top;
  }

  obj.y = best_top - obj.h;
}

bool world_settled(const WorldState& w) {
  for (const auto& o : w.objects) {
    if (o.attached) continue;
    bool supported = std::abs((o.y + o.h) - w.params.table_top()) <= 0.51;
    for (const auto& other : w.objects) {
      if (supported) break;
      if (other.id == o.id) continue;
      if (rests_on(w.params, o, other)) supported = true;
      if (inside_interior(w, o, other)) supported = true;
    }
    if (!supported) return false;
  }
  return true;
}

WorldState step(const WorldState& w, const Action& a) {
  WorldState out = w;
  const WorldParams& p = out.params;

  double dx = std::clamp(a.dx, -p.max_step, p.max_step);
  double dy = std::clamp(a.dy, -p.max_step, p.max_step);

  double nx = std::clamp(out.gripper.x + dx, 0.0, static_cast<double>(p.frame_w - out.gripper.w));
  double ny = std::clamp(out.gripper.y + dy, 0.0, static_cast<double>(p.frame_h - out.gripper.h));
  double applied_dx = nx - out.gripper.x;
  double applied_dy = ny - out.gripper.y;
  out.gripper.x = nx;
  out.gripper.y = ny;

  // The held object (and anything riding on or inside it) moves rigidly.
  SimObject* held = nullptr;
  for (auto& o : out.objects) {
    if (o.attached) held = &o;
  }
  if (held) {
    std::vector<NodeId> riders = riders_of(out, held->id);
    held->x += applied_dx;
    held->y += applied_dy;
    for (NodeId rid : riders) {
      SimObject* r = out.find(rid);
      r->x += applied_dx;
      r->y += applied_dy;
    }
  }

  switch (a.grip) {
    case Grip::Hold:
      break;
    case Grip::Close: {
      if (out.gripper.closed) break;
      out.gripper.closed = true;
      if (held) break;
      // Topmost clear object whose top edge sits within grasp range of the
      // palm point, column-wise under the palm.
      double px = out.gripper.palm_x();
      double py = out.gripper.palm_y();
      SimObject* best = nullptr;
      for (auto& o : out.objects) {
        if (o.is_static) continue;
        if (px < o.x || px > o.x + o.w) continue;
        if (std::abs(o.y - py) > p.grasp_eps) continue;
        bool clear = true;
        for (const auto& other : out.objects) {
          if (other.id != o.id && rests_on(p, other, o)) clear = false;
        }
        if (!clear) continue;
        bool reachable = true;
        for (const auto& c : out.objects) {
          if (c.is_container && c.id != o.id && inside_interior(out, o, c) &&
              !out.container_accessible(c)) {
            reachable = false;
          }
        }
        if (!reachable) continue;
        if (!best || o.y < best->y || (o.y == best->y && o.id < best->id)) best = &o;
      }
      if (best) best->attached = true;
      break;
    }
    case Grip::Open: {
      out.gripper.closed = false;
      if (held) {
        held->attached = false;
        settle_object(out, *held);
      }
      break;
    }
  }
  return out;
}

}  // namespace tabletop
