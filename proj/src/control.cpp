#include "tabletop/control.hpp"

#include <algorithm>
#include <cmath>

#include "tabletop/errors.hpp"

namespace tabletop {

void ActionBuffer::push(const Action& a) {
  actions_.push_back(a);
  if (static_cast<int>(actions_.size()) > capacity_) actions_.pop_front();
}

bool goal_reached(const ActionBuffer& buf, double delta) {
  if (!buf.full()) {
    throw Error(ErrorCategory::BufferNotFull,
                "buffer holds " + std::to_string(buf.actions().size()) + " of " +
                    std::to_string(buf.capacity()));
  }
  double mean_dx = 0, mean_dy = 0;
  for (const Action& a : buf.actions()) {
    mean_dx += a.dx;
    mean_dy += a.dy;
  }
  mean_dx /= buf.actions().size();
  mean_dy /= buf.actions().size();
  for (const Action& a : buf.actions()) {
    double dev = std::max(std::abs(a.dx - mean_dx), std::abs(a.dy - mean_dy));
    if (dev >= delta) return false;
  }
  return true;
}

namespace {

bool box_met(const Box& cur, const Box& want, double tol) {
  return std::abs(cur.cx() - want.cx()) <= tol && std::abs(cur.cy() - want.cy()) <= tol;
}

Action move_toward(double err_x, double err_y, double kp, double max_step) {
  Action a;
  a.dx = std::clamp(kp * err_x, -max_step, max_step);
  a.dy = std::clamp(kp * err_y, -max_step, max_step);
  return a;
}

// Pose that puts the palm on the object's top center (what the sim's attach
// rule expects).
void grip_pose(const Gripper& g, const Box& obj, double& out_x, double& out_y) {
  out_x = obj.cx() - g.w / 2.0;
  out_y = obj.top() - (g.h - g.bite);
}

}  // namespace

Action controller(const WorldState& w, const Layout& target, const ControllerParams& params) {
  for (const auto& [id, b] : target.boxes) {
    if (b.left() < 0 || b.top() < 0 || b.right() > w.params.frame_w ||
        b.bottom() > w.params.frame_h) {
      throw Error(ErrorCategory::UnreachableTarget,
                  "target box for node " + std::to_string(id) + " leaves the frame");
    }
  }

  Layout current = extract_layout(w);
  const SimObject* held = w.attached_object();

  auto wanted = [&](NodeId id) -> const Box* {
    auto it = target.boxes.find(id);
    return it == target.boxes.end() ? nullptr : &it->second;
  };

  bool gripper_met = true;
  if (const Box* gw = wanted(w.gripper_id)) {
    gripper_met = box_met(w.gripper_box(), *gw, params.align_tol);
  }

  if (held) {
    // While holding, only the held object is actuable; anything riding on it
    // follows rigidly and everything else has to wait.
    const Box* hw = wanted(held->id);
    Box cur = w.object_box(*held);
    if (hw && !box_met(cur, *hw, params.align_tol)) {
      return move_toward(hw->cx() - cur.cx(), hw->cy() - cur.cy(), params.kp, w.params.max_step);
    }
    if (!gripper_met) {
      // The held object is placed and only the gripper still has to move, so
      // let go before retreating.
      Action a;
      a.grip = Grip::Open;
      return a;
    }
    return Action{};
  }

  // Free gripper: the first unmet object box decides what to fetch.
  for (const auto& [id, cur] : current.boxes) {
    if (id == w.gripper_id || id == w.table_id) continue;
    const Box* want = wanted(id);
    if (!want || box_met(cur, *want, params.align_tol)) continue;
    double gx, gy;
    grip_pose(w.gripper, cur, gx, gy);
    double err_x = gx - w.gripper.x;
    double err_y = gy - w.gripper.y;
    if (std::abs(err_x) <= params.align_tol && std::abs(err_y) <= params.align_tol) {
      Action a;
      a.grip = Grip::Close;
      return a;
    }
    return move_toward(err_x, err_y, params.kp, w.params.max_step);
  }

  if (!gripper_met) {
    const Box* gw = wanted(w.gripper_id);
    return move_toward(gw->cx() - w.gripper_box().cx(), gw->cy() - w.gripper_box().cy(),
                       params.kp, w.params.max_step);
  }

  if (!w.gripper.closed) {
    // Aligned over something graspable with nothing left to move: take it.
    double px = w.gripper.palm_x(), py = w.gripper.palm_y();
    for (const auto& o : w.objects) {
      if (o.is_static || o.attached) continue;
      if (px < o.x || px > o.x + o.w) continue;
      if (std::abs(o.y - py) > w.params.grasp_eps) continue;
      Action a;
      a.grip = Grip::Close;
      return a;
    }
  }
  return Action{};
}

}  // namespace tabletop
