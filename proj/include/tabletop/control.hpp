#pragma once

#include <deque>

#include "tabletop/layout.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

struct ControllerParams {
  double kp = 0.35;        // proportional gain toward the target box
  double align_tol = 2.0;  // center alignment tolerance, px
  int buffer_capacity = 10;
  double settle_delta = 0.5;  // FIFO spread threshold, px
  int phase_timeout = 1000;   // ticks per phase before it counts as failed
};

// FIFO of recent actions; the sub-goal counts as achieved when the spread of
// buffered motions collapses under the threshold.
class ActionBuffer {
 public:
  explicit ActionBuffer(int capacity) : capacity_(capacity) {}

  void push(const Action& a);
  bool full() const { return static_cast<int>(actions_.size()) == capacity_; }
  int capacity() const { return capacity_; }
  const std::deque<Action>& actions() const { return actions_; }
  void clear() { actions_.clear(); }

 private:
  int capacity_;
  std::deque<Action> actions_;
};

// True iff every buffered action lies within delta (L-inf over dx, dy) of the
// buffer's mean action. Throws BufferNotFull until the buffer holds B actions.
bool goal_reached(const ActionBuffer& buf, double delta);

// Proportional layout-chasing policy: drives the gripper (and whatever it
// holds) toward the first unmet target box, closing over a graspable object
// once aligned and opening when only the gripper still has to move. Pure
// function of its inputs. Throws UnreachableTarget for boxes outside the
// frame.
Action controller(const WorldState& w, const Layout& target, const ControllerParams& params);

}  // namespace tabletop
