#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tabletop/geometry.hpp"
#include "tabletop/scene_graph.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

// Pixel boxes for every node of the graph (gripper and table included).
// Objects fully inside a closed container are flagged occluded and carry the
// container interior as their box.
struct Layout {
  std::map<NodeId, Box> boxes;
  std::set<NodeId> occluded;

  const Box& box(NodeId id) const;
  bool operator==(const Layout&) const = default;
};

Layout extract_layout(const WorldState& w);

// Container interiors are split into three placement slots; placements fill
// the leftmost free slot. Training and prediction share this rule.
std::vector<Box> container_slots(const Box& container, int wall, int floor);
Box next_free_slot(const Box& container, int wall, int floor, const Layout& l, NodeId subject,
                   NodeId gripper, NodeId container_id);

// The primitive a single-edge (or accessibility-toggle) transition performs,
// as seen by the layout and editing stages.
enum class StepRole {
  Identity,
  ApproachAbove,   // gripper gains Above over an object
  GraspDescend,    // gripper Above -> Grasp
  Lift,            // grasped object loses its On/In support edge
  TransportAbove,  // grasped object gains Above over a target
  PlaceOn,         // Above -> On while grasped
  PlaceIn,         // Above -> In while grasped
  Release,         // gripper loses its Grasp edge
  PullOpen,        // container accessibility false -> true
  PushClosed,      // container accessibility true -> false
};

const char* to_string(StepRole role);
StepRole step_role_from_string(const std::string& name);

struct TransitionStep {
  StepRole role = StepRole::Identity;
  NodeId subject = -1;           // node whose box the relation model outputs
  NodeId reference = -1;         // node whose current box forms the feature
  bool gripper_tracks = false;   // gripper box follows the subject via the carry model
  std::vector<NodeId> riders;    // contents riding rigidly with a moved container
};

// Decodes the single intentional change between two consecutive graphs.
// Throws InapplicableDelta when the pair is not a recognized primitive.
TransitionStep classify_transition(const SceneGraph& g_k, const SceneGraph& g_next);

// One recorded demonstration transition; the predictor's training unit.
struct TrainingTransition {
  SceneGraph g_from;
  Layout l_from;
  SceneGraph g_to;
  Layout l_to;
};

// Linear map [target box x,y,w,h; subject prior w,h; 1] -> subject box.
struct LinearModel {
  std::array<std::array<double, 7>, 4> coef{};
  int n_samples = 0;
  int rank = 0;
  std::array<double, 4> residual_rmse{};

  Box eval(const Box& target, int prior_w, int prior_h) const;
};

// Eq-style next-layout predictor: one least-squares model per step role plus
// a carry model that keeps the gripper tracking the grasped object.
class LayoutPredictor {
 public:
  static constexpr int kMinSamplesPerModel = 20;

  // Least-squares fit per role over the recorded transitions. Throws
  // InsufficientData when a role appears with fewer than min_samples
  // examples, or when there is nothing to fit at all.
  static LayoutPredictor fit(const std::vector<TrainingTransition>& transitions,
                             const WorldParams& params,
                             int min_samples = kMinSamplesPerModel);

  // L_{k+1} from (G_k, L_k, G_{k+1}): moved boxes come from the step's
  // model, the gripper follows via the carry model, riders translate
  // rigidly, every other box is copied bit-exactly. Boxes clamp to frame.
  Layout predict(const SceneGraph& g_k, const Layout& l_k, const SceneGraph& g_next) const;

  bool has_model(StepRole role) const { return models_.count(to_string(role)) > 0; }
  bool has_carry_model() const { return models_.count("carry") > 0; }
  const std::map<std::string, LinearModel>& models() const { return models_; }
  const std::string& training_digest() const { return training_digest_; }

  // Persistence (structured text document).
  std::string to_json_string() const;
  static LayoutPredictor from_json_string(const std::string& text);

 private:
  std::map<std::string, LinearModel> models_;
  WorldParams params_;
  std::string training_digest_;
};

// Feature target box for a classified step (slot-resolved for PlaceIn).
Box feature_target_box(const TransitionStep& step, const Layout& l_k, const SceneGraph& g_next,
                       const WorldParams& params);

}  // namespace tabletop
