#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tabletop/control.hpp"
#include "tabletop/editing.hpp"
#include "tabletop/library.hpp"
#include "tabletop/planner.hpp"

namespace tabletop {

enum class Mode { Seen, Unseen };
const char* to_string(Mode m);

enum class PhaseVerdict { Success, Timeout, Mismatch, NotAttempted };
const char* to_string(PhaseVerdict v);

struct PhaseResult {
  int index = 0;
  std::string action;
  PhaseVerdict verdict = PhaseVerdict::NotAttempted;
  int ticks = 0;
  int goal_fired_tick = -1;
  double mask_iou = -1.0;    // synthesized vs achieved, moved objects only
  double masked_mse = -1.0;  // inside the edited regions
  std::optional<WorldState> end_world;  // kept when recording for re-verification
  std::vector<Action> trace;            // kept when recording traces
};

struct EpisodeOptions {
  bool record_traces = false;
  bool record_worlds = false;
  bool compute_fidelity = true;
  bool keep_goal_images = false;
  std::filesystem::path dump_dir;  // non-empty: write per-phase goal/achieved frames
};

struct EpisodeResult {
  std::string family;
  Mode mode = Mode::Seen;
  std::uint64_t placement_seed = 0;
  std::uint64_t ordering_seed = 0;
  bool task_success = false;
  int phases_total = 0;
  int phases_passed = 0;
  std::vector<PhaseResult> phases;
  TransitionChain chain;
  std::vector<Image> goal_images;  // filled when keep_goal_images
};

// Plans the chain from the parsed start graph and walks it closed-loop: per
// step the sub-goal comes from the editing pipeline (unseen) or from the
// nearest matching library keyframe (seen); the controller chases the
// predicted layout until the action buffer settles, then the parser verifies
// the arrived graph. A timed-out or mismatched phase fails the episode and
// the remaining phases count as not attempted.
EpisodeResult run_episode(const WorldState& start, const TaskSpec& task,
                          std::uint64_t ordering_seed, Mode mode,
                          const LayoutPredictor& predictor, const Library& lib,
                          const ControllerParams& ctrl, const EpisodeOptions& opts = {});

Json episode_to_json(const EpisodeResult& r);

}  // namespace tabletop
