#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tabletop/geom_parser.hpp"
#include "tabletop/image.hpp"
#include "tabletop/layout.hpp"
#include "tabletop/planner.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

// One demonstration reference: the cropped appearance, visible footprint and
// frame-space box of a single object at a single keyframe.
struct LibraryEntry {
  int entry_id = 0;
  std::string label;
  Image crop;
  Mask mask;  // mask.box is the frame-space box
  Box box;
  int demo_id = 0;
  int frame_id = 0;
};

// One recorded scene state: world snapshot (frames re-render
// deterministically from it), extracted layout and parsed graph.
struct KeyframeRecord {
  int demo_id = 0;
  int frame_id = 0;
  WorldState world;
  Layout layout;
  SceneGraph graph;
  std::string render_hash;
};

struct TransitionRecord {
  int from_keyframe = 0;
  int to_keyframe = 0;
};

struct Library {
  std::string family;
  std::uint64_t seed = 0;
  WorldParams params;
  GeomThresholds thresholds;
  Image background_plate;
  std::vector<LibraryEntry> entries;
  std::vector<KeyframeRecord> keyframes;
  std::vector<TransitionRecord> transitions;

  std::vector<TrainingTransition> training_transitions() const;
};

// All and only entries with the label, ascending entry_id.
std::vector<const LibraryEntry*> subset_by_label(const Library& lib, const std::string& label);

// Scripted expert poses used when recording demonstrations (pure geometry,
// no learned predictor).
struct ExpertParams {
  double hover_gap = 28;  // hover clearance above a target's top edge
  double retreat = 26;    // gripper rise after releasing
  double carry_top = 110; // top coordinate of a lifted object
};

// Target layout the scripted expert wants at the end of one chain step.
Layout expert_targets(const WorldState& w, const SceneGraph& g_k, const SceneGraph& g_next,
                      const ExpertParams& expert);

struct ControllerParams;

// Plans and executes one scripted demonstration closed-loop, appending its
// keyframes, transition records and per-object entries. Returns false when a
// phase fails to verify (the demo is then discarded by the caller).
bool record_demo(Library& lib, int demo_id, const WorldState& start, const TaskSpec& task,
                 std::uint64_t plan_seed, const ControllerParams& ctrl,
                 const ExpertParams& expert);

// Manifest persistence: manifest.json plus plate/crop/mask rasters, all
// content-hashed. save -> load round-trips to an equal library.
void save_library(const Library& lib, const std::filesystem::path& dir);
Library load_library(const std::filesystem::path& dir);

}  // namespace tabletop
