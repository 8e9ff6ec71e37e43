#include "tabletop/library.hpp"

#include <algorithm>
#include <cmath>

#include "tabletop/control.hpp"
#include "tabletop/editing.hpp"
#include "tabletop/errors.hpp"
#include "tabletop/json.hpp"
#include "tabletop/render.hpp"

namespace tabletop {

std::vector<TrainingTransition> Library::training_transitions() const {
  std::vector<TrainingTransition> out;
  out.reserve(transitions.size());
  for (const TransitionRecord& t : transitions) {
    const KeyframeRecord& from = keyframes.at(t.from_keyframe);
    const KeyframeRecord& to = keyframes.at(t.to_keyframe);
    out.push_back({from.graph, from.layout, to.graph, to.layout});
  }
  return out;
}

std::vector<const LibraryEntry*> subset_by_label(const Library& lib, const std::string& label) {
  std::vector<const LibraryEntry*> out;
  for (const LibraryEntry& e : lib.entries) {
    if (e.label == label) out.push_back(&e);
  }
  std::sort(out.begin(), out.end(),
            [](const LibraryEntry* a, const LibraryEntry* b) { return a->entry_id < b->entry_id; });
  return out;
}

namespace {

Box rounded_box(double x, double y, int w, int h) {
  return Box{static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y)), w, h};
}

}  // namespace

Layout expert_targets(const WorldState& w, const SceneGraph& g_k, const SceneGraph& g_next,
                      const ExpertParams& expert) {
  Layout target = extract_layout(w);
  TransitionStep step = classify_transition(g_k, g_next);
  if (step.role == StepRole::Identity) return target;

  const Gripper& g = w.gripper;
  double palm_drop = g.h - g.bite;  // palm line sits this far above the box bottom
  Box ref = target.box(step.reference);

  auto carry_pose = [&](const Box& subject) {
    return rounded_box(subject.cx() - g.w / 2.0, subject.top() - palm_drop, g.w, g.h);
  };

  switch (step.role) {
    case StepRole::Identity:
      break;
    case StepRole::ApproachAbove:
      target.boxes[w.gripper_id] =
          rounded_box(ref.cx() - g.w / 2.0, ref.top() - expert.hover_gap - g.h, g.w, g.h);
      break;
    case StepRole::GraspDescend:
      target.boxes[w.gripper_id] = rounded_box(ref.cx() - g.w / 2.0, ref.top() - palm_drop, g.w, g.h);
      break;
    case StepRole::Release:
      target.boxes[w.gripper_id] =
          rounded_box(ref.cx() - g.w / 2.0, ref.top() - expert.retreat - palm_drop, g.w, g.h);
      break;
    case StepRole::Lift: {
      Box cur = target.box(step.subject);
      Box lifted = rounded_box(cur.x, expert.carry_top, cur.w, cur.h);
      target.boxes[step.subject] = lifted;
      target.boxes[w.gripper_id] = carry_pose(lifted);
      break;
    }
    case StepRole::TransportAbove: {
      Box cur = target.box(step.subject);
      Box hover =
          rounded_box(ref.cx() - cur.w / 2.0, ref.top() - expert.hover_gap - cur.h, cur.w, cur.h);
      target.boxes[step.subject] = hover;
      target.boxes[w.gripper_id] = carry_pose(hover);
      break;
    }
    case StepRole::PlaceOn: {
      Box cur = target.box(step.subject);
      Box placed = rounded_box(ref.cx() - cur.w / 2.0, ref.top() - cur.h, cur.w, cur.h);
      target.boxes[step.subject] = placed;
      target.boxes[w.gripper_id] = carry_pose(placed);
      break;
    }
    case StepRole::PlaceIn: {
      Box cur = target.box(step.subject);
      Box slot = next_free_slot(ref, w.params.container_wall, w.params.container_floor, target,
                                step.subject, w.gripper_id, step.reference);
      Box placed = rounded_box(slot.cx() - cur.w / 2.0, slot.bottom() - cur.h, cur.w, cur.h);
      target.boxes[step.subject] = placed;
      target.boxes[w.gripper_id] = carry_pose(placed);
      break;
    }
    case StepRole::PullOpen:
    case StepRole::PushClosed: {
      const SimObject* drawer = w.find(step.subject);
      if (!drawer) throw Error(ErrorCategory::UnknownNode, "toggle subject not in world");
      double goal_x = step.role == StepRole::PullOpen
                          ? drawer->home_x - w.params.drawer_open_dx
                          : drawer->home_x;
      Box cur = target.box(step.subject);
      Box moved = rounded_box(goal_x, cur.y, cur.w, cur.h);
      target.boxes[step.subject] = moved;
      int shift = moved.x - cur.x;
      for (NodeId rider : step.riders) {
        Box rb = target.box(rider);
        rb.x += shift;
        target.boxes[rider] = rb;
      }
      target.boxes[w.gripper_id] = carry_pose(moved);
      break;
    }
  }
  return target;
}

bool record_demo(Library& lib, int demo_id, const WorldState& start, const TaskSpec& task,
                 std::uint64_t plan_seed, const ControllerParams& ctrl,
                 const ExpertParams& expert) {
  SceneGraph g0 = parse(start, lib.thresholds);
  TransitionChain chain = plan(g0, task, plan_seed);

  WorldState world = start;
  std::vector<KeyframeRecord> keyframes;
  std::vector<TransitionRecord> transitions;

  auto snapshot = [&](int frame_id) {
    KeyframeRecord k;
    k.demo_id = demo_id;
    k.frame_id = frame_id;
    k.world = world;
    k.layout = extract_layout(world);
    k.graph = parse(world, lib.thresholds);
    k.render_hash = fnv1a_hex(render(world).bytes());
    keyframes.push_back(std::move(k));
  };
  snapshot(0);

  for (std::size_t k = 0; k < chain.steps.size(); ++k) {
    Layout target = expert_targets(world, chain.graphs[k], chain.graphs[k + 1], expert);
    ActionBuffer buf(ctrl.buffer_capacity);
    bool reached = false;
    for (int tick = 0; tick < ctrl.phase_timeout; ++tick) {
      Action a = controller(world, target, ctrl);
      world = step(world, a);
      buf.push(a);
      if (buf.full() && goal_reached(buf, ctrl.settle_delta)) {
        reached = true;
        break;
      }
    }
    if (!reached) return false;
    SceneGraph parsed = parse(world, lib.thresholds);
    if (!phase_graphs_match(parsed, chain.graphs[k + 1])) return false;
    snapshot(static_cast<int>(k) + 1);
    transitions.push_back({static_cast<int>(keyframes.size()) - 2,
                           static_cast<int>(keyframes.size()) - 1});
  }

  // The demo verified end to end; commit records and entries.
  int keyframe_base = static_cast<int>(lib.keyframes.size());
  for (KeyframeRecord& k : keyframes) lib.keyframes.push_back(std::move(k));
  for (TransitionRecord& t : transitions) {
    lib.transitions.push_back({t.from_keyframe + keyframe_base, t.to_keyframe + keyframe_base});
  }

  for (int ki = keyframe_base; ki < static_cast<int>(lib.keyframes.size()); ++ki) {
    const KeyframeRecord& kf = lib.keyframes[ki];
    Image frame = render(kf.world);
    std::map<NodeId, Mask> masks = segment(frame, kf.layout, kf.graph);
    for (const auto& [id, n] : kf.graph.nodes()) {
      if (n.is_static || id == kf.world.table_id) continue;
      if (kf.layout.occluded.count(id)) continue;
      const Mask& visible = masks.at(id);
      if (visible.empty()) continue;
      LibraryEntry e;
      e.entry_id = static_cast<int>(lib.entries.size());
      e.label = n.label;
      e.box = kf.layout.box(id);
      e.crop = frame.crop(e.box);
      e.mask = visible;
      e.demo_id = kf.demo_id;
      e.frame_id = kf.frame_id;
      lib.entries.push_back(std::move(e));
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Manifest persistence

namespace {

Json thresholds_to_json(const GeomThresholds& th) {
  return Json{{"contact_eps", th.contact_eps},
              {"overlap_tau", th.overlap_tau},
              {"near_dist", th.near_dist},
              {"above_max", th.above_max}};
}

GeomThresholds thresholds_from_json(const Json& j) {
  GeomThresholds th;
  th.contact_eps = j.value("contact_eps", th.contact_eps);
  th.overlap_tau = j.value("overlap_tau", th.overlap_tau);
  th.near_dist = j.value("near_dist", th.near_dist);
  th.above_max = j.value("above_max", th.above_max);
  return th;
}

std::string entry_crop_name(int entry_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "crops/e%06d.ppm", entry_id);
  return buf;
}

std::string entry_mask_name(int entry_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "masks/e%06d.pgm", entry_id);
  return buf;
}

}  // namespace

void save_library(const Library& lib, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "crops");
  fs::create_directories(dir / "masks");

  write_ppm(lib.background_plate, dir / "plate.ppm");

  Json manifest;
  manifest["family"] = lib.family;
  manifest["seed"] = lib.seed;
  manifest["params"] = world_params_to_json(lib.params);
  manifest["thresholds"] = thresholds_to_json(lib.thresholds);
  manifest["plate"] = Json{{"file", "plate.ppm"}, {"hash", hash_file(dir / "plate.ppm")}};

  Json entries = Json::array();
  for (const LibraryEntry& e : lib.entries) {
    fs::path crop_path = dir / entry_crop_name(e.entry_id);
    fs::path mask_path = dir / entry_mask_name(e.entry_id);
    write_ppm(e.crop, crop_path);
    write_pgm(e.mask, mask_path);
    Json je;
    je["id"] = e.entry_id;
    je["label"] = e.label;
    je["box"] = box_to_json(e.box);
    je["demo"] = e.demo_id;
    je["frame"] = e.frame_id;
    je["crop"] = entry_crop_name(e.entry_id);
    je["crop_hash"] = hash_file(crop_path);
    je["mask"] = entry_mask_name(e.entry_id);
    je["mask_hash"] = hash_file(mask_path);
    entries.push_back(je);
  }
  manifest["entries"] = entries;

  Json keyframes = Json::array();
  for (const KeyframeRecord& k : lib.keyframes) {
    Json jk;
    jk["demo"] = k.demo_id;
    jk["frame"] = k.frame_id;
    jk["world"] = world_to_json(k.world);
    jk["layout"] = layout_to_json(k.layout);
    jk["graph"] = graph_to_json(k.graph);
    jk["render_hash"] = k.render_hash;
    keyframes.push_back(jk);
  }
  manifest["keyframes"] = keyframes;

  Json transitions = Json::array();
  for (const TransitionRecord& t : lib.transitions) {
    transitions.push_back(Json::array({t.from_keyframe, t.to_keyframe}));
  }
  manifest["transitions"] = transitions;

  save_json(manifest, dir / "manifest.json");
}

Library load_library(const std::filesystem::path& dir) {
  Json manifest = load_json(dir / "manifest.json");
  Library lib;
  lib.family = manifest.at("family").get<std::string>();
  lib.seed = manifest.at("seed").get<std::uint64_t>();
  lib.params = world_params_from_json(manifest.at("params"));
  lib.thresholds = thresholds_from_json(manifest.at("thresholds"));

  const Json& plate = manifest.at("plate");
  std::filesystem::path plate_path = dir / plate.at("file").get<std::string>();
  if (hash_file(plate_path) != plate.at("hash").get<std::string>()) {
    throw Error(ErrorCategory::CorruptManifest, "plate hash mismatch");
  }
  lib.background_plate = read_ppm(plate_path);

  for (const Json& je : manifest.at("entries")) {
    LibraryEntry e;
    e.entry_id = je.at("id").get<int>();
    e.label = je.at("label").get<std::string>();
    e.box = box_from_json(je.at("box"));
    e.demo_id = je.at("demo").get<int>();
    e.frame_id = je.at("frame").get<int>();
    std::filesystem::path crop_path = dir / je.at("crop").get<std::string>();
    std::filesystem::path mask_path = dir / je.at("mask").get<std::string>();
    if (hash_file(crop_path) != je.at("crop_hash").get<std::string>() ||
        hash_file(mask_path) != je.at("mask_hash").get<std::string>()) {
      throw Error(ErrorCategory::CorruptManifest,
                  "entry " + std::to_string(e.entry_id) + " hash mismatch");
    }
    e.crop = read_ppm(crop_path);
    e.mask = read_pgm(mask_path, e.box);
    if (e.crop.width() != e.box.w || e.crop.height() != e.box.h) {
      throw Error(ErrorCategory::CorruptManifest,
                  "entry " + std::to_string(e.entry_id) + " crop dims mismatch");
    }
    lib.entries.push_back(std::move(e));
  }

  for (const Json& jk : manifest.at("keyframes")) {
    KeyframeRecord k;
    k.demo_id = jk.at("demo").get<int>();
    k.frame_id = jk.at("frame").get<int>();
    k.world = world_from_json(jk.at("world"));
    k.layout = layout_from_json(jk.at("layout"));
    k.graph = graph_from_json(jk.at("graph"));
    k.render_hash = jk.at("render_hash").get<std::string>();
    lib.keyframes.push_back(std::move(k));
  }

  for (const Json& jt : manifest.at("transitions")) {
    lib.transitions.push_back({jt.at(0).get<int>(), jt.at(1).get<int>()});
  }
  return lib;
}

}  // namespace tabletop
