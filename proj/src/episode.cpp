#include "tabletop/episode.hpp"

#include <algorithm>
#include <cmath>

#include "tabletop/errors.hpp"
#include "tabletop/geom_parser.hpp"
#include "tabletop/render.hpp"

namespace tabletop {

const char* to_string(Mode m) { return m == Mode::Seen ? "seen" : "unseen"; }

const char* to_string(PhaseVerdict v) {
  switch (v) {
    case PhaseVerdict::Success: return "success";
    case PhaseVerdict::Timeout: return "timeout";
    case PhaseVerdict::Mismatch: return "mismatch";
    case PhaseVerdict::NotAttempted: return "not_attempted";
  }
  return "?";
}

namespace {

// Seen-mode goal image: the stored keyframe depicting the target graph whose
// layout is closest to the predicted one (per-object IoU sum, ties by index).
const KeyframeRecord* retrieve_goal_frame(const Library& lib, const SceneGraph& g_next,
                                          const Layout& l_next) {
  std::uint64_t want = canonical_hash(g_next);
  const KeyframeRecord* best = nullptr;
  double best_score = -1.0;
  for (const KeyframeRecord& kf : lib.keyframes) {
    if (canonical_hash(kf.graph) != want) continue;
    double score = 0;
    for (const auto& [id, box] : l_next.boxes) {
      auto it = kf.layout.boxes.find(id);
      if (it != kf.layout.boxes.end()) score += iou(box, it->second);
    }
    if (score > best_score) {
      best_score = score;
      best = &kf;
    }
  }
  return best;
}

double masked_mse(const Image& a, const Image& b, const Mask& region,
                  const std::map<NodeId, Mask>& pasted) {
  long long count = 0;
  double acc = 0;
  auto add_pixel = [&](int x, int y) {
    Rgb ca = a.get(x, y), cb = b.get(x, y);
    double dr = double(ca.r) - cb.r, dg = double(ca.g) - cb.g, db = double(ca.b) - cb.b;
    acc += (dr * dr + dg * dg + db * db) / 3.0;
    ++count;
  };
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(a.width()) * a.height(), 0);
  for (int y = 0; y < region.box.h; ++y) {
    for (int x = 0; x < region.box.w; ++x) {
      if (region.at(x, y)) {
        seen[static_cast<std::size_t>(y) * a.width() + x] = 1;
        add_pixel(x, y);
      }
    }
  }
  for (const auto& [id, m] : pasted) {
    (void)id;
    for (int y = 0; y < m.box.h; ++y) {
      int fy = m.box.y + y;
      if (fy < 0 || fy >= a.height()) continue;
      for (int x = 0; x < m.box.w; ++x) {
        int fx = m.box.x + x;
        if (fx < 0 || fx >= a.width()) continue;
        if (!m.at(x, y)) continue;
        std::uint8_t& flag = seen[static_cast<std::size_t>(fy) * a.width() + fx];
        if (!flag) {
          flag = 1;
          add_pixel(fx, fy);
        }
      }
    }
  }
  return count ? acc / count : 0.0;
}

}  // namespace

EpisodeResult run_episode(const WorldState& start, const TaskSpec& task,
                          std::uint64_t ordering_seed, Mode mode,
                          const LayoutPredictor& predictor, const Library& lib,
                          const ControllerParams& ctrl, const EpisodeOptions& opts) {
  EpisodeResult result;
  result.family = lib.family;
  result.mode = mode;
  result.ordering_seed = ordering_seed;

  SceneGraph g0 = parse(start, lib.thresholds);
  result.chain = plan(g0, task, ordering_seed);
  result.phases_total = static_cast<int>(result.chain.steps.size());

  WorldState world = start;
  bool failed = false;

  for (std::size_t k = 0; k < result.chain.steps.size(); ++k) {
    PhaseResult phase;
    phase.index = static_cast<int>(k);
    phase.action = result.chain.steps[k].action.describe();
    if (failed) {
      phase.verdict = PhaseVerdict::NotAttempted;
      result.phases.push_back(std::move(phase));
      continue;
    }

    const SceneGraph& g_k = result.chain.graphs[k];
    const SceneGraph& g_next = result.chain.graphs[k + 1];
    Layout l_k = extract_layout(world);
    Image frame = render(world);

    // Sub-goal synthesis conditions the controller via the predicted layout;
    // seen tasks additionally pull the matching demo frame as the goal image.
    SubgoalResult subgoal = synthesize_subgoal(frame, l_k, g_k, g_next, predictor, lib);
    Image goal_image = subgoal.image;
    if (mode == Mode::Seen) {
      if (const KeyframeRecord* kf = retrieve_goal_frame(lib, g_next, subgoal.layout)) {
        goal_image = render(kf->world);
      }
    }
    if (opts.keep_goal_images) result.goal_images.push_back(goal_image);
    if (!opts.dump_dir.empty()) {
      std::filesystem::create_directories(opts.dump_dir);
      char name[64];
      std::snprintf(name, sizeof(name), "goal_%03zu.ppm", k);
      write_ppm(goal_image, opts.dump_dir / name);
    }

    ActionBuffer buf(ctrl.buffer_capacity);
    for (int tick = 0; tick < ctrl.phase_timeout; ++tick) {
      Action a = controller(world, subgoal.layout, ctrl);
      world = step(world, a);
      buf.push(a);
      if (opts.record_traces) phase.trace.push_back(a);
      phase.ticks = tick + 1;
      if (buf.full() && goal_reached(buf, ctrl.settle_delta)) {
        phase.goal_fired_tick = tick;
        break;
      }
    }

    if (phase.goal_fired_tick < 0) {
      phase.verdict = PhaseVerdict::Timeout;
      failed = true;
    } else {
      SceneGraph parsed = parse(world, lib.thresholds);
      phase.verdict = phase_graphs_match(parsed, g_next) ? PhaseVerdict::Success
                                                         : PhaseVerdict::Mismatch;
      if (phase.verdict != PhaseVerdict::Success) failed = true;
    }

    if (phase.verdict == PhaseVerdict::Success && opts.compute_fidelity) {
      Image achieved = render(world);
      Layout achieved_layout = extract_layout(world);
      SceneGraph achieved_graph = parse(world, lib.thresholds);
      std::map<NodeId, Mask> achieved_masks = segment(achieved, achieved_layout, achieved_graph);
      double iou_acc = 0;
      int iou_n = 0;
      for (const auto& [id, m] : subgoal.pasted) {
        auto it = achieved_masks.find(id);
        if (it == achieved_masks.end()) continue;
        iou_acc += mask_iou(m, it->second);
        ++iou_n;
      }
      phase.mask_iou = iou_n ? iou_acc / iou_n : -1.0;
      phase.masked_mse = masked_mse(subgoal.image, achieved, subgoal.erase_region, subgoal.pasted);
      if (!opts.dump_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof(name), "achieved_%03zu.ppm", k);
        write_ppm(achieved, opts.dump_dir / name);
      }
    }
    if (opts.record_worlds) phase.end_world = world;
    if (phase.verdict == PhaseVerdict::Success) ++result.phases_passed;
    result.phases.push_back(std::move(phase));
  }

  result.task_success = !failed && result.phases_passed == result.phases_total;
  return result;
}

Json episode_to_json(const EpisodeResult& r) {
  Json phases = Json::array();
  for (const PhaseResult& p : r.phases) {
    Json jp;
    jp["index"] = p.index;
    jp["action"] = p.action;
    jp["verdict"] = to_string(p.verdict);
    jp["ticks"] = p.ticks;
    jp["goal_fired_tick"] = p.goal_fired_tick;
    if (p.mask_iou >= 0) jp["mask_iou"] = p.mask_iou;
    if (p.masked_mse >= 0) jp["masked_mse"] = p.masked_mse;
    phases.push_back(jp);
  }
  Json j;
  j["family"] = r.family;
  j["mode"] = to_string(r.mode);
  j["placement_seed"] = r.placement_seed;
  j["ordering_seed"] = r.ordering_seed;
  j["task_success"] = r.task_success;
  j["phases_total"] = r.phases_total;
  j["phases_passed"] = r.phases_passed;
  j["phases"] = phases;
  return j;
}

}  // namespace tabletop
