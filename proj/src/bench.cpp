#include "tabletop/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "tabletop/errors.hpp"
#include "tabletop/geom_parser.hpp"
#include "tabletop/render.hpp"

namespace tabletop {

const char* to_string(Family f) {
  switch (f) {
    case Family::SequentialStack: return "sequential_stack";
    case Family::FlexiblePlace: return "flexible_place";
    case Family::HybridGrill: return "hybrid_grill";
    case Family::HybridDrawer: return "hybrid_drawer";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  for (Family f : all_families()) {
    if (name == to_string(f)) return f;
  }
  throw Error(ErrorCategory::Usage, "unknown family: " + name);
}

std::vector<Family> all_families() {
  return {Family::SequentialStack, Family::FlexiblePlace, Family::HybridGrill,
          Family::HybridDrawer};
}

std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
  std::vector<int> pool(n), out;
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::uint64_t r = seed;
  while (!pool.empty()) {
    std::uint64_t k = pool.size();
    out.push_back(pool[r % k]);
    pool.erase(pool.begin() + static_cast<long>(r % k));
    r /= k;
  }
  return out;
}

namespace {

struct RosterItem {
  NodeId id;
  std::string label;
  int w, h;
};

// Left-to-right placement inside a band with minimum separations; random
// slack spreads the items, order shuffled by the rng. Always feasible or
// throws, no rejection loop.
void place_in_band(WorldState& w, std::vector<RosterItem> items, int band_lo, int band_hi,
                   int min_gap, std::mt19937_64& rng) {
  std::shuffle(items.begin(), items.end(), rng);
  int total_w = 0;
  for (const auto& it : items) total_w += it.w;
  int needed = total_w + min_gap * (static_cast<int>(items.size()) - 1);
  int slack = band_hi - band_lo - needed;
  if (slack < 0) {
    throw Error(ErrorCategory::PlacementInfeasible,
                "band " + std::to_string(band_hi - band_lo) + "px cannot fit " +
                    std::to_string(needed) + "px of roster");
  }
  // Split the slack across the n+1 gaps.
  std::vector<double> cuts(items.size() + 1);
  double cut_sum = 0;
  for (double& c : cuts) {
    c = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    cut_sum += c;
  }
  double x = band_lo;
  for (std::size_t i = 0; i < items.size(); ++i) {
    x += slack * (cuts[i] / cut_sum);
    SimObject obj;
    obj.id = items[i].id;
    obj.label = items[i].label;
    obj.w = items[i].w;
    obj.h = items[i].h;
    obj.x = std::round(x);
    obj.y = w.params.table_top() - obj.h;
    w.objects.push_back(obj);
    x += items[i].w + min_gap;
  }
}

int jitter(std::mt19937_64& rng, int base, int spread) {
  return base + static_cast<int>(std::uniform_int_distribution<int>(-spread, spread)(rng));
}

WorldState base_world(const ScenarioConfig& cfg) {
  WorldState w;
  w.params = cfg.params;
  w.table_id = 0;
  w.gripper_id = 1;
  w.gripper.x = 292;
  w.gripper.y = 30;
  w.gripper.closed = false;
  return w;
}

SimObject make_container(NodeId id, const std::string& label, int w_, int h_, double x, int table_top,
                         bool opens) {
  SimObject c;
  c.id = id;
  c.label = label;
  c.w = w_;
  c.h = h_;
  c.x = x;
  c.y = table_top - h_;
  c.is_container = true;
  c.home_x = x;
  c.opens = opens;
  return c;
}

Edge goal_edge(NodeId src, Relation rel, NodeId dst) { return Edge{src, rel, dst}; }

}  // namespace

std::pair<WorldState, TaskSpec> generate_scenario(const ScenarioConfig& cfg) {
  std::mt19937_64 rng(cfg.placement_seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL);
  WorldState w = base_world(cfg);
  const int table_top = w.params.table_top();
  const int min_gap = static_cast<int>(cfg.thresholds.near_dist) + 14;
  TaskSpec task;

  switch (cfg.family) {
    case Family::SequentialStack: {
      SimObject base;
      base.id = 2;
      base.label = "stack_base";
      base.w = 84;
      base.h = 12;
      base.x = 360 + std::uniform_int_distribution<int>(0, 120)(rng);
      base.y = table_top - base.h;
      base.is_static = true;
      w.objects.push_back(base);

      std::vector<RosterItem> blocks;
      NodeId next_id = 3;
      for (const char* label : {"red_block", "green_block", "blue_block"}) {
        int side = jitter(rng, 36, 4);
        blocks.push_back({next_id++, label, side, side});
      }
      place_in_band(w, blocks, 30, 300, min_gap, rng);

      std::vector<int> perm = seeded_permutation(3, cfg.ordering_seed);
      std::vector<NodeId> order = {static_cast<NodeId>(3 + perm[0]),
                                   static_cast<NodeId>(3 + perm[1]),
                                   static_cast<NodeId>(3 + perm[2])};
      task.ordering = Ordering::Sequential;
      NodeId below = 2;
      for (NodeId b : order) {
        GoalGroup g;
        g.name = "layer:" + std::to_string(b);
        g.edges = {goal_edge(b, Relation::On, below)};
        task.goals.push_back(g);
        below = b;
      }
      task.description = "stack three blocks on the base in a fixed color order";
      break;
    }
    case Family::FlexiblePlace: {
      w.objects.push_back(make_container(2, "fruit_box", 156, 56,
                                         420 + std::uniform_int_distribution<int>(0, 45)(rng),
                                         table_top, false));
      std::vector<RosterItem> fruits = {
          {3, "apple", jitter(rng, 30, 3), jitter(rng, 30, 2)},
          {4, "banana", jitter(rng, 40, 3), jitter(rng, 22, 2)},
          {5, "orange", jitter(rng, 32, 3), jitter(rng, 32, 2)},
      };
      place_in_band(w, fruits, 30, 360, min_gap, rng);

      task.ordering = Ordering::Flexible;
      for (NodeId f : {3, 4, 5}) {
        GoalGroup g;
        g.name = "place:" + w.find(f)->label;
        g.edges = {goal_edge(f, Relation::In, 2)};
        task.goals.push_back(g);
      }
      task.description = "put every fruit into the box, any order";
      break;
    }
    case Family::HybridGrill: {
      SimObject grill;
      grill.id = 2;
      grill.label = "grill";
      grill.w = 140;
      grill.h = 22;
      grill.x = 330 + std::uniform_int_distribution<int>(0, 7)(rng);
      grill.y = table_top - grill.h;
      grill.is_static = true;
      w.objects.push_back(grill);
      w.objects.push_back(make_container(3, "pan", 150, 48,
                                         480 + std::uniform_int_distribution<int>(0, 8)(rng),
                                         table_top, false));
      std::vector<RosterItem> vegs = {
          {4, "eggplant", jitter(rng, 40, 3), jitter(rng, 22, 2)},
          {5, "pepper", jitter(rng, 32, 3), jitter(rng, 26, 2)},
          {6, "corn", jitter(rng, 42, 3), jitter(rng, 18, 2)},
      };
      place_in_band(w, vegs, 28, 276, min_gap, rng);

      // Vegetables are chosen flexibly (ordering seed) but each one is
      // grilled and panned before the next starts.
      std::vector<int> perm = seeded_permutation(3, cfg.ordering_seed);
      task.ordering = Ordering::Partial;
      for (int p : perm) {
        NodeId v = static_cast<NodeId>(4 + p);
        GoalGroup grill_g, pan_g;
        grill_g.name = "grill:" + w.find(v)->label;
        grill_g.edges = {goal_edge(v, Relation::On, 2)};
        pan_g.name = "pan:" + w.find(v)->label;
        pan_g.edges = {goal_edge(v, Relation::In, 3)};
        task.goals.push_back(grill_g);
        task.goals.push_back(pan_g);
      }
      for (int i = 0; i + 1 < static_cast<int>(task.goals.size()); ++i) {
        task.dag.emplace_back(i, i + 1);
      }
      task.description = "grill each vegetable, then move it to the pan";
      break;
    }
    case Family::HybridDrawer: {
      SimObject drawer = make_container(2, "drawer", 160, 58,
                                        478 + std::uniform_int_distribution<int>(0, 2)(rng),
                                        table_top, true);
      // Closed at its home pose; accessibility derives from displacement.
      w.objects.push_back(drawer);

      if (cfg.drawer_start_inside) {
        SimObject* d = w.find(2);
        Box interior = w.container_interior(*d);
        std::vector<Box> slots = container_slots(w.object_box(*d), w.params.container_wall,
                                                 w.params.container_floor);
        SimObject block;
        block.id = 3;
        block.label = "red_block";
        block.w = jitter(rng, 36, 4);
        block.h = block.w;
        block.x = std::round(slots[0].cx() - block.w / 2.0);
        block.y = interior.bottom() - block.h;
        w.objects.push_back(block);

        task.ordering = Ordering::Partial;
        GoalGroup open_g, unload_g, close_g;
        open_g.name = "open:drawer";
        open_g.flags = {{2, true}};
        unload_g.name = "unload:red_block";
        unload_g.edges = {goal_edge(3, Relation::On, 0)};
        close_g.name = "close:drawer";
        close_g.flags = {{2, false}};
        close_g.require_gripper_free = true;
        task.goals = {open_g, unload_g, close_g};
        task.dag = {{0, 1}, {1, 2}};
        task.description = "open the drawer, take the block out, close it";
        break;
      }

      std::vector<RosterItem> blocks;
      NodeId next_id = 3;
      for (const char* label : {"red_block", "green_block", "blue_block"}) {
        int side = jitter(rng, 36, 4);
        blocks.push_back({next_id++, label, side, side});
      }
      place_in_band(w, blocks, 30, 280, min_gap, rng);

      task.ordering = Ordering::Partial;
      GoalGroup open_g;
      open_g.name = "open:drawer";
      open_g.flags = {{2, true}};
      task.goals.push_back(open_g);
      for (NodeId b : {3, 4, 5}) {
        GoalGroup g;
        g.name = "store:" + w.find(b)->label;
        g.edges = {goal_edge(b, Relation::In, 2)};
        task.goals.push_back(g);
      }
      GoalGroup close_g;
      close_g.name = "close:drawer";
      close_g.flags = {{2, false}};
      close_g.require_gripper_free = true;
      task.goals.push_back(close_g);
      for (int i = 1; i <= 3; ++i) {
        task.dag.emplace_back(0, i);
        task.dag.emplace_back(i, 4);
      }
      task.description = "open the drawer, store every block, push it shut";
      break;
    }
  }
  return {std::move(w), std::move(task)};
}

Library build_family_library(Family family, int n_demos, std::uint64_t seed,
                             const WorldParams& params, const GeomThresholds& thresholds,
                             const ControllerParams& ctrl, const ExpertParams& expert,
                             bool drawer_start_inside) {
  Library lib;
  lib.family = to_string(family);
  lib.seed = seed;
  lib.params = params;
  lib.thresholds = thresholds;
  lib.background_plate = render_background_plate(params);

  for (int demo = 0; demo < n_demos; ++demo) {
    ScenarioConfig cfg;
    cfg.family = family;
    cfg.placement_seed = seed * 1000003ULL + static_cast<std::uint64_t>(demo);
    cfg.ordering_seed = 0;  // demos script the seen order
    cfg.params = params;
    cfg.thresholds = thresholds;
    cfg.drawer_start_inside = drawer_start_inside;
    auto [world, task] = generate_scenario(cfg);
    if (!record_demo(lib, demo, world, task, 0, ctrl, expert)) {
      throw Error(ErrorCategory::ScenarioInvalid,
                  "scripted demo " + std::to_string(demo) + " failed to execute");
    }
  }
  return lib;
}

Json report_to_json(const MetricsReport& report) {
  Json rows = Json::array();
  for (const BenchRow& r : report.rows) {
    Json jr;
    jr["family"] = r.family;
    jr["mode"] = r.mode;
    jr["episodes"] = r.episodes;
    jr["successes"] = r.successes;
    jr["phases_total"] = r.phases_total;
    jr["phases_passed"] = r.phases_passed;
    jr["task_success_rate"] = r.episodes ? double(r.successes) / r.episodes : -1.0;
    jr["phase_success_rate"] =
        r.phases_total ? double(r.phases_passed) / r.phases_total : -1.0;
    if (r.mean_mask_iou >= 0) jr["mean_mask_iou"] = r.mean_mask_iou;
    if (r.mean_masked_mse >= 0) jr["mean_masked_mse"] = r.mean_masked_mse;
    rows.push_back(jr);
  }
  Json j;
  j["rows"] = rows;
  j["episodes"] = report.episodes;
  j["successes"] = report.successes;
  j["phases_total"] = report.phases_total;
  j["phases_passed"] = report.phases_passed;
  if (report.episodes) {
    j["task_success_rate"] = report.task_success_rate();
    j["phase_success_rate"] = report.phase_success_rate();
  } else {
    j["rates_undefined"] = true;
  }
  return j;
}

std::string report_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "family,mode,episodes,successes,phases_total,phases_passed,task_success_rate,"
         "phase_success_rate,mean_mask_iou,mean_masked_mse\n";
  char line[256];
  for (const BenchRow& r : report.rows) {
    std::snprintf(line, sizeof(line), "%s,%s,%d,%d,%d,%d,%.6f,%.6f,%.6f,%.6f\n",
                  r.family.c_str(), r.mode.c_str(), r.episodes, r.successes, r.phases_total,
                  r.phases_passed, r.episodes ? double(r.successes) / r.episodes : -1.0,
                  r.phases_total ? double(r.phases_passed) / r.phases_total : -1.0,
                  r.mean_mask_iou, r.mean_masked_mse);
    out << line;
  }
  return out.str();
}

MetricsReport run_benchmark(const BenchConfig& cfg) {
  namespace fs = std::filesystem;
  MetricsReport report;

  for (Family family : cfg.families) {
    fs::path family_dir = cfg.out_dir / to_string(family);
    fs::path lib_dir = family_dir / "library";
    fs::path predictor_path = family_dir / "predictor.json";

    Library lib;
    LayoutPredictor predictor;
    bool have_artifacts =
        fs::exists(lib_dir / "manifest.json") && fs::exists(predictor_path);
    if (have_artifacts) {
      lib = load_library(lib_dir);
      std::ifstream in(predictor_path);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      predictor = LayoutPredictor::from_json_string(text);
    } else if (cfg.build_all) {
      lib = build_family_library(family, cfg.demos_per_family, cfg.seed, cfg.params,
                                 cfg.thresholds, cfg.ctrl, cfg.expert);
      predictor = LayoutPredictor::fit(lib.training_transitions(), cfg.params);
      save_library(lib, lib_dir);
      std::ofstream out(predictor_path);
      out << predictor.to_json_string();
    } else {
      throw Error(ErrorCategory::MissingArtifacts,
                  "no library/predictor under " + family_dir.string() +
                      " (run demo-gen/fit-layout or pass --build-all)");
    }

    for (Mode mode : {Mode::Seen, Mode::Unseen}) {
      int n_episodes = mode == Mode::Seen ? cfg.episodes_seen : cfg.episodes_unseen;
      BenchRow row;
      row.family = to_string(family);
      row.mode = to_string(mode);
      double iou_acc = 0, mse_acc = 0;
      int iou_n = 0, mse_n = 0;

      for (int e = 0; e < n_episodes; ++e) {
        ScenarioConfig scfg;
        scfg.family = family;
        scfg.params = cfg.params;
        scfg.thresholds = cfg.thresholds;
        // Placement varies per episode; demo placements used different
        // offsets of the same generator.
        scfg.placement_seed = cfg.seed * 7919ULL + 100000ULL + static_cast<std::uint64_t>(e);
        scfg.ordering_seed = mode == Mode::Seen ? 0 : 1 + (static_cast<std::uint64_t>(e) % 5);
        auto [world, task] = generate_scenario(scfg);

        EpisodeOptions opts;
        opts.compute_fidelity = true;
        if (cfg.dump_frames) {
          opts.dump_dir = family_dir / to_string(mode) / ("episode_" + std::to_string(e));
        }
        EpisodeResult result = run_episode(world, task, scfg.ordering_seed, mode, predictor, lib,
                                           cfg.ctrl, opts);
        result.placement_seed = scfg.placement_seed;

        row.episodes += 1;
        row.successes += result.task_success ? 1 : 0;
        row.phases_total += result.phases_total;
        row.phases_passed += result.phases_passed;
        for (const PhaseResult& p : result.phases) {
          if (p.mask_iou >= 0) {
            iou_acc += p.mask_iou;
            ++iou_n;
          }
          if (p.masked_mse >= 0) {
            mse_acc += p.masked_mse;
            ++mse_n;
          }
        }
        if (cfg.write_episodes) {
          fs::path ep_dir = family_dir / to_string(mode);
          fs::create_directories(ep_dir);
          save_json(episode_to_json(result),
                    ep_dir / ("episode_" + std::to_string(e) + ".json"));
        }
      }
      row.mean_mask_iou = iou_n ? iou_acc / iou_n : -1.0;
      row.mean_masked_mse = mse_n ? mse_acc / mse_n : -1.0;
      report.rows.push_back(row);
      report.episodes += row.episodes;
      report.successes += row.successes;
      report.phases_total += row.phases_total;
      report.phases_passed += row.phases_passed;
    }
  }

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    save_json(report_to_json(report), cfg.out_dir / "report.json");
    std::ofstream csv(cfg.out_dir / "report.csv");
    csv << report_to_csv(report);
  }
  return report;
}

}  // namespace tabletop
