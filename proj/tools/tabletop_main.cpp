#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "tabletop/bench.hpp"
#include "tabletop/config.hpp"
#include "tabletop/editing.hpp"
#include "tabletop/episode.hpp"
#include "tabletop/errors.hpp"
#include "tabletop/geom_parser.hpp"
#include "tabletop/render.hpp"

using namespace tabletop;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::string resolution;
  bool dump_frames = false;
};

RunConfig resolve_config(const GlobalOpts& g) {
  RunConfig cfg;
  if (!g.config_path.empty()) cfg = load_run_config(g.config_path);
  if (!g.resolution.empty()) {
    auto cross = g.resolution.find('x');
    if (cross == std::string::npos) {
      throw Error(ErrorCategory::Usage, "--resolution expects WxH");
    }
    cfg.params.frame_w = std::stoi(g.resolution.substr(0, cross));
    cfg.params.frame_h = std::stoi(g.resolution.substr(cross + 1));
  }
  return cfg;
}

LayoutPredictor load_predictor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::MissingArtifacts, "no predictor at " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return LayoutPredictor::from_json_string(text);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::IoError, "cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabletop: scene-graph planning, sub-goal image synthesis and closed-loop "
               "execution in a deterministic 2D desk world"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--resolution", g.resolution, "frame size WxH (default 640x360)");
  app.add_flag("--dump-frames", g.dump_frames, "write per-step renders");

  auto* demo_gen = app.add_subcommand("demo-gen", "build a demonstration library");
  std::string dg_family = "flexible_place";
  int dg_demos = -1;
  bool dg_drawer_inside = false;
  demo_gen->add_option("--family", dg_family, "task family");
  demo_gen->add_option("--demos", dg_demos, "demo count (default from config)");
  demo_gen->add_flag("--drawer-start-inside", dg_drawer_inside,
                     "drawer variant: block starts inside the closed drawer");

  auto* fit_cmd = app.add_subcommand("fit-layout", "train the layout predictor from a library");
  std::string fit_lib, fit_out;
  fit_cmd->add_option("--library", fit_lib, "library directory")->required();
  fit_cmd->add_option("--out-file", fit_out, "predictor output path");

  auto* plan_cmd = app.add_subcommand("plan", "plan a transition chain for a task");
  std::string plan_task, plan_init, plan_out;
  std::uint64_t plan_order_seed = 0;
  plan_cmd->add_option("--task", plan_task, "TaskSpec JSON")->required();
  plan_cmd->add_option("--init", plan_init, "initial scene graph JSON")->required();
  plan_cmd->add_option("--out-file", plan_out, "chain output path");
  plan_cmd->add_option("--ordering-seed", plan_order_seed, "flexible-order tie-break seed");

  auto* validate_cmd = app.add_subcommand("validate", "check a chain file");
  std::string validate_chain_path;
  validate_cmd->add_option("--chain", validate_chain_path, "chain JSON")->required();

  auto* rg = app.add_subcommand("render-goal", "open-loop sub-goal image synthesis for a chain");
  std::string rg_family = "flexible_place", rg_library, rg_predictor;
  std::uint64_t rg_pseed = 0, rg_oseed = 0;
  int rg_steps = -1;
  rg->add_option("--family", rg_family, "task family");
  rg->add_option("--library", rg_library, "library directory")->required();
  rg->add_option("--predictor", rg_predictor, "predictor JSON")->required();
  rg->add_option("--placement-seed", rg_pseed, "world placement seed");
  rg->add_option("--ordering-seed", rg_oseed, "task ordering seed (0 = demo order)");
  rg->add_option("--steps", rg_steps, "limit synthesized steps");

  auto* run_cmd = app.add_subcommand("run", "run one closed-loop episode");
  std::string run_family = "flexible_place", run_library, run_predictor, run_mode = "seen";
  std::uint64_t run_pseed = 0, run_oseed = 0;
  run_cmd->add_option("--family", run_family, "task family");
  run_cmd->add_option("--library", run_library, "library directory")->required();
  run_cmd->add_option("--predictor", run_predictor, "predictor JSON")->required();
  run_cmd->add_option("--mode", run_mode, "seen|unseen");
  run_cmd->add_option("--placement-seed", run_pseed, "world placement seed");
  run_cmd->add_option("--ordering-seed", run_oseed, "task ordering seed");

  auto* bench_cmd = app.add_subcommand("bench", "full benchmark matrix");
  bool bench_build_all = false;
  int bench_seen = -1, bench_unseen = -1, bench_demos = -1;
  bench_cmd->add_flag("--build-all", bench_build_all, "build missing artifacts first");
  bench_cmd->add_option("--episodes-seen", bench_seen, "seen episodes per family");
  bench_cmd->add_option("--episodes-unseen", bench_unseen, "unseen episodes per family");
  bench_cmd->add_option("--demos", bench_demos, "demos per family when building");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = resolve_config(g);

    if (demo_gen->parsed()) {
      Family family = family_from_string(dg_family);
      int demos = dg_demos >= 0 ? dg_demos : cfg.demos_per_family;
      Library lib = build_family_library(family, demos, g.seed, cfg.params, cfg.thresholds,
                                         cfg.ctrl, cfg.expert, dg_drawer_inside);
      std::filesystem::path dir = std::filesystem::path(g.out_dir) / to_string(family) / "library";
      save_library(lib, dir);
      std::cout << "library: " << dir.string() << " (" << lib.entries.size() << " entries, "
                << lib.transitions.size() << " transitions)\n";
    } else if (fit_cmd->parsed()) {
      Library lib = load_library(fit_lib);
      LayoutPredictor predictor = LayoutPredictor::fit(lib.training_transitions(), lib.params);
      std::filesystem::path out = fit_out.empty()
                                      ? std::filesystem::path(fit_lib).parent_path() /
                                            "predictor.json"
                                      : std::filesystem::path(fit_out);
      write_text(out, predictor.to_json_string());
      std::cout << "predictor: " << out.string() << " (" << predictor.models().size()
                << " models)\n";
    } else if (plan_cmd->parsed()) {
      TaskSpec task = task_from_json(load_json(plan_task));
      SceneGraph g0 = graph_from_json(load_json(plan_init));
      TransitionChain chain = plan(g0, task, plan_order_seed);
      std::filesystem::path out = plan_out.empty() ? std::filesystem::path(g.out_dir) / "chain.json"
                                                   : std::filesystem::path(plan_out);
      if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
      save_json(chain_to_json(chain), out);
      std::cout << "chain: " << out.string() << " (" << chain.length() << " steps)\n";
    } else if (validate_cmd->parsed()) {
      TransitionChain chain = chain_from_json(load_json(validate_chain_path));
      std::vector<ChainIssue> issues = validate_chain(chain);
      for (const ChainIssue& issue : issues) {
        std::cout << "step " << issue.step << " [" << issue.code << "] " << issue.detail << "\n";
      }
      std::cout << (issues.empty() ? "chain ok" : "chain invalid") << "\n";
      return issues.empty() ? 0 : 1;
    } else if (rg->parsed()) {
      Library lib = load_library(rg_library);
      LayoutPredictor predictor = load_predictor(rg_predictor);
      ScenarioConfig scfg;
      scfg.family = family_from_string(rg_family);
      scfg.placement_seed = rg_pseed;
      scfg.ordering_seed = rg_oseed;
      scfg.params = cfg.params;
      scfg.thresholds = cfg.thresholds;
      auto [world, task] = generate_scenario(scfg);
      SceneGraph g0 = parse(world, cfg.thresholds);
      TransitionChain chain = plan(g0, task, rg_oseed);

      std::filesystem::path dir = std::filesystem::path(g.out_dir) / "goals";
      std::filesystem::create_directories(dir);
      Image img = render(world);
      Layout l = extract_layout(world);
      write_ppm(img, dir / "step_000.ppm");
      std::size_t limit =
          rg_steps < 0 ? chain.length() : std::min<std::size_t>(rg_steps, chain.length());
      for (std::size_t k = 0; k < limit; ++k) {
        SubgoalResult r =
            synthesize_subgoal(img, l, chain.graphs[k], chain.graphs[k + 1], predictor, lib);
        char name[32];
        std::snprintf(name, sizeof(name), "step_%03zu.ppm", k + 1);
        write_ppm(r.image, dir / name);
        img = std::move(r.image);
        l = std::move(r.layout);
      }
      save_json(chain_to_json(chain), dir / "chain.json");
      std::cout << "goals: " << dir.string() << " (" << limit << " images)\n";
    } else if (run_cmd->parsed()) {
      Library lib = load_library(run_library);
      LayoutPredictor predictor = load_predictor(run_predictor);
      ScenarioConfig scfg;
      scfg.family = family_from_string(run_family);
      scfg.placement_seed = run_pseed;
      scfg.ordering_seed = run_oseed;
      scfg.params = cfg.params;
      scfg.thresholds = cfg.thresholds;
      auto [world, task] = generate_scenario(scfg);
      Mode mode = run_mode == "unseen" ? Mode::Unseen : Mode::Seen;
      EpisodeOptions opts;
      if (g.dump_frames) opts.dump_dir = std::filesystem::path(g.out_dir) / "frames";
      EpisodeResult result =
          run_episode(world, task, run_oseed, mode, predictor, lib, cfg.ctrl, opts);
      result.placement_seed = run_pseed;
      std::cout << episode_to_json(result).dump(2) << "\n";
      return result.task_success ? 0 : 1;
    } else if (bench_cmd->parsed()) {
      BenchConfig bcfg;
      bcfg.params = cfg.params;
      bcfg.thresholds = cfg.thresholds;
      bcfg.ctrl = cfg.ctrl;
      bcfg.expert = cfg.expert;
      bcfg.families = cfg.families;
      bcfg.demos_per_family = bench_demos >= 0 ? bench_demos : cfg.demos_per_family;
      bcfg.episodes_seen = bench_seen >= 0 ? bench_seen : cfg.episodes_seen;
      bcfg.episodes_unseen = bench_unseen >= 0 ? bench_unseen : cfg.episodes_unseen;
      bcfg.seed = g.seed;
      bcfg.out_dir = g.out_dir;
      bcfg.build_all = bench_build_all;
      bcfg.dump_frames = g.dump_frames;
      MetricsReport report = run_benchmark(bcfg);
      std::cout << report_to_json(report).dump(2) << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error category=" << to_string(e.category()) << " message=\"" << e.what()
              << "\"\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error category=Internal message=\"" << e.what() << "\"\n";
    return 4;
  }
  return 0;
}
