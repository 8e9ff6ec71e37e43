#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tabletop/episode.hpp"
#include "tabletop/library.hpp"

namespace tabletop {

enum class Family { SequentialStack, FlexiblePlace, HybridGrill, HybridDrawer };

const char* to_string(Family f);
Family family_from_string(const std::string& name);
std::vector<Family> all_families();

struct ScenarioConfig {
  Family family = Family::SequentialStack;
  std::uint64_t placement_seed = 0;
  std::uint64_t ordering_seed = 0;  // 0 reproduces the demo-scripted order (seen)
  WorldParams params;
  GeomThresholds thresholds;
  bool drawer_start_inside = false;  // HybridDrawer variant: one block starts in the closed drawer
};

// Seeded non-overlapping world plus the family's task. Throws
// PlacementInfeasible when the roster cannot fit the placement band and
// ScenarioInvalid for inconsistent configs.
std::pair<WorldState, TaskSpec> generate_scenario(const ScenarioConfig& cfg);

// Index permutation of 0..n-1 decoded from the seed (seed 0 = identity).
std::vector<int> seeded_permutation(int n, std::uint64_t seed);

// Scripted demonstrations for one family (ordering seed 0), deterministic
// for a given seed.
Library build_family_library(Family family, int n_demos, std::uint64_t seed,
                             const WorldParams& params, const GeomThresholds& thresholds,
                             const ControllerParams& ctrl, const ExpertParams& expert,
                             bool drawer_start_inside = false);

struct BenchConfig {
  WorldParams params;
  GeomThresholds thresholds;
  ControllerParams ctrl;
  ExpertParams expert;
  std::vector<Family> families = all_families();
  int demos_per_family = 30;
  int episodes_seen = 10;
  int episodes_unseen = 30;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  bool build_all = false;       // build missing libraries/predictors first
  bool dump_frames = false;
  bool write_episodes = true;   // per-episode JSON artifacts
};

struct BenchRow {
  std::string family;
  std::string mode;
  int episodes = 0;
  int successes = 0;
  int phases_total = 0;
  int phases_passed = 0;
  double mean_mask_iou = -1.0;
  double mean_masked_mse = -1.0;
};

struct MetricsReport {
  std::vector<BenchRow> rows;
  int episodes = 0;
  int successes = 0;
  int phases_total = 0;
  int phases_passed = 0;

  double task_success_rate() const { return episodes ? double(successes) / episodes : -1.0; }
  double phase_success_rate() const {
    return phases_total ? double(phases_passed) / phases_total : -1.0;
  }
};

Json report_to_json(const MetricsReport& report);
std::string report_to_csv(const MetricsReport& report);

// Full matrix: per family build (or load) artifacts, run seen and unseen
// episodes, aggregate both metrics, write report.json/report.csv under
// out_dir. Throws MissingArtifacts when artifacts are absent and build_all
// is off.
MetricsReport run_benchmark(const BenchConfig& cfg);

}  // namespace tabletop
