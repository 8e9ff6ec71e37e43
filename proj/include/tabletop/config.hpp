#pragma once

#include <filesystem>

#include "tabletop/bench.hpp"
#include "tabletop/json.hpp"

namespace tabletop {

// Every tunable in one document: world geometry, relation thresholds,
// controller gains, expert poses and benchmark sizes.
struct RunConfig {
  WorldParams params;
  GeomThresholds thresholds;
  ControllerParams ctrl;
  ExpertParams expert;
  int demos_per_family = 30;
  int episodes_seen = 10;
  int episodes_unseen = 30;
  std::vector<Family> families = all_families();
};

RunConfig run_config_from_json(const Json& j);
Json run_config_to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace tabletop
