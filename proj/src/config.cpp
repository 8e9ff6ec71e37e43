#include "tabletop/config.hpp"

namespace tabletop {

RunConfig run_config_from_json(const Json& j) {
  RunConfig cfg;
  if (j.contains("params")) cfg.params = world_params_from_json(j.at("params"));
  if (j.contains("thresholds")) {
    const Json& t = j.at("thresholds");
    cfg.thresholds.contact_eps = t.value("contact_eps", cfg.thresholds.contact_eps);
    cfg.thresholds.overlap_tau = t.value("overlap_tau", cfg.thresholds.overlap_tau);
    cfg.thresholds.near_dist = t.value("near_dist", cfg.thresholds.near_dist);
    cfg.thresholds.above_max = t.value("above_max", cfg.thresholds.above_max);
  }
  if (j.contains("controller")) {
    const Json& c = j.at("controller");
    cfg.ctrl.kp = c.value("kp", cfg.ctrl.kp);
    cfg.ctrl.align_tol = c.value("align_tol", cfg.ctrl.align_tol);
    cfg.ctrl.buffer_capacity = c.value("buffer_capacity", cfg.ctrl.buffer_capacity);
    cfg.ctrl.settle_delta = c.value("settle_delta", cfg.ctrl.settle_delta);
    cfg.ctrl.phase_timeout = c.value("phase_timeout", cfg.ctrl.phase_timeout);
  }
  if (j.contains("expert")) {
    const Json& e = j.at("expert");
    cfg.expert.hover_gap = e.value("hover_gap", cfg.expert.hover_gap);
    cfg.expert.retreat = e.value("retreat", cfg.expert.retreat);
    cfg.expert.carry_top = e.value("carry_top", cfg.expert.carry_top);
  }
  cfg.demos_per_family = j.value("demos_per_family", cfg.demos_per_family);
  cfg.episodes_seen = j.value("episodes_seen", cfg.episodes_seen);
  cfg.episodes_unseen = j.value("episodes_unseen", cfg.episodes_unseen);
  if (j.contains("families")) {
    cfg.families.clear();
    for (const Json& f : j.at("families")) {
      cfg.families.push_back(family_from_string(f.get<std::string>()));
    }
  }
  return cfg;
}

Json run_config_to_json(const RunConfig& cfg) {
  Json j;
  j["params"] = world_params_to_json(cfg.params);
  j["thresholds"] = Json{{"contact_eps", cfg.thresholds.contact_eps},
                         {"overlap_tau", cfg.thresholds.overlap_tau},
                         {"near_dist", cfg.thresholds.near_dist},
                         {"above_max", cfg.thresholds.above_max}};
  j["controller"] = Json{{"kp", cfg.ctrl.kp},
                         {"align_tol", cfg.ctrl.align_tol},
                         {"buffer_capacity", cfg.ctrl.buffer_capacity},
                         {"settle_delta", cfg.ctrl.settle_delta},
                         {"phase_timeout", cfg.ctrl.phase_timeout}};
  j["expert"] = Json{{"hover_gap", cfg.expert.hover_gap},
                     {"retreat", cfg.expert.retreat},
                     {"carry_top", cfg.expert.carry_top}};
  j["demos_per_family"] = cfg.demos_per_family;
  j["episodes_seen"] = cfg.episodes_seen;
  j["episodes_unseen"] = cfg.episodes_unseen;
  Json families = Json::array();
  for (Family f : cfg.families) families.push_back(to_string(f));
  j["families"] = families;
  return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(load_json(path));
}

}  // namespace tabletop
