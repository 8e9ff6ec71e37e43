#include "tabletop/layout.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "tabletop/errors.hpp"
#include "tabletop/image.hpp"
#include "tabletop/json.hpp"

namespace tabletop {

const Box& Layout::box(NodeId id) const {
  auto it = boxes.find(id);
  if (it == boxes.end()) {
    throw Error(ErrorCategory::MissingBox, "layout has no box for node " + std::to_string(id));
  }
  return it->second;
}

Layout extract_layout(const WorldState& w) {
  Layout l;
  l.boxes[w.table_id] = w.table_box();
  l.boxes[w.gripper_id] = w.gripper_box();
  for (const auto& o : w.objects) l.boxes[o.id] = w.object_box(o);
  for (const auto& o : w.objects) {
    for (const auto& c : w.objects) {
      if (!c.is_container || c.id == o.id || w.container_accessible(c)) continue;
      Box interior = w.container_interior(c);
      if (interior.contains_box(w.object_box(o))) {
        l.occluded.insert(o.id);
        l.boxes[o.id] = interior;
      }
    }
  }
  return l;
}

std::vector<Box> container_slots(const Box& container, int wall, int floor) {
  Box interior{container.x + wall, container.y, container.w - 2 * wall, container.h - floor};
  const int n = 3;
  std::vector<Box> slots;
  int base_w = interior.w / n;
  for (int i = 0; i < n; ++i) {
    int x0 = interior.x + i * base_w;
    int w = (i == n - 1) ? interior.right() - x0 : base_w;
    slots.push_back(Box{x0, interior.y, w, interior.h});
  }
  return slots;
}

Box next_free_slot(const Box& container, int wall, int floor, const Layout& l, NodeId subject,
                   NodeId gripper, NodeId container_id) {
  std::vector<Box> slots = container_slots(container, wall, floor);
  Box interior{container.x + wall, container.y, container.w - 2 * wall, container.h - floor};
  for (const Box& slot : slots) {
    bool occupied = false;
    for (const auto& [id, b] : l.boxes) {
      if (id == subject || id == gripper || id == container_id) continue;
      int cx = static_cast<int>(b.cx());
      int cy = static_cast<int>(b.cy());
      if (interior.contains(cx, cy) && cx >= slot.left() && cx < slot.right()) occupied = true;
    }
    if (!occupied) return slot;
  }
  return slots.back();
}

const char* to_string(StepRole role) {
  switch (role) {
    case StepRole::Identity: return "identity";
    case StepRole::ApproachAbove: return "approach_above";
    case StepRole::GraspDescend: return "grasp";
    case StepRole::Lift: return "lift";
    case StepRole::TransportAbove: return "transport_above";
    case StepRole::PlaceOn: return "place_on";
    case StepRole::PlaceIn: return "place_in";
    case StepRole::Release: return "release";
    case StepRole::PullOpen: return "pull_open";
    case StepRole::PushClosed: return "push_closed";
  }
  return "?";
}

StepRole step_role_from_string(const std::string& name) {
  for (StepRole role : {StepRole::Identity, StepRole::ApproachAbove, StepRole::GraspDescend,
                        StepRole::Lift, StepRole::TransportAbove, StepRole::PlaceOn,
                        StepRole::PlaceIn, StepRole::Release, StepRole::PullOpen,
                        StepRole::PushClosed}) {
    if (name == to_string(role)) return role;
  }
  throw Error(ErrorCategory::IoError, "unknown step role: " + name);
}

TransitionStep classify_transition(const SceneGraph& g_k, const SceneGraph& g_next) {
  std::vector<EdgeDelta> deltas = diff(g_k, g_next);
  NodeId gripper = g_k.gripper_id();

  auto riders_in = [&](NodeId container) {
    std::vector<NodeId> riders;
    for (const Edge& e : g_k.edges_to(container)) {
      if (e.relation == Relation::In) riders.push_back(e.src);
    }
    return riders;
  };

  if (deltas.empty()) {
    for (const auto& [id, n] : g_k.nodes()) {
      if (!n.accessible.has_value()) continue;
      const ObjectNode& after = g_next.node(id);
      if (after.accessible == n.accessible) continue;
      TransitionStep step;
      step.role = *after.accessible ? StepRole::PullOpen : StepRole::PushClosed;
      step.subject = id;
      step.reference = id;
      step.gripper_tracks = true;
      step.riders = riders_in(id);
      return step;
    }
    return TransitionStep{};  // identity
  }

  if (deltas.size() != 1) {
    throw Error(ErrorCategory::InapplicableDelta,
                "transition changes " + std::to_string(deltas.size()) + " edges; expected one");
  }

  const EdgeDelta& d = deltas[0];
  TransitionStep step;
  switch (d.kind) {
    case DeltaKind::Added: {
      const Edge& e = *d.after;
      if (e.src == gripper && e.relation == Relation::Above) {
        step.role = StepRole::ApproachAbove;
        step.subject = gripper;
        step.reference = e.dst;
        return step;
      }
      if (e.relation == Relation::Above) {
        step.role = StepRole::TransportAbove;
        step.subject = e.src;
        step.reference = e.dst;
        step.gripper_tracks = true;
        return step;
      }
      break;
    }
    case DeltaKind::Removed: {
      const Edge& e = *d.before;
      if (e.src == gripper && e.relation == Relation::Grasp) {
        step.role = StepRole::Release;
        step.subject = gripper;
        step.reference = e.dst;
        return step;
      }
      if (e.relation == Relation::On || e.relation == Relation::In) {
        step.role = StepRole::Lift;
        step.subject = e.src;
        step.reference = e.src;
        step.gripper_tracks = true;
        return step;
      }
      break;
    }
    case DeltaKind::Relabeled: {
      const Edge& from = *d.before;
      const Edge& to = *d.after;
      if (from.src == gripper && from.relation == Relation::Above &&
          to.relation == Relation::Grasp) {
        step.role = StepRole::GraspDescend;
        step.subject = gripper;
        step.reference = to.dst;
        return step;
      }
      if (from.relation == Relation::Above && to.relation == Relation::On) {
        step.role = StepRole::PlaceOn;
        step.subject = to.src;
        step.reference = to.dst;
        step.gripper_tracks = true;
        return step;
      }
      if (from.relation == Relation::Above && to.relation == Relation::In) {
        step.role = StepRole::PlaceIn;
        step.subject = to.src;
        step.reference = to.dst;
        step.gripper_tracks = true;
        return step;
      }
      break;
    }
  }
  throw Error(ErrorCategory::InapplicableDelta, "transition is not a recognized primitive");
}

Box feature_target_box(const TransitionStep& step, const Layout& l_k, const SceneGraph& g_next,
                       const WorldParams& params) {
  switch (step.role) {
    case StepRole::PlaceIn:
      return next_free_slot(l_k.box(step.reference), params.container_wall,
                            params.container_floor, l_k, step.subject, g_next.gripper_id(),
                            step.reference);
    default:
      return l_k.box(step.reference);
  }
}

Box LinearModel::eval(const Box& target, int prior_w, int prior_h) const {
  std::array<double, 7> f{static_cast<double>(target.x), static_cast<double>(target.y),
                          static_cast<double>(target.w), static_cast<double>(target.h),
                          static_cast<double>(prior_w), static_cast<double>(prior_h), 1.0};
  std::array<double, 4> out{};
  for (int r = 0; r < 4; ++r) {
    double acc = 0;
    for (int c = 0; c < 7; ++c) acc += coef[r][c] * f[c];
    out[r] = acc;
  }
  return Box{static_cast<int>(std::lround(out[0])), static_cast<int>(std::lround(out[1])),
             std::max(1, static_cast<int>(std::lround(out[2]))),
             std::max(1, static_cast<int>(std::lround(out[3])))};
}

namespace {

struct Sample {
  Box target;
  int prior_w = 0;
  int prior_h = 0;
  Box output;
};

LinearModel fit_model(const std::vector<Sample>& samples) {
  const int n = static_cast<int>(samples.size());
  Eigen::MatrixXd X(n, 7), Y(n, 4);
  for (int i = 0; i < n; ++i) {
    const Sample& s = samples[i];
    X.row(i) << s.target.x, s.target.y, s.target.w, s.target.h, s.prior_w, s.prior_h, 1.0;
    Y.row(i) << s.output.x, s.output.y, s.output.w, s.output.h;
  }
  // Min-norm least squares; demo features often carry constant columns
  // (fixed gripper size), so the solve must tolerate rank deficiency.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-9);
  Eigen::MatrixXd W = svd.solve(Y);

  LinearModel model;
  model.n_samples = n;
  model.rank = static_cast<int>(svd.rank());
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 7; ++c) model.coef[r][c] = W(c, r);
  }
  Eigen::MatrixXd R = X * W - Y;
  for (int c = 0; c < 4; ++c) {
    model.residual_rmse[c] = std::sqrt(R.col(c).squaredNorm() / n);
  }
  return model;
}

}  // namespace

LayoutPredictor LayoutPredictor::fit(const std::vector<TrainingTransition>& transitions,
                                     const WorldParams& params, int min_samples) {
  std::map<std::string, std::vector<Sample>> by_role;
  std::vector<Sample> carry;
  std::ostringstream digest_buf;

  for (const TrainingTransition& t : transitions) {
    TransitionStep step = classify_transition(t.g_from, t.g_to);
    if (step.role == StepRole::Identity) continue;
    NodeId gripper = t.g_from.gripper_id();

    Sample s;
    s.target = feature_target_box(step, t.l_from, t.g_to, params);
    s.prior_w = t.l_from.box(step.subject).w;
    s.prior_h = t.l_from.box(step.subject).h;
    s.output = t.l_to.box(step.subject);
    by_role[to_string(step.role)].push_back(s);

    if (step.gripper_tracks) {
      Sample c;
      c.target = t.l_to.box(step.subject);
      c.prior_w = t.l_from.box(gripper).w;
      c.prior_h = t.l_from.box(gripper).h;
      c.output = t.l_to.box(gripper);
      carry.push_back(c);
    }

    digest_buf << to_string(step.role) << "|" << s.target.x << "," << s.target.y << ","
               << s.output.x << "," << s.output.y << ";";
  }
  if (!carry.empty()) by_role["carry"] = std::move(carry);

  if (by_role.empty()) {
    throw Error(ErrorCategory::InsufficientData, "no transitions to fit");
  }

  LayoutPredictor p;
  p.params_ = params;
  for (const auto& [role, samples] : by_role) {
    if (static_cast<int>(samples.size()) < min_samples) {
      throw Error(ErrorCategory::InsufficientData,
                  "model '" + role + "' has " + std::to_string(samples.size()) +
                      " samples; need " + std::to_string(min_samples));
    }
    p.models_[role] = fit_model(samples);
  }
  p.training_digest_ = fnv1a_hex(digest_buf.str());
  return p;
}

Layout LayoutPredictor::predict(const SceneGraph& g_k, const Layout& l_k,
                                const SceneGraph& g_next) const {
  for (const auto& [id, n] : g_k.nodes()) {
    (void)n;
    if (!l_k.boxes.count(id)) {
      throw Error(ErrorCategory::MissingBox, "layout misses node " + std::to_string(id));
    }
  }

  TransitionStep step = classify_transition(g_k, g_next);
  Layout out = l_k;  // locality: untouched nodes copy bit-exactly
  if (step.role == StepRole::Identity) return out;

  auto model_it = models_.find(to_string(step.role));
  if (model_it == models_.end()) {
    throw Error(ErrorCategory::NoModelForRelation,
                std::string("no model for step role ") + to_string(step.role));
  }

  Box target = feature_target_box(step, l_k, g_next, params_);
  const Box& prior = l_k.box(step.subject);
  Box predicted = model_it->second.eval(target, prior.w, prior.h);
  predicted = clamp_to_frame(predicted, params_.frame_w, params_.frame_h);
  out.boxes[step.subject] = predicted;

  int shift_x = predicted.x - prior.x;
  int shift_y = predicted.y - prior.y;
  for (NodeId rider : step.riders) {
    Box b = l_k.box(rider);
    b.x += shift_x;
    b.y += shift_y;
    out.boxes[rider] = clamp_to_frame(b, params_.frame_w, params_.frame_h);
  }

  if (step.gripper_tracks) {
    auto carry_it = models_.find("carry");
    if (carry_it == models_.end()) {
      throw Error(ErrorCategory::NoModelForRelation, "no carry model for gripper tracking");
    }
    NodeId gripper = g_k.gripper_id();
    const Box& gprior = l_k.box(gripper);
    Box gbox = carry_it->second.eval(predicted, gprior.w, gprior.h);
    out.boxes[gripper] = clamp_to_frame(gbox, params_.frame_w, params_.frame_h);
  }
  return out;
}

std::string LayoutPredictor::to_json_string() const {
  Json root;
  root["frame"] = {{"w", params_.frame_w}, {"h", params_.frame_h}};
  root["params"] = world_params_to_json(params_);
  root["training_digest"] = training_digest_;
  Json models = Json::object();
  for (const auto& [role, m] : models_) {
    Json jm;
    jm["n_samples"] = m.n_samples;
    jm["rank"] = m.rank;
    jm["residual_rmse"] = m.residual_rmse;
    Json rows = Json::array();
    for (const auto& row : m.coef) rows.push_back(row);
    jm["coef"] = rows;
    models[role] = jm;
  }
  root["models"] = models;
  return root.dump(2) + "\n";
}

LayoutPredictor LayoutPredictor::from_json_string(const std::string& text) {
  Json root = parse_json(text, "layout predictor");
  LayoutPredictor p;
  p.params_ = world_params_from_json(root.at("params"));
  p.training_digest_ = root.at("training_digest").get<std::string>();
  for (const auto& [role, jm] : root.at("models").items()) {
    LinearModel m;
    m.n_samples = jm.at("n_samples").get<int>();
    m.rank = jm.at("rank").get<int>();
    m.residual_rmse = jm.at("residual_rmse").get<std::array<double, 4>>();
    const Json& rows = jm.at("coef");
    for (int r = 0; r < 4; ++r) m.coef[r] = rows.at(r).get<std::array<double, 7>>();
    p.models_[role] = m;
  }
  return p;
}

}  // namespace tabletop
