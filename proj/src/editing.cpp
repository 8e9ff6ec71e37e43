#include "tabletop/editing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tabletop/errors.hpp"
#include "tabletop/sprites.hpp"

namespace tabletop {

namespace {

std::vector<SpriteRef> graph_sprites(const Layout& l, const SceneGraph& g) {
  std::vector<SpriteRef> refs;
  for (const auto& [id, n] : g.nodes()) {
    if (l.occluded.count(id)) continue;
    auto it = l.boxes.find(id);
    if (it == l.boxes.end()) continue;
    bool closed = n.is_container && !n.accessible.value_or(true);
    refs.push_back({id, n.label, n.is_container, n.is_gripper, n.is_static, closed, it->second});
  }
  return depth_sorted(std::move(refs));
}

}  // namespace

std::map<NodeId, Mask> segment(const Image& img, const Layout& l, const SceneGraph& g) {
  std::vector<SpriteRef> refs = graph_sprites(l, g);
  std::map<NodeId, Mask> masks;
  for (const auto& [id, n] : g.nodes()) {
    (void)n;
    auto it = l.boxes.find(id);
    masks.emplace(id, Mask(it != l.boxes.end() ? it->second : Box{0, 0, 1, 1}));
  }

  // Paint the id buffer in depth order; the topmost sprite owns each pixel.
  std::vector<NodeId> owner(static_cast<std::size_t>(img.width()) * img.height(), -1);
  for (const SpriteRef& ref : refs) {
    Mask fp = sprite_footprint(ref.label, ref.box, ref.is_container, ref.is_gripper, ref.closed);
    for (int y = 0; y < ref.box.h; ++y) {
      int fy = ref.box.y + y;
      if (fy < 0 || fy >= img.height()) continue;
      for (int x = 0; x < ref.box.w; ++x) {
        int fx = ref.box.x + x;
        if (fx < 0 || fx >= img.width()) continue;
        if (fp.at(x, y)) owner[static_cast<std::size_t>(fy) * img.width() + fx] = ref.id;
      }
    }
  }
  for (const SpriteRef& ref : refs) {
    Mask& m = masks.at(ref.id);
    for (int y = 0; y < ref.box.h; ++y) {
      int fy = ref.box.y + y;
      if (fy < 0 || fy >= img.height()) continue;
      for (int x = 0; x < ref.box.w; ++x) {
        int fx = ref.box.x + x;
        if (fx < 0 || fx >= img.width()) continue;
        if (owner[static_cast<std::size_t>(fy) * img.width() + fx] == ref.id) m.set(x, y, true);
      }
    }
  }
  return masks;
}

std::vector<NodeId> target_set(const Layout& l_k, const Layout& l_next) {
  std::vector<NodeId> out;
  for (const auto& [id, next_box] : l_next.boxes) {
    auto it = l_k.boxes.find(id);
    if (it == l_k.boxes.end() || it->second != next_box) out.push_back(id);
  }
  return out;
}

Mask build_erase_region(const std::vector<Mask>& targets, const std::vector<Mask>& protect,
                        int margin, int frame_w, int frame_h) {
  Mask region(Box{0, 0, frame_w, frame_h});
  for (const Mask& m : targets) {
    for (int y = 0; y < m.box.h; ++y) {
      for (int x = 0; x < m.box.w; ++x) {
        if (!m.at(x, y)) continue;
        int fx = m.box.x + x, fy = m.box.y + y;
        for (int dy = -margin; dy <= margin; ++dy) {
          for (int dx = -margin; dx <= margin; ++dx) {
            int px = fx + dx, py = fy + dy;
            if (px < 0 || py < 0 || px >= frame_w || py >= frame_h) continue;
            region.set(px, py, true);
          }
        }
      }
    }
  }
  for (const Mask& m : protect) {
    for (int y = 0; y < m.box.h; ++y) {
      for (int x = 0; x < m.box.w; ++x) {
        if (!m.at(x, y)) continue;
        int px = m.box.x + x, py = m.box.y + y;
        if (px < 0 || py < 0 || px >= frame_w || py >= frame_h) continue;
        region.set(px, py, false);
      }
    }
  }
  return region;
}

Image inpaint(const Image& img, const Mask& region, const Image& plate) {
  if (plate.empty()) throw Error(ErrorCategory::MissingBackgroundPlate, "no background plate");
  if (plate.width() != img.width() || plate.height() != img.height()) {
    throw Error(ErrorCategory::MissingBackgroundPlate, "plate dims do not match the frame");
  }
  Image out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (region.at(x, y)) out.set(x, y, plate.get(x, y));
    }
  }
  return out;
}

Image inpaint(const Image& img, const std::vector<Mask>& target_masks, const Image& plate,
              int margin) {
  Mask region = build_erase_region(target_masks, {}, margin, img.width(), img.height());
  return inpaint(img, region, plate);
}

const LibraryEntry& retrieve(const Library& lib, const std::string& label, const Box& predicted) {
  std::vector<const LibraryEntry*> candidates = subset_by_label(lib, label);
  if (candidates.empty()) {
    throw Error(ErrorCategory::EmptyLabelSubset, "no library entries for label '" + label + "'");
  }
  const LibraryEntry* best = nullptr;
  double best_iou = 0.0;
  for (const LibraryEntry* e : candidates) {
    double v = iou(e->box, predicted);
    if (v > best_iou) {
      best_iou = v;
      best = e;
    }
  }
  if (best) return *best;  // IoU branch: strictly-best wins, earlier id on ties

  double best_dist = 0.0;
  for (const LibraryEntry* e : candidates) {
    double d = center_distance(e->box, predicted);
    if (!best || d < best_dist) {
      best = e;
      best_dist = d;
    }
  }
  return *best;
}

Mask gen_bg_mask(const Mask& fg_mask, const Box& dst) {
  return fg_mask.resample_to(dst);
}

Image compose(const Image& bg, std::vector<PasteOp> ops, const SceneGraph& g_next,
              const Layout& l_next) {
  std::vector<SpriteRef> order = graph_sprites(l_next, g_next);
  std::map<NodeId, int> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i].id] = static_cast<int>(i);
  std::sort(ops.begin(), ops.end(), [&](const PasteOp& a, const PasteOp& b) {
    auto ra = rank.count(a.node) ? rank.at(a.node) : -1;
    auto rb = rank.count(b.node) ? rank.at(b.node) : -1;
    if (ra != rb) return ra < rb;
    return a.node < b.node;
  });

  Image out = bg;
  for (const PasteOp& op : ops) {
    if (op.fg_mask.box.w != op.crop->width() || op.fg_mask.box.h != op.crop->height()) {
      throw Error(ErrorCategory::MaskMismatch,
                  "foreground mask does not match crop for node " + std::to_string(op.node));
    }
    Mask dst_mask = gen_bg_mask(op.fg_mask, op.dst);
    Image resampled = op.crop->resample(op.dst.w, op.dst.h);
    for (int y = 0; y < op.dst.h; ++y) {
      int fy = op.dst.y + y;
      if (fy < 0 || fy >= out.height()) continue;
      for (int x = 0; x < op.dst.w; ++x) {
        int fx = op.dst.x + x;
        if (fx < 0 || fx >= out.width()) continue;
        if (dst_mask.at(x, y)) out.set(fx, fy, resampled.get(x, y));
      }
    }
  }
  return out;
}

SubgoalResult synthesize_subgoal(const Image& img, const Layout& l_k, const SceneGraph& g_k,
                                 const SceneGraph& g_next, const LayoutPredictor& predictor,
                                 const Library& lib) {
  SubgoalResult result;
  result.layout = predictor.predict(g_k, l_k, g_next);

  std::map<NodeId, Mask> masks = segment(img, l_k, g_k);
  result.targets = target_set(l_k, result.layout);

  std::vector<Mask> target_masks, protect_masks;
  std::set<NodeId> target_ids(result.targets.begin(), result.targets.end());
  for (const auto& [id, m] : masks) {
    if (target_ids.count(id)) {
      target_masks.push_back(m);
    } else {
      protect_masks.push_back(m);
    }
  }
  result.erase_region = build_erase_region(target_masks, protect_masks, kInpaintDilateMargin,
                                           img.width(), img.height());
  Image bg = inpaint(img, result.erase_region, lib.background_plate);

  std::vector<PasteOp> ops;
  for (NodeId id : result.targets) {
    const ObjectNode& node = g_next.node(id);
    // Objects vanishing into a closed container are erased, not re-pasted.
    bool hidden = false;
    for (const Edge& e : g_next.edges_from(id)) {
      if (e.relation == Relation::In && !g_next.node(e.dst).accessible.value_or(true)) {
        hidden = true;
      }
    }
    if (hidden) continue;
    const LibraryEntry& entry = retrieve(lib, node.label, result.layout.box(id));
    PasteOp op;
    op.node = id;
    op.crop = &entry.crop;
    op.fg_mask = entry.mask;
    op.dst = result.layout.box(id);
    ops.push_back(op);
  }
  for (const PasteOp& op : ops) {
    result.pasted[op.node] = gen_bg_mask(op.fg_mask, op.dst);
  }
  result.image = compose(bg, std::move(ops), g_next, result.layout);
  return result;
}

}  // namespace tabletop
