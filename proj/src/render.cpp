#include "tabletop/render.hpp"

namespace tabletop {

std::vector<SpriteRef> world_sprites(const WorldState& w) {
  Layout l = extract_layout(w);
  std::vector<SpriteRef> refs;
  refs.push_back({w.table_id, "table", false, false, true, false, w.table_box()});
  for (const auto& o : w.objects) {
    if (l.occluded.count(o.id)) continue;  // hidden inside a closed container
    bool closed = o.is_container && !w.container_accessible(o);
    refs.push_back({o.id, o.label, o.is_container, false, o.is_static, closed, w.object_box(o)});
  }
  refs.push_back({w.gripper_id, "gripper", false, true, false, false, w.gripper_box()});
  return depth_sorted(std::move(refs));
}

Image render(const WorldState& w) {
  Image img(w.params.frame_w, w.params.frame_h, sky_color());
  for (const SpriteRef& ref : world_sprites(w)) draw_sprite(img, ref);
  return img;
}

Image render_background_plate(const WorldParams& params) {
  Image img(params.frame_w, params.frame_h, sky_color());
  SpriteRef table{0, "table", false, false, true, false,
                  Box{0, params.table_top(), params.frame_w, params.table_h}};
  draw_sprite(img, table);
  return img;
}

std::vector<NodeId> render_ids(const WorldState& w) {
  std::vector<NodeId> ids(static_cast<std::size_t>(w.params.frame_w) * w.params.frame_h, -1);
  for (const SpriteRef& ref : world_sprites(w)) {
    Mask fp = sprite_footprint(ref.label, ref.box, ref.is_container, ref.is_gripper, ref.closed);
    for (int y = 0; y < ref.box.h; ++y) {
      int fy = ref.box.y + y;
      if (fy < 0 || fy >= w.params.frame_h) continue;
      for (int x = 0; x < ref.box.w; ++x) {
        int fx = ref.box.x + x;
        if (fx < 0 || fx >= w.params.frame_w) continue;
        if (fp.at(x, y)) ids[static_cast<std::size_t>(fy) * w.params.frame_w + fx] = ref.id;
      }
    }
  }
  return ids;
}

}  // namespace tabletop
