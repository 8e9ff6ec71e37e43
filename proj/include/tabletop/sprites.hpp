#pragma once

#include <string>
#include <vector>

#include "tabletop/geometry.hpp"
#include "tabletop/image.hpp"
#include "tabletop/scene_graph.hpp"

namespace tabletop {

// Everything the raster layer needs to know about one drawable node.
struct SpriteRef {
  NodeId id = 0;
  std::string label;
  bool is_container = false;
  bool is_gripper = false;
  bool is_static = false;
  bool closed = false;  // closed containers draw as solid slabs and hide contents
  Box box;
};

// Procedural sprite shapes keyed by label; deterministic for a given extent.
// Footprints are the alpha coverage used by the renderer, the segmenter and
// the library masks.
Mask sprite_footprint(const std::string& label, const Box& box, bool is_container, bool is_gripper,
                      bool closed = false);

// Paints the sprite onto the image, clipped to the frame.
void draw_sprite(Image& img, const SpriteRef& ref);

// Painter order: table first, then containers, then movables bottom-up
// (descending y), gripper last. Returns refs sorted back-to-front.
std::vector<SpriteRef> depth_sorted(std::vector<SpriteRef> refs);

Rgb sky_color();
Rgb table_color();

}  // namespace tabletop
