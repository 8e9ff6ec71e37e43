#pragma once

#include <vector>

#include "tabletop/image.hpp"
#include "tabletop/layout.hpp"
#include "tabletop/sprites.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

// Deterministic sprite raster of the world at its frame size.
Image render(const WorldState& w);

// Render of the empty scene (table only); the inpainting fill source.
Image render_background_plate(const WorldParams& params);

// Per-pixel topmost node id; -1 where only sky shows. The table paints its
// own id. Segmentation masks are checked against this buffer in tests.
std::vector<NodeId> render_ids(const WorldState& w);

// Drawable refs for the world in painter order.
std::vector<SpriteRef> world_sprites(const WorldState& w);

}  // namespace tabletop
