#pragma once

#include <map>
#include <vector>

#include "tabletop/image.hpp"
#include "tabletop/layout.hpp"
#include "tabletop/library.hpp"
#include "tabletop/scene_graph.hpp"

namespace tabletop {

constexpr int kInpaintDilateMargin = 2;  // removes sprite fringes before filling

// Visible footprint per node: procedural sprite coverage at the layout box,
// trimmed by everything painted over it. Occluded nodes get empty masks.
std::map<NodeId, Mask> segment(const Image& img, const Layout& l, const SceneGraph& g);

// Nodes whose boxes change across the step (the objects to erase and
// re-composite). Static landmarks never move, so they never appear.
std::vector<NodeId> target_set(const Layout& l_k, const Layout& l_next);

// Frame-space erase region: target masks dilated by the margin, minus the
// visible pixels of every protected (non-target) mask.
Mask build_erase_region(const std::vector<Mask>& targets, const std::vector<Mask>& protect,
                        int margin, int frame_w, int frame_h);

// Fills the region from the background plate; everything else is untouched.
Image inpaint(const Image& img, const Mask& region, const Image& plate);

// Convenience form matching the stage contract: dilate-and-fill with no
// protected pixels.
Image inpaint(const Image& img, const std::vector<Mask>& target_masks, const Image& plate,
              int margin = kInpaintDilateMargin);

// Best reference for a label at a predicted box: argmax IoU when any
// candidate overlaps, otherwise argmin centroid distance; ties resolve to
// the lowest entry id. Throws EmptyLabelSubset when the label is unknown.
const LibraryEntry& retrieve(const Library& lib, const std::string& label, const Box& predicted);

// Repositions and rescales a foreground mask onto its destination box
// (nearest neighbor).
Mask gen_bg_mask(const Mask& fg_mask, const Box& dst);

struct PasteOp {
  NodeId node = -1;
  const Image* crop = nullptr;  // foreground pixels, src-box sized
  Mask fg_mask;                 // src-box sized coverage
  Box dst;
};

// Pastes each foreground into its destination (RGB bilinear, masks nearest),
// in ascending render depth with the gripper last. Pixels outside the pasted
// masks are bit-identical to bg.
Image compose(const Image& bg, std::vector<PasteOp> ops, const SceneGraph& g_next,
              const Layout& l_next);

struct SubgoalResult {
  Image image;
  Layout layout;                  // predicted L_{k+1}
  std::vector<NodeId> targets;
  Mask erase_region;              // frame-space pixels filled from the plate
  std::map<NodeId, Mask> pasted;  // frame-space destination masks per target
};

// Full per-step synthesis: predict, segment, erase, retrieve, re-composite.
SubgoalResult synthesize_subgoal(const Image& img, const Layout& l_k, const SceneGraph& g_k,
                                 const SceneGraph& g_next, const LayoutPredictor& predictor,
                                 const Library& lib);

}  // namespace tabletop
