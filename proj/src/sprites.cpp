#include "tabletop/sprites.hpp"

#include <algorithm>
#include <map>

namespace tabletop {

namespace {

enum class Shape { Slab, Ellipse, Tray, Claw };

struct SpriteSpec {
  Shape shape = Shape::Slab;
  Rgb fill{128, 128, 128};
  Rgb accent{90, 90, 90};
};

const SpriteSpec& spec_for(const std::string& label, bool is_container, bool is_gripper) {
  static const std::map<std::string, SpriteSpec> specs = {
      {"table", {Shape::Slab, {121, 85, 58}, {96, 66, 44}}},
      {"red_block", {Shape::Slab, {206, 60, 54}, {150, 38, 34}}},
      {"green_block", {Shape::Slab, {70, 160, 73}, {44, 112, 47}}},
      {"blue_block", {Shape::Slab, {66, 100, 196}, {42, 66, 140}}},
      {"yellow_block", {Shape::Slab, {214, 182, 52}, {160, 132, 30}}},
      {"stack_base", {Shape::Slab, {104, 112, 120}, {78, 84, 90}}},
      {"grill", {Shape::Slab, {54, 54, 58}, {120, 120, 126}}},
      {"apple", {Shape::Ellipse, {198, 44, 40}, {140, 28, 26}}},
      {"banana", {Shape::Ellipse, {226, 202, 60}, {170, 148, 36}}},
      {"orange", {Shape::Ellipse, {232, 136, 36}, {176, 98, 22}}},
      {"eggplant", {Shape::Ellipse, {104, 52, 134}, {72, 34, 96}}},
      {"pepper", {Shape::Ellipse, {96, 176, 72}, {62, 124, 46}}},
      {"corn", {Shape::Ellipse, {222, 190, 92}, {168, 140, 58}}},
      {"fruit_box", {Shape::Tray, {186, 148, 96}, {140, 108, 66}}},
      {"pan", {Shape::Tray, {72, 72, 78}, {46, 46, 50}}},
      {"drawer", {Shape::Tray, {150, 108, 66}, {110, 78, 46}}},
      {"gripper", {Shape::Claw, {88, 94, 102}, {60, 64, 70}}},
  };
  auto it = specs.find(label);
  if (it != specs.end()) return it->second;
  static const SpriteSpec tray_default{Shape::Tray, {160, 140, 110}, {120, 104, 80}};
  static const SpriteSpec claw_default{Shape::Claw, {88, 94, 102}, {60, 64, 70}};
  static const SpriteSpec slab_default{Shape::Slab, {140, 140, 140}, {100, 100, 100}};
  if (is_gripper) return claw_default;
  if (is_container) return tray_default;
  return slab_default;
}

// Tray and claw wall thicknesses; shared with the world's interior geometry.
constexpr int kTrayWall = 6;
constexpr int kTrayFloor = 8;
constexpr int kClawBar = 8;
constexpr int kClawFinger = 6;

bool inside_ellipse(int px, int py, int w, int h) {
  double rx = w / 2.0, ry = h / 2.0;
  double dx = (px + 0.5 - rx) / rx;
  double dy = (py + 0.5 - ry) / ry;
  return dx * dx + dy * dy <= 1.0;
}

bool inside_shape(Shape shape, int px, int py, int w, int h) {
  switch (shape) {
    case Shape::Slab:
      return true;
    case Shape::Ellipse:
      return inside_ellipse(px, py, w, h);
    case Shape::Tray:
      return px < kTrayWall || px >= w - kTrayWall || py >= h - kTrayFloor;
    case Shape::Claw:
      return py < kClawBar || px < kClawFinger || px >= w - kClawFinger;
  }
  return true;
}

bool accent_pixel(Shape shape, const std::string& label, int px, int py, int w, int h) {
  if (shape == Shape::Slab && label == "grill") return py % 6 < 2;  // grate lines
  // 1px darker rim on slabs and trays, 2px darker rim on ellipses.
  switch (shape) {
    case Shape::Slab:
      return px == 0 || py == 0 || px == w - 1 || py == h - 1;
    case Shape::Ellipse:
      return !(px >= 2 && py >= 2 && px < w - 2 && py < h - 2 &&
               inside_ellipse(px - 2, py - 2, w - 4, h - 4));
    case Shape::Tray:
      return py == h - 1 || px == 0 || px == w - 1;
    case Shape::Claw:
      return py == 0;
  }
  return false;
}

}  // namespace

Mask sprite_footprint(const std::string& label, const Box& box, bool is_container,
                      bool is_gripper, bool closed) {
  const SpriteSpec& spec = spec_for(label, is_container, is_gripper);
  Shape shape = closed && spec.shape == Shape::Tray ? Shape::Slab : spec.shape;
  Mask mask(Box{0, 0, box.w, box.h});
  for (int y = 0; y < box.h; ++y) {
    for (int x = 0; x < box.w; ++x) {
      if (inside_shape(shape, x, y, box.w, box.h)) mask.set(x, y, true);
    }
  }
  return mask;
}

void draw_sprite(Image& img, const SpriteRef& ref) {
  const SpriteSpec& spec = spec_for(ref.label, ref.is_container, ref.is_gripper);
  Shape shape = ref.closed && spec.shape == Shape::Tray ? Shape::Slab : spec.shape;
  for (int y = 0; y < ref.box.h; ++y) {
    int fy = ref.box.y + y;
    if (fy < 0 || fy >= img.height()) continue;
    for (int x = 0; x < ref.box.w; ++x) {
      int fx = ref.box.x + x;
      if (fx < 0 || fx >= img.width()) continue;
      if (!inside_shape(shape, x, y, ref.box.w, ref.box.h)) continue;
      bool accent = accent_pixel(shape, ref.label, x, y, ref.box.w, ref.box.h);
      img.set(fx, fy, accent ? spec.accent : spec.fill);
    }
  }
}

std::vector<SpriteRef> depth_sorted(std::vector<SpriteRef> refs) {
  auto rank = [](const SpriteRef& r) {
    if (r.label == "table") return 0;
    if (r.is_gripper) return 3;
    if (r.is_container) return 1;
    return 2;
  };
  std::stable_sort(refs.begin(), refs.end(), [&](const SpriteRef& a, const SpriteRef& b) {
    int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb;
    if (ra == 2) {
      // Movables paint bottom-up so slight overlaps resolve like stacking.
      if (a.box.y != b.box.y) return a.box.y > b.box.y;
    }
    return a.id < b.id;
  });
  return refs;
}

Rgb sky_color() { return {214, 222, 230}; }
Rgb table_color() { return {121, 85, 58}; }

}  // namespace tabletop
