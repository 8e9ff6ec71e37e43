#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>

namespace tabletop {

// Axis-aligned pixel rectangle, top-left origin, y growing downward.
struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  auto operator<=>(const Box&) const = default;

  int left() const { return x; }
  int right() const { return x + w; }
  int top() const { return y; }
  int bottom() const { return y + h; }
  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
  long long area() const { return static_cast<long long>(w) * h; }
  bool valid() const { return w > 0 && h > 0; }

  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  bool contains_box(const Box& b) const {
    return b.x >= x && b.y >= y && b.right() <= right() && b.bottom() <= bottom();
  }
};

inline long long intersection_area(const Box& a, const Box& b) {
  long long iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  long long ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0 || ih <= 0) return 0;
  return iw * ih;
}

inline double iou(const Box& a, const Box& b) {
  long long inter = intersection_area(a, b);
  long long uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double center_distance(const Box& a, const Box& b) {
  double dx = a.cx() - b.cx();
  double dy = a.cy() - b.cy();
  return std::sqrt(dx * dx + dy * dy);
}

// Horizontal overlap length of the two x-extents (0 when disjoint).
inline int horizontal_overlap(const Box& a, const Box& b) {
  return std::max(0, std::min(a.right(), b.right()) - std::max(a.left(), b.left()));
}

// Gap between x-extents; 0 when they touch or overlap.
inline int horizontal_gap(const Box& a, const Box& b) {
  if (a.right() <= b.left()) return b.left() - a.right();
  if (b.right() <= a.left()) return a.left() - b.right();
  return 0;
}

inline bool vertical_extents_overlap(const Box& a, const Box& b) {
  return a.top() < b.bottom() && b.top() < a.bottom();
}

// Clamp a box into a frame, preserving extent where possible.
inline Box clamp_to_frame(Box b, int frame_w, int frame_h) {
  b.w = std::clamp(b.w, 1, frame_w);
  b.h = std::clamp(b.h, 1, frame_h);
  b.x = std::clamp(b.x, 0, frame_w - b.w);
  b.y = std::clamp(b.y, 0, frame_h - b.h);
  return b;
}

inline Box dilate(const Box& b, int margin) {
  return Box{b.x - margin, b.y - margin, b.w + 2 * margin, b.h + 2 * margin};
}

}  // namespace tabletop
