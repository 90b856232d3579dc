#pragma once

#include <optional>

namespace text {

/// Axis-aligned pixel rectangle. Origin top-left, y grows downward; the
/// right and bottom edges are exclusive.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  long long area() const { return static_cast<long long>(w) * h; }
  bool valid() const { return w >= 1 && h >= 1; }

  bool contains(int px, int py) const {
    return px >= x && px < right() && py >= y && py < bottom();
  }
  bool contains(const BoundingBox& other) const {
    return other.x >= x && other.y >= y && other.right() <= right() &&
           other.bottom() <= bottom();
  }

  bool operator==(const BoundingBox&) const = default;
};

std::optional<BoundingBox> intersect(const BoundingBox& a, const BoundingBox& b);
BoundingBox unite(const BoundingBox& a, const BoundingBox& b);
BoundingBox expand(const BoundingBox& b, int pad);

/// Clip to a width x height canvas; empty when nothing is left.
std::optional<BoundingBox> clamp_to(const BoundingBox& b, int width, int height);

/// Intersection over union, in [0, 1].
double iou(const BoundingBox& a, const BoundingBox& b);

}  // namespace text
