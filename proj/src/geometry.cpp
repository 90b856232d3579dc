#include "text/geometry.hpp"

#include <algorithm>

namespace text {

std::optional<BoundingBox> intersect(const BoundingBox& a, const BoundingBox& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right());
  const int y1 = std::min(a.bottom(), b.bottom());
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  return BoundingBox{x0, y0, x1 - x0, y1 - y0};
}

BoundingBox unite(const BoundingBox& a, const BoundingBox& b) {
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.right(), b.right());
  const int y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

BoundingBox expand(const BoundingBox& b, int pad) {
  return {b.x - pad, b.y - pad, b.w + 2 * pad, b.h + 2 * pad};
}

std::optional<BoundingBox> clamp_to(const BoundingBox& b, int width, int height) {
  return intersect(b, BoundingBox{0, 0, width, height});
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const auto inter = intersect(a, b);
  if (!inter) return 0.0;
  const double i = static_cast<double>(inter->area());
  const double u = static_cast<double>(a.area()) + static_cast<double>(b.area()) - i;
  return u > 0.0 ? i / u : 0.0;
}

}  // namespace text
