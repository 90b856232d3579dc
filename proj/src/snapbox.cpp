#include "text/snapbox.hpp"

#include <optional>
#include <unordered_map>

#include "text/error.hpp"

namespace text {

namespace {

constexpr int kMaxSnapRounds = 8;

// Pixels of each label that fall inside `box`.
std::unordered_map<int, long long> label_counts(const LabelMap& labels, const BoundingBox& box) {
  std::unordered_map<int, long long> counts;
  for (int y = box.y; y < box.bottom(); ++y) {
    auto row = labels.row(y);
    for (int x = box.x; x < box.right(); ++x) {
      if (row[x] > 0) ++counts[row[x]];
    }
  }
  return counts;
}

std::optional<BoundingBox> snap_once(const PageLayers& layers, const BoundingBox& box,
                                     const BoundingBox& limit, double ratio) {
  const auto& stats = layers.components.stats;
  std::optional<BoundingBox> result;
  for (const auto& [label, inside] : label_counts(layers.components.labels, box)) {
    const ComponentStats& c = stats[label - 1];
    if (static_cast<double>(inside) < ratio * static_cast<double>(c.area)) continue;
    const BoundingBox& drawn = layers.footprints[static_cast<std::size_t>(label - 1)];
    result = result ? unite(*result, drawn) : drawn;
  }
  if (!result) return std::nullopt;
  return intersect(*result, limit);
}

}  // namespace

SnapResult snap_box(const Page& page, const BoundingBox& user_box, const EngineConfig& cfg) {
  return snap_box(page, user_box, cfg, cfg.snap_pad);
}

SnapResult snap_box(const Page& page, const BoundingBox& user_box, const EngineConfig& cfg, int pad) {
  if (user_box.w < 1 || user_box.h < 1 || user_box.area() < 4) {
    throw Error(ErrorCode::InvalidParams, "user box area must be at least 4 px^2");
  }
  const auto start = clamp_to(user_box, page.width(), page.height());
  if (!start) throw Error(ErrorCode::OutOfPage, "box does not intersect the page");

  const auto layers = page.layers(cfg);
  const BoundingBox limit = *clamp_to(expand(*start, pad), page.width(), page.height());

  BoundingBox current = *start;
  bool snapped = false;
  for (int round = 0; round < kMaxSnapRounds; ++round) {
    const auto next = snap_once(*layers, current, limit, cfg.snap_inclusion_ratio);
    if (!next) break;
    snapped = true;
    if (*next == current) break;
    current = *next;
  }
  return {current, snapped};
}

WordTemplate extract_template(const Page& page, const BoundingBox& box, const EngineConfig& cfg) {
  const auto clipped = clamp_to(box, page.width(), page.height());
  if (!clipped) throw Error(ErrorCode::OutOfPage, "template box does not intersect the page");
  if (clipped->area() < 4) throw Error(ErrorCode::InvalidParams, "template box area below 4 px^2");
  const BoundingBox b = *clipped;

  const auto layers = page.layers(cfg);
  WordTemplate t;
  t.page_id = page.id();
  t.box = b;
  t.cleaned = crop(layers->cleaned, b);
  t.mask = crop(layers->ink, b);

  const auto& stats = layers->components.stats;
  const auto counts = label_counts(layers->components.labels, b);
  std::unordered_map<int, bool> erase;
  for (const auto& [label, inside] : counts) {
    const ComponentStats& c = stats[label - 1];
    const bool touches_border = !b.contains(c.bbox);
    const double outside = 1.0 - static_cast<double>(inside) / static_cast<double>(c.area);
    if (touches_border && outside >= cfg.intruder_outside_ratio) erase[label] = true;
  }
  if (!erase.empty()) {
    for (int y = 0; y < b.h; ++y) {
      auto lab = layers->components.labels.row(b.y + y);
      for (int x = 0; x < b.w; ++x) {
        const int l = lab[b.x + x];
        if (l > 0 && erase.count(l)) {
          t.mask.at(x, y) = 0;
          t.cleaned.at(x, y) = 0.0f;
        }
      }
    }
  }
  if (count_ink(t.mask) == 0) {
    throw Error(ErrorCode::EmptyTemplate, "marked blank region: no ink inside the box");
  }
  return t;
}

}  // namespace text
