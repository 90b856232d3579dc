#pragma once

#include "text/config.hpp"
#include "text/geometry.hpp"
#include "text/image.hpp"
#include "text/page.hpp"

namespace text {

struct SnapResult {
  BoundingBox box;
  /// false: nothing qualified, `box` is the (page-clamped) user box.
  bool snapped = false;
};

/// Shrink a loose user rectangle to the tight box around the word it marks.
///
/// Components of the page's cleaned ink layer that carry at least
/// `snap_inclusion_ratio` of their pixels inside the user box are kept; the
/// result is their union bounding box, limited to the user box grown by
/// `pad`. The rule is re-applied to its own output until it stops changing,
/// so snapping an already snapped box is a no-op.
///
/// Throws Error{OutOfPage} when the box misses the page and
/// Error{InvalidParams} when its area is below 4 px^2.
SnapResult snap_box(const Page& page, const BoundingBox& user_box, const EngineConfig& cfg);
SnapResult snap_box(const Page& page, const BoundingBox& user_box, const EngineConfig& cfg, int pad);

/// Background-free crop of one word.
struct WordTemplate {
  /// Band-pass cleaned crop, ink bright; pixels of erased intruders are zeroed.
  GrayImage cleaned;
  /// Ink mask after speckle and intruder removal.
  BinaryImage mask;
  int page_id = -1;
  BoundingBox box;
};

/// Crop the cleaned layer and ink mask under `box`. Components that touch the
/// box border and have at least `intruder_outside_ratio` of their mass outside
/// it (descenders from the line above, neighbouring words) are erased.
/// Throws Error{EmptyTemplate} when no ink remains, Error{OutOfPage} when the
/// box misses the page.
WordTemplate extract_template(const Page& page, const BoundingBox& box, const EngineConfig& cfg);

}  // namespace text
