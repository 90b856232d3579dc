#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "text/config.hpp"
#include "text/geometry.hpp"
#include "text/image.hpp"
#include "text/page.hpp"
#include "text/snapbox.hpp"

namespace text {

/// What a search looks for: the exemplars a query has accrued so far.
/// Immutable for the duration of a search run.
struct QueryModel {
  std::string query_id;
  /// Original query template first, then confirmed exemplars.
  std::vector<WordTemplate> positives;
  /// Rejected exemplars; they subtract evidence.
  std::vector<WordTemplate> negatives;
  std::vector<double> scales{0.9, 1.0, 1.1};
  double threshold = 0.55;

  /// Throws Error{InvalidParams} on empty positives, unsorted or
  /// out-of-range scales, or a threshold outside [0.3, 0.9].
  void validate() const;
};

struct Candidate {
  int page_id = -1;
  BoundingBox box;
  double score = 0.0;
  double scale = 1.0;

  bool operator==(const Candidate&) const = default;
};

/// Pixel radius by which the ink mask is grown to form the NCC support.
inline constexpr int kSupportRadius = 2;
/// Minimum support size for a template to be usable.
inline constexpr int kMinSupport = 16;
/// Per-pixel variance at or below which a side counts as constant.
inline constexpr double kZeroVariance = 1e-10;

/// Masked zero-normalized cross-correlation between a template and an equally
/// sized window, over the template's ink mask dilated by kSupportRadius.
/// Returns 0 when either side is constant on the support.
/// Throws Error{DimensionMismatch}, or Error{InvalidParams} when the support
/// has fewer than kMinSupport pixels.
double ncc(const GrayImage& tmpl, const BinaryImage& mask, const GrayImage& window);

/// One exemplar at one scale, placed relative to an anchor.
struct Placement {
  int exemplar = 0;
  bool positive = true;
  double scale = 1.0;
  int w = 0;
  int h = 0;
  /// Offset of the placement's top-left corner from the anchor.
  int dx = 0;
  int dy = 0;
};

/// Dense pre-NMS score surface over anchor positions. An anchor (x, y) is the
/// top-left corner of the reference box (the first positive at scale 1);
/// other exemplars and scales are centred on that box.
struct ScoreMap {
  int width = 0;   // anchor columns
  int height = 0;  // anchor rows
  int ref_w = 0;
  int ref_h = 0;
  /// max over positives/scales minus the weighted negative evidence, clamped
  /// to [-1, 1]; NaN where no positive placement fits inside the page.
  std::vector<double> score;
  /// Positive component alone (max over positives/scales).
  std::vector<float> positive;
  /// Index into `placements` of the winning positive at each anchor.
  std::vector<std::uint16_t> best;
  std::vector<Placement> placements;

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  double at(int x, int y) const { return score[index(x, y)]; }
  BoundingBox best_box(int x, int y) const;
  double best_scale(int x, int y) const { return placements[best[index(x, y)]].scale; }
};

/// Template resampled by `scale` (bilinear for the cleaned crop, nearest for
/// the mask). Scale 1 returns the input unchanged.
WordTemplate rescale_template(const WordTemplate& t, double scale);

ScoreMap score_map(const QueryModel& q, const Page& page, const EngineConfig& cfg);

/// Greedy non-maximum suppression: by descending score (ties by page, y, x),
/// a candidate survives iff its IoU with every survivor is <= iou_max.
std::vector<Candidate> nms(std::vector<Candidate> cands, double iou_max = 0.3);

/// Score one page: local maxima of the score map on a `cfg.stride` grid,
/// refined at stride 1, kept when >= q.threshold, then NMS. Sorted by
/// descending score, ties by (page_id, y, x).
std::vector<Candidate> score_page(const QueryModel& q, const Page& page, const EngineConfig& cfg);

/// Total order used for every ranked list.
bool candidate_before(const Candidate& a, const Candidate& b);

}  // namespace text
