#pragma once

#include <vector>

#include <json.hpp>

namespace text {

/// Two difference-of-Gaussians bands: a stroke band that responds to pen
/// strokes, gated by a text-region band that is only high near text mass.
/// The gains map a band response onto [0, 1] (response / gain, clipped).
struct BandpassParams {
  double sigma_stroke_lo = 1.0;
  double sigma_stroke_hi = 8.0;
  double sigma_bg_lo = 16.0;
  double sigma_bg_hi = 64.0;
  double stroke_gain = 0.22;
  double region_gain = 0.01;

  /// Throws Error{InvalidParams} unless 0 < lo < hi < bg_lo < bg_hi and gains > 0.
  void validate() const;

  bool operator==(const BandpassParams&) const = default;
};

struct EngineConfig {
  BandpassParams bandpass;

  int speckle_min_area = 5;

  // snapping / template extraction
  int snap_pad = 8;
  double snap_inclusion_ratio = 0.6;
  double intruder_outside_ratio = 0.4;

  // spotting
  std::vector<double> scales{0.9, 1.0, 1.1};
  int stride = 2;
  double negative_weight = 0.5;
  double default_threshold = 0.55;
  double nms_iou = 0.3;

  // feedback
  double blacklist_iou = 0.5;

  // transcription assembly
  double line_overlap = 0.5;

  /// 0 selects std::thread::hardware_concurrency().
  int workers = 0;

  void validate() const;
  int resolved_workers() const;

  bool operator==(const EngineConfig&) const = default;
};

void to_json(nlohmann::json& j, const BandpassParams& p);
void from_json(const nlohmann::json& j, BandpassParams& p);
void to_json(nlohmann::json& j, const EngineConfig& c);
void from_json(const nlohmann::json& j, EngineConfig& c);

}  // namespace text
