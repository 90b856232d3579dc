#include "text/config.hpp"

#include <algorithm>
#include <thread>

#include "text/error.hpp"

namespace text {

void BandpassParams::validate() const {
  const bool ordered = sigma_stroke_lo > 0.0 && sigma_stroke_lo < sigma_stroke_hi &&
                       sigma_stroke_hi < sigma_bg_lo && sigma_bg_lo < sigma_bg_hi;
  if (!ordered) {
    throw Error(ErrorCode::InvalidParams,
                "band-pass sigmas must satisfy 0 < stroke_lo < stroke_hi < bg_lo < bg_hi");
  }
  if (!(stroke_gain > 0.0) || !(region_gain > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "band-pass gains must be positive");
  }
}

void EngineConfig::validate() const {
  bandpass.validate();
  if (speckle_min_area < 0) throw Error(ErrorCode::InvalidParams, "speckle_min_area < 0");
  if (snap_pad < 0) throw Error(ErrorCode::InvalidParams, "snap_pad < 0");
  if (scales.empty() || !std::is_sorted(scales.begin(), scales.end()) ||
      std::any_of(scales.begin(), scales.end(), [](double s) { return !(s > 0.5 && s < 2.0); })) {
    throw Error(ErrorCode::InvalidParams, "scales must be sorted and inside (0.5, 2.0)");
  }
  if (stride < 1) throw Error(ErrorCode::InvalidParams, "stride < 1");
  if (default_threshold < 0.3 || default_threshold > 0.9) {
    throw Error(ErrorCode::InvalidParams, "default_threshold outside [0.3, 0.9]");
  }
}

int EngineConfig::resolved_workers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void to_json(nlohmann::json& j, const BandpassParams& p) {
  j = {{"sigma_stroke_lo", p.sigma_stroke_lo}, {"sigma_stroke_hi", p.sigma_stroke_hi},
       {"sigma_bg_lo", p.sigma_bg_lo},         {"sigma_bg_hi", p.sigma_bg_hi},
       {"stroke_gain", p.stroke_gain},         {"region_gain", p.region_gain}};
}

void from_json(const nlohmann::json& j, BandpassParams& p) {
  BandpassParams d;
  p.sigma_stroke_lo = j.value("sigma_stroke_lo", d.sigma_stroke_lo);
  p.sigma_stroke_hi = j.value("sigma_stroke_hi", d.sigma_stroke_hi);
  p.sigma_bg_lo = j.value("sigma_bg_lo", d.sigma_bg_lo);
  p.sigma_bg_hi = j.value("sigma_bg_hi", d.sigma_bg_hi);
  p.stroke_gain = j.value("stroke_gain", d.stroke_gain);
  p.region_gain = j.value("region_gain", d.region_gain);
}

void to_json(nlohmann::json& j, const EngineConfig& c) {
  j = {{"bandpass", c.bandpass},
       {"speckle_min_area", c.speckle_min_area},
       {"snap_pad", c.snap_pad},
       {"snap_inclusion_ratio", c.snap_inclusion_ratio},
       {"intruder_outside_ratio", c.intruder_outside_ratio},
       {"scales", c.scales},
       {"stride", c.stride},
       {"negative_weight", c.negative_weight},
       {"default_threshold", c.default_threshold},
       {"nms_iou", c.nms_iou},
       {"blacklist_iou", c.blacklist_iou},
       {"line_overlap", c.line_overlap},
       {"workers", c.workers}};
}

void from_json(const nlohmann::json& j, EngineConfig& c) {
  EngineConfig d;
  c.bandpass = j.value("bandpass", d.bandpass);
  c.speckle_min_area = j.value("speckle_min_area", d.speckle_min_area);
  c.snap_pad = j.value("snap_pad", d.snap_pad);
  c.snap_inclusion_ratio = j.value("snap_inclusion_ratio", d.snap_inclusion_ratio);
  c.intruder_outside_ratio = j.value("intruder_outside_ratio", d.intruder_outside_ratio);
  c.scales = j.value("scales", d.scales);
  c.stride = j.value("stride", d.stride);
  c.negative_weight = j.value("negative_weight", d.negative_weight);
  c.default_threshold = j.value("default_threshold", d.default_threshold);
  c.nms_iou = j.value("nms_iou", d.nms_iou);
  c.blacklist_iou = j.value("blacklist_iou", d.blacklist_iou);
  c.line_overlap = j.value("line_overlap", d.line_overlap);
  c.workers = j.value("workers", d.workers);
}

}  // namespace text
