#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "text/project.hpp"

namespace text {

inline constexpr int kGroundTruthFormatVersion = 1;

/// Relative path of the crop image for a box, shared by every entry on it.
std::string crop_name(int page_id, const BoundingBox& box);

/// Per page, every query word and confirmed match as
/// {id, query_id, box, transcription, category, state, crop}, ordered by
/// (y, x). Pages without words carry an empty array.
nlohmann::json ground_truth_json(const Project& project);

/// ground_truth_json serialized the same way every time.
std::string ground_truth_text(const Project& project);

struct ExportSummary {
  int entries = 0;
  int crops = 0;
};

/// Write `dir/ground_truth.json` plus one inverted cleaned crop PNG per
/// distinct box under `dir/crops/`. Throws Error{IoFailure}.
ExportSummary export_bundle(const Project& project, const std::filesystem::path& dir);

}  // namespace text
