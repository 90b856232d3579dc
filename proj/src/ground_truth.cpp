#include "text/ground_truth.hpp"

#include <fstream>
#include <set>
#include <system_error>

#include "text/error.hpp"
#include "text/image_io.hpp"
#include "text/workbench.hpp"

namespace fs = std::filesystem;

namespace text {

std::string crop_name(int page_id, const BoundingBox& box) {
  return "crops/p" + std::to_string(page_id) + "_x" + std::to_string(box.x) + "_y" + std::to_string(box.y) +
         "_w" + std::to_string(box.w) + "_h" + std::to_string(box.h) + ".png";
}

nlohmann::json ground_truth_json(const Project& project) {
  const std::vector<PlacedWord> words = placed_words(project);
  nlohmann::json pages = nlohmann::json::array();
  for (const PagePtr& page : project.pages) {
    nlohmann::json entries = nlohmann::json::array();
    for (const PlacedWord& w : words) {
      if (w.page_id != page->id()) continue;
      entries.push_back({{"id", w.id},
                         {"query_id", w.query_id},
                         {"box", w.box},
                         {"transcription", w.transcription},
                         {"category", to_string(w.category)},
                         {"state", w.is_query ? "query" : "confirmed"},
                         {"crop", crop_name(w.page_id, w.box)}});
    }
    pages.push_back({{"page", page->id()},
                     {"source_name", page->source_name()},
                     {"width", page->width()},
                     {"height", page->height()},
                     {"words", std::move(entries)}});
  }
  return {{"format", "text-ground-truth"},
          {"format_version", kGroundTruthFormatVersion},
          {"project_id", project.id},
          {"pages", std::move(pages)}};
}

std::string ground_truth_text(const Project& project) { return ground_truth_json(project).dump(2) + "\n"; }

ExportSummary export_bundle(const Project& project, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "crops", ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + (dir / "crops").string() + ": " + ec.message());

  ExportSummary summary;
  std::set<std::string> written;
  for (const PlacedWord& w : placed_words(project)) {
    ++summary.entries;
    const std::string name = crop_name(w.page_id, w.box);
    if (!written.insert(name).second) continue;
    const auto layers = project.page(w.page_id).layers(project.config);
    const auto clipped = clamp_to(w.box, layers->cleaned.width(), layers->cleaned.height());
    if (!clipped) continue;
    write_png(dir / name, to_gray8_inverted(crop(layers->cleaned, *clipped)));
    ++summary.crops;
  }

  const fs::path json_path = dir / "ground_truth.json";
  std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + json_path.string());
  out << ground_truth_text(project);
  if (!out.flush()) throw Error(ErrorCode::IoFailure, "cannot write " + json_path.string());
  return summary;
}

}  // namespace text
