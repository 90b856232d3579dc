#include "text/page.hpp"

#include <algorithm>

#include "text/error.hpp"
#include "text/image_io.hpp"

namespace text {

namespace {

constexpr double kFootprintLevel = 0.5;
constexpr int kFootprintReach = 2;

// Darkness of each pixel below its local background.
std::vector<float> local_contrast(const GrayImage& unit, double sigma) {
  const GrayImage background = gaussian_blur(unit, sigma);
  std::vector<float> c(unit.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::max(0.0f, background.pixels()[i] - unit.pixels()[i]);
  return c;
}

std::vector<float> peak_contrast(const Components& comps, const std::vector<float>& contrast) {
  std::vector<float> peak(comps.stats.size() + 1, 0.0f);
  const auto& lab = comps.labels.pixels();
  for (std::size_t i = 0; i < lab.size(); ++i) {
    if (lab[i] > 0) peak[lab[i]] = std::max(peak[lab[i]], contrast[i]);
  }
  return peak;
}

BinaryImage drop_speckles(const Components& comps, const BinaryImage& binary, const std::vector<float>& contrast,
                          int min_area) {
  // Area counted on the drawn footprint: the band-pass widens every blob by
  // about a pixel, which would let a 2x2 dot pass for a 16 px component.
  const std::vector<float> peak = peak_contrast(comps, contrast);
  std::vector<long long> area(peak.size(), 0);
  const auto& lab = comps.labels.pixels();
  for (std::size_t i = 0; i < lab.size(); ++i) {
    const int l = lab[i];
    if (l > 0 && (peak[l] <= 0.0f || contrast[i] >= kFootprintLevel * peak[l])) ++area[l];
  }
  BinaryImage out = binary;
  for (std::size_t i = 0; i < lab.size(); ++i) {
    if (lab[i] > 0 && area[lab[i]] < min_area) out.pixels()[i] = 0;
  }
  return out;
}

std::vector<BoundingBox> footprints(const Components& comps, const std::vector<float>& contrast) {
  const std::vector<float> peak = peak_contrast(comps, contrast);
  const LabelMap& labels = comps.labels;
  const int w = labels.width(), h = labels.height();
  std::vector<BoundingBox> out;
  out.reserve(comps.stats.size());
  for (const ComponentStats& c : comps.stats) {
    const float level = static_cast<float>(kFootprintLevel) * peak[c.label];
    if (!(peak[c.label] > 0.0f)) {
      out.push_back(c.bbox);
      continue;
    }
    int x0 = w, y0 = h, x1 = -1, y1 = -1;
    const int ya = std::max(0, c.bbox.y - kFootprintReach), yb = std::min(h, c.bbox.bottom() + kFootprintReach);
    const int xa = std::max(0, c.bbox.x - kFootprintReach), xb = std::min(w, c.bbox.right() + kFootprintReach);
    for (int y = ya; y < yb; ++y) {
      for (int x = xa; x < xb; ++x) {
        if (contrast[static_cast<std::size_t>(y) * w + x] < level) continue;
        bool near = false;
        for (int dy = -kFootprintReach; dy <= kFootprintReach && !near; ++dy) {
          const int sy = y + dy;
          if (sy < 0 || sy >= h) continue;
          for (int dx = -kFootprintReach; dx <= kFootprintReach; ++dx) {
            const int sx = x + dx;
            if (sx >= 0 && sx < w && labels.at(sx, sy) == c.label) {
              near = true;
              break;
            }
          }
        }
        if (!near) continue;
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
    }
    out.push_back(x1 < 0 ? c.bbox : BoundingBox{x0, y0, x1 - x0 + 1, y1 - y0 + 1});
  }
  return out;
}

}  // namespace

std::shared_ptr<const PageLayers> compute_layers(const Gray8Image& gray, const EngineConfig& cfg) {
  auto layers = std::make_shared<PageLayers>();
  layers->params = cfg.bandpass;
  layers->speckle_min_area = cfg.speckle_min_area;
  const GrayImage unit = to_unit(gray);
  layers->cleaned = bandpass_clean(unit, cfg.bandpass);
  OtsuResult otsu = binarize_otsu(layers->cleaned);
  layers->threshold_bin = otsu.threshold_bin;
  const std::vector<float> contrast = local_contrast(unit, cfg.bandpass.sigma_stroke_hi);
  const Components raw = connected_components(otsu.binary);
  layers->ink = drop_speckles(raw, otsu.binary, contrast, cfg.speckle_min_area);
  layers->components = connected_components(layers->ink);
  layers->footprints = footprints(layers->components, contrast);
  return layers;
}

Page::Page(int id, std::string source_name, Gray8Image gray)
    : id_(id), source_name_(std::move(source_name)), gray_(std::move(gray)) {
  if (gray_.width() < kMinSide || gray_.height() < kMinSide) {
    throw Error(ErrorCode::PageTooSmall,
                "page '" + source_name_ + "' is " + std::to_string(gray_.width()) + "x" +
                    std::to_string(gray_.height()) + ", minimum side is 32 px");
  }
}

std::shared_ptr<const PageLayers> Page::layers(const EngineConfig& cfg) const {
  std::lock_guard lock(mu_);
  if (!layers_ || layers_->params != cfg.bandpass ||
      layers_->speckle_min_area != cfg.speckle_min_area) {
    layers_ = compute_layers(gray_, cfg);
  }
  return layers_;
}

bool Page::has_layers() const {
  std::lock_guard lock(mu_);
  return layers_ != nullptr;
}

}  // namespace text
