#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "text/config.hpp"
#include "text/image.hpp"
#include "text/imgproc.hpp"

namespace text {

/// Derived per-page rasters shared by snapping, template extraction and search.
struct PageLayers {
  BandpassParams params;
  int speckle_min_area = 0;
  /// Band-pass cleaned page, ink bright.
  GrayImage cleaned;
  /// Otsu cut applied to `cleaned`.
  int threshold_bin = 255;
  /// Binarized `cleaned` with speckles removed.
  BinaryImage ink;
  /// 8-connected components of `ink`.
  Components components;
  /// Per component (index label - 1): bounding box of the pixels within 2 px
  /// of it that are at least half as dark, relative to the local background,
  /// as its darkest pixel. Tracks the drawn ink rather than the filter's halo.
  std::vector<BoundingBox> footprints;
};

std::shared_ptr<const PageLayers> compute_layers(const Gray8Image& gray, const EngineConfig& cfg);

/// One scanned manuscript page. Pixels are immutable once loaded; derived
/// layers are computed lazily and cached (thread-safe).
class Page {
 public:
  static constexpr int kMinSide = 32;

  Page(int id, std::string source_name, Gray8Image gray);

  int id() const { return id_; }
  const std::string& source_name() const { return source_name_; }
  int width() const { return gray_.width(); }
  int height() const { return gray_.height(); }
  const Gray8Image& gray() const { return gray_; }

  /// Cleaned/binary/label layers for the band-pass and speckle settings in
  /// `cfg`. Recomputed if those settings differ from the cached ones.
  std::shared_ptr<const PageLayers> layers(const EngineConfig& cfg) const;
  bool has_layers() const;

  /// Equality over identity and pixels; caches are ignored.
  bool operator==(const Page& other) const {
    return id_ == other.id_ && source_name_ == other.source_name_ && gray_ == other.gray_;
  }

 private:
  int id_;
  std::string source_name_;
  Gray8Image gray_;
  mutable std::mutex mu_;
  mutable std::shared_ptr<const PageLayers> layers_;
};

using PagePtr = std::shared_ptr<const Page>;

}  // namespace text
