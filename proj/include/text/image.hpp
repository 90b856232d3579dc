#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "text/geometry.hpp"

namespace text {

/// Dense row-major raster.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::vector<T>& pixels() { return data_; }
  const std::vector<T>& pixels() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Normalized luminance in [0, 1].
using GrayImage = Image<float>;
/// 0 = background, 1 = ink.
using BinaryImage = Image<std::uint8_t>;
/// 8-bit page luminance as decoded from disk.
using Gray8Image = Image<std::uint8_t>;
using LabelMap = Image<std::int32_t>;

/// Copy of the pixels under `box`; `box` must lie inside the image.
template <typename T>
Image<T> crop(const Image<T>& img, const BoundingBox& box) {
  Image<T> out(box.w, box.h);
  for (int y = 0; y < box.h; ++y) {
    auto src = img.row(box.y + y).subspan(static_cast<std::size_t>(box.x), static_cast<std::size_t>(box.w));
    auto dst = out.row(y);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

}  // namespace text
