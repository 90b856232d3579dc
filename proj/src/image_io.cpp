#include "text/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "text/error.hpp"

namespace text {

namespace {

std::uint8_t luma601(double r, double g, double b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

std::uint8_t quantize(float v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(static_cast<double>(v) * 255.0), 0L, 255L));
}

}  // namespace

bool is_supported_image(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".tif" || ext == ".tiff";
}

Gray8Image read_gray8(const std::filesystem::path& path) {
  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::UnreadableImage, "cannot decode " + path.string() + ": " + e.what());
  }
  if (m.empty()) throw Error(ErrorCode::UnreadableImage, "cannot decode " + path.string());

  if (m.depth() == CV_16U) {
    m.convertTo(m, CV_8U, 1.0 / 257.0);
  } else if (m.depth() != CV_8U) {
    throw Error(ErrorCode::UnreadableImage, "unsupported sample depth in " + path.string());
  }

  Gray8Image out(m.cols, m.rows);
  const int channels = m.channels();
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* src = m.ptr<std::uint8_t>(y);
    auto dst = out.row(y);
    for (int x = 0; x < m.cols; ++x) {
      const std::uint8_t* px = src + static_cast<std::ptrdiff_t>(x) * channels;
      if (channels == 1 || channels == 2) {
        dst[x] = px[0];
      } else {
        // OpenCV decodes color as BGR(A).
        dst[x] = luma601(px[2], px[1], px[0]);
      }
    }
  }
  return out;
}

std::vector<unsigned char> encode_png(const Gray8Image& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC1,
            const_cast<std::uint8_t*>(img.pixels().data()));
  std::vector<unsigned char> buf;
  if (!cv::imencode(".png", m, buf)) throw Error(ErrorCode::IoFailure, "PNG encoding failed");
  return buf;
}

void write_png(const std::filesystem::path& path, const Gray8Image& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC1,
            const_cast<std::uint8_t*>(img.pixels().data()));
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception&) {
    ok = false;
  }
  if (!ok) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

Gray8Image to_gray8(const GrayImage& img) {
  Gray8Image out(img.width(), img.height());
  std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(), quantize);
  return out;
}

Gray8Image to_gray8_inverted(const GrayImage& img) {
  Gray8Image out(img.width(), img.height());
  std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                 [](float v) { return quantize(1.0f - v); });
  return out;
}

Gray8Image binary_to_gray8(const BinaryImage& img) {
  Gray8Image out(img.width(), img.height());
  std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v ? 0 : 255; });
  return out;
}

GrayImage to_unit(const Gray8Image& img) {
  GrayImage out(img.width(), img.height());
  std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                 [](std::uint8_t v) { return static_cast<float>(v) / 255.0f; });
  return out;
}

}  // namespace text
