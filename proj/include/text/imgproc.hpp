#pragma once

#include <vector>

#include "text/config.hpp"
#include "text/geometry.hpp"
#include "text/image.hpp"

namespace text {

/// Mirror an out-of-range index back into [0, n): ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
/// Repeats periodically, so any integer maps into range even when a kernel
/// is wider than the image.
int reflect_index(int i, int n);

/// Normalized Gaussian taps for offsets -r..r with r = ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with reflect boundary handling.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Two-band difference-of-Gaussians cleaning. Ink comes out bright on a zero
/// background; output is in [0, 1] and invariant to adding a constant.
GrayImage bandpass_clean(const GrayImage& img, const BandpassParams& params);

struct OtsuResult {
  BinaryImage binary;
  /// Pixels whose 8-bit quantized value exceeds `threshold_bin` are ink.
  int threshold_bin = 255;
  /// (threshold_bin + 0.5) / 255, i.e. the real-valued cut.
  double threshold = 1.0;
  /// Fewer than two occupied histogram bins: everything is background.
  bool degenerate = false;
};

/// Otsu threshold over a 256-bin histogram of round(v * 255). Bright = ink.
OtsuResult binarize_otsu(const GrayImage& img);

/// Between-class variance for cut `t` (bins <= t vs > t) of a 256-bin histogram.
double otsu_between_variance(const std::vector<long long>& hist, int t);

struct ComponentStats {
  int label = 0;
  long long area = 0;
  BoundingBox bbox;
  double cx = 0.0;
  double cy = 0.0;
};

struct Components {
  /// 0 = background, otherwise 1..K; label k corresponds to stats[k-1].
  LabelMap labels;
  /// Descending area, ties by (bbox.y, bbox.x).
  std::vector<ComponentStats> stats;
};

Components connected_components(const BinaryImage& img, int connectivity = 8);

/// Erase components with area < min_area.
BinaryImage remove_speckle(const Components& comps, const BinaryImage& img, int min_area = 5);

/// Square (Chebyshev) dilation by `radius` pixels.
BinaryImage dilate(const BinaryImage& img, int radius);

/// Bilinear resampling to an explicit size (pixel-center aligned).
GrayImage resize_bilinear(const GrayImage& img, int width, int height);
/// Nearest-neighbour resampling, pixel-center aligned.
BinaryImage resize_nearest(const BinaryImage& img, int width, int height);

long long count_ink(const BinaryImage& img);

}  // namespace text
