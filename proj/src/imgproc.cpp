#include "text/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "text/error.hpp"

namespace text {

namespace {

// DoG responses below input resolution (1/255) by many orders of magnitude
// are rounding residue of blurring a constant; treat them as zero.
constexpr double kResponseFloor = 1e-9;

std::vector<double> blur_all(const GrayImage& img, double sigma) {
  const int w = img.width();
  const int h = img.height();
  const std::vector<double> k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);

  // Horizontal pass.
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  std::vector<double> padded(static_cast<std::size_t>(w) + 2 * r);
  std::vector<int> xmap(padded.size());
  for (int i = 0; i < static_cast<int>(padded.size()); ++i) xmap[i] = reflect_index(i - r, w);
  for (int y = 0; y < h; ++y) {
    auto src = img.row(y);
    for (std::size_t i = 0; i < padded.size(); ++i) padded[i] = src[xmap[i]];
    double* acc = tmp.data() + static_cast<std::size_t>(y) * w;
    std::fill(acc, acc + w, 0.0);
    for (std::size_t t = 0; t < k.size(); ++t) {
      const double kt = k[t];
      const double* p = padded.data() + t;
      for (int x = 0; x < w; ++x) acc[x] += kt * p[x];
    }
  }

  // Vertical pass.
  std::vector<double> out(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    double* acc = out.data() + static_cast<std::size_t>(y) * w;
    for (std::size_t t = 0; t < k.size(); ++t) {
      const double kt = k[t];
      const int sy = reflect_index(y - r + static_cast<int>(t), h);
      const double* p = tmp.data() + static_cast<std::size_t>(sy) * w;
      for (int x = 0; x < w; ++x) acc[x] += kt * p[x];
    }
  }
  return out;
}

}  // namespace

int reflect_index(int i, int n) {
  if (n <= 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  const double s2 = 2.0 * sigma * sigma;
  for (int i = -r; i <= r; ++i) k[i + r] = std::exp(-(i * i) / s2);
  const double sum = std::accumulate(k.begin(), k.end(), 0.0);
  for (double& v : k) v /= sum;
  return k;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidParams, "gaussian sigma must be > 0");
  GrayImage out(img.width(), img.height());
  if (img.empty()) return out;
  const std::vector<double> b = blur_all(img, sigma);
  std::transform(b.begin(), b.end(), out.pixels().begin(),
                 [](double v) { return static_cast<float>(v); });
  return out;
}

GrayImage bandpass_clean(const GrayImage& img, const BandpassParams& p) {
  p.validate();
  GrayImage out(img.width(), img.height(), 0.0f);
  if (img.empty()) return out;

  // DoG of the inverted image equals the negated DoG of the image: the
  // constant 1 cancels between the two normalized blurs.
  std::vector<double> region_lo = blur_all(img, p.sigma_bg_lo);
  {
    const std::vector<double> region_hi = blur_all(img, p.sigma_bg_hi);
    for (std::size_t i = 0; i < region_lo.size(); ++i) {
      const double response = region_hi[i] - region_lo[i];
      region_lo[i] = response > kResponseFloor ? std::min(1.0, response / p.region_gain) : 0.0;
    }
  }
  const std::vector<double>& gate = region_lo;

  std::vector<double> stroke = blur_all(img, p.sigma_stroke_lo);
  const std::vector<double> stroke_hi = blur_all(img, p.sigma_stroke_hi);
  auto& dst = out.pixels();
  for (std::size_t i = 0; i < stroke.size(); ++i) {
    const double response = stroke_hi[i] - stroke[i];
    if (response <= kResponseFloor || gate[i] == 0.0) continue;
    dst[i] = static_cast<float>(std::min(1.0, response * gate[i] / p.stroke_gain));
  }
  return out;
}

double otsu_between_variance(const std::vector<long long>& hist, int t) {
  double w0 = 0.0, s0 = 0.0, w1 = 0.0, s1 = 0.0;
  for (int i = 0; i < static_cast<int>(hist.size()); ++i) {
    const double c = static_cast<double>(hist[i]);
    if (i <= t) {
      w0 += c;
      s0 += c * i;
    } else {
      w1 += c;
      s1 += c * i;
    }
  }
  if (w0 == 0.0 || w1 == 0.0) return 0.0;
  const double d = s0 / w0 - s1 / w1;
  return w0 * w1 * d * d;
}

OtsuResult binarize_otsu(const GrayImage& img) {
  OtsuResult res;
  res.binary = BinaryImage(img.width(), img.height(), 0);

  std::vector<int> q(img.size());
  std::vector<long long> hist(256, 0);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = std::clamp(static_cast<double>(img.pixels()[i]), 0.0, 1.0);
    q[i] = static_cast<int>(std::lround(v * 255.0));
    ++hist[q[i]];
  }
  const auto occupied = std::count_if(hist.begin(), hist.end(), [](long long c) { return c > 0; });
  if (occupied < 2) {
    res.degenerate = true;
    return res;
  }

  // Incremental scan; equal maxima form a plateau across empty bins and the
  // cut is placed at the plateau's middle.
  const double total = static_cast<double>(img.size());
  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += static_cast<double>(hist[i]) * i;
  double w0 = 0.0, s0 = 0.0, best = -1.0;
  int best_lo = 0, best_hi = 0;
  for (int t = 0; t < 255; ++t) {
    w0 += static_cast<double>(hist[t]);
    s0 += static_cast<double>(hist[t]) * t;
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double d = s0 / w0 - (sum_all - s0) / w1;
    const double between = w0 * w1 * d * d;
    if (between > best) {
      best = between;
      best_lo = best_hi = t;
    } else if (between == best && best_hi == t - 1) {
      best_hi = t;
    }
  }
  const int t = (best_lo + best_hi) / 2;
  res.threshold_bin = t;
  res.threshold = (t + 0.5) / 255.0;
  for (std::size_t i = 0; i < q.size(); ++i) res.binary.pixels()[i] = q[i] > t ? 1 : 0;
  return res;
}

Components connected_components(const BinaryImage& img, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw Error(ErrorCode::InvalidParams, "connectivity must be 4 or 8");
  }
  const int w = img.width();
  const int h = img.height();
  Components out;
  out.labels = LabelMap(w, h, 0);
  if (img.empty()) return out;

  std::vector<int> parent{0};
  auto find = [&parent](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto join = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  LabelMap& lab = out.labels;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.at(x, y)) continue;
      int current = 0;
      auto visit = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w) return;
        const int l = lab.at(nx, ny);
        if (l == 0) return;
        if (current == 0) current = l;
        else join(current, l);
      };
      visit(x - 1, y);
      visit(x, y - 1);
      if (connectivity == 8) {
        visit(x - 1, y - 1);
        visit(x + 1, y - 1);
      }
      if (current == 0) {
        current = static_cast<int>(parent.size());
        parent.push_back(current);
      }
      lab.at(x, y) = current;
    }
  }

  // Resolve roots and gather statistics per root.
  struct Acc {
    long long area = 0;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double sx = 0.0, sy = 0.0;
  };
  std::vector<int> root_slot(parent.size(), -1);
  std::vector<Acc> acc;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int& l = lab.at(x, y);
      if (l == 0) continue;
      const int r = find(l);
      if (root_slot[r] < 0) {
        root_slot[r] = static_cast<int>(acc.size());
        acc.push_back({0, x, y, x, y, 0.0, 0.0});
      }
      l = root_slot[r] + 1;
      Acc& a = acc[root_slot[r]];
      ++a.area;
      a.x0 = std::min(a.x0, x);
      a.x1 = std::max(a.x1, x);
      a.y0 = std::min(a.y0, y);
      a.y1 = std::max(a.y1, y);
      a.sx += x;
      a.sy += y;
    }
  }

  std::vector<ComponentStats> stats(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const Acc& a = acc[i];
    stats[i].label = static_cast<int>(i) + 1;
    stats[i].area = a.area;
    stats[i].bbox = {a.x0, a.y0, a.x1 - a.x0 + 1, a.y1 - a.y0 + 1};
    stats[i].cx = a.sx / static_cast<double>(a.area);
    stats[i].cy = a.sy / static_cast<double>(a.area);
  }
  std::sort(stats.begin(), stats.end(), [](const ComponentStats& a, const ComponentStats& b) {
    return std::tie(b.area, a.bbox.y, a.bbox.x) < std::tie(a.area, b.bbox.y, b.bbox.x);
  });
  std::vector<int> relabel(stats.size() + 1, 0);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    relabel[stats[i].label] = static_cast<int>(i) + 1;
    stats[i].label = static_cast<int>(i) + 1;
  }
  for (auto& l : lab.pixels()) l = relabel[l];
  out.stats = std::move(stats);
  return out;
}

BinaryImage remove_speckle(const Components& comps, const BinaryImage& img, int min_area) {
  std::vector<std::uint8_t> keep(comps.stats.size() + 1, 0);
  for (const auto& s : comps.stats) keep[s.label] = s.area >= min_area ? 1 : 0;
  BinaryImage out = img;
  auto& px = out.pixels();
  const auto& lab = comps.labels.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (px[i] && lab[i] > 0 && !keep[lab[i]]) px[i] = 0;
  }
  return out;
}

BinaryImage dilate(const BinaryImage& img, int radius) {
  const int w = img.width();
  const int h = img.height();
  if (radius <= 0) return img;
  // Separable: a square structuring element is the product of two segments.
  BinaryImage horiz(w, h, 0);
  for (int y = 0; y < h; ++y) {
    auto src = img.row(y);
    auto dst = horiz.row(y);
    for (int x = 0; x < w; ++x) {
      if (!src[x]) continue;
      const int a = std::max(0, x - radius);
      const int b = std::min(w - 1, x + radius);
      std::fill(dst.begin() + a, dst.begin() + b + 1, std::uint8_t{1});
    }
  }
  BinaryImage out(w, h, 0);
  for (int y = 0; y < h; ++y) {
    auto src = horiz.row(y);
    const int a = std::max(0, y - radius);
    const int b = std::min(h - 1, y + radius);
    for (int yy = a; yy <= b; ++yy) {
      auto dst = out.row(yy);
      for (int x = 0; x < w; ++x) dst[x] |= src[x];
    }
  }
  return out;
}

GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
  GrayImage out(width, height);
  if (img.empty() || width <= 0 || height <= 0) return out;
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ay = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double ax = fx - x0;
      const double top = img.at(x0, y0) * (1.0 - ax) + img.at(x1, y0) * ax;
      const double bot = img.at(x0, y1) * (1.0 - ax) + img.at(x1, y1) * ax;
      out.at(x, y) = static_cast<float>(top * (1.0 - ay) + bot * ay);
    }
  }
  return out;
}

BinaryImage resize_nearest(const BinaryImage& img, int width, int height) {
  BinaryImage out(width, height, 0);
  if (img.empty() || width <= 0 || height <= 0) return out;
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(img.height() - 1,
                            static_cast<int>((y + 0.5) * img.height() / height));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(img.width() - 1, static_cast<int>((x + 0.5) * img.width() / width));
      out.at(x, y) = img.at(sx, sy);
    }
  }
  return out;
}

long long count_ink(const BinaryImage& img) {
  return std::count_if(img.pixels().begin(), img.pixels().end(), [](std::uint8_t v) { return v != 0; });
}

}  // namespace text
