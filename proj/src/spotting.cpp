#include "text/spotting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "fft_correlator.hpp"
#include "text/error.hpp"
#include "text/imgproc.hpp"

namespace text {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

// Template reduced to what the correlation needs.
struct PreparedTemplate {
  int w = 0;
  int h = 0;
  double n = 0.0;       // support size
  double tnorm2 = 0.0;  // sum of squared zero-mean template values on the support
  std::vector<double> tz;       // zero-mean template on the support, 0 elsewhere
  std::vector<double> support;  // 1 on the support
  bool usable = false;
  bool constant = false;
};

PreparedTemplate prepare(const WordTemplate& t) {
  PreparedTemplate p;
  p.w = t.cleaned.width();
  p.h = t.cleaned.height();
  const BinaryImage sup = dilate(t.mask, kSupportRadius);
  const std::size_t n = sup.size();
  p.support.assign(n, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sup.pixels()[i]) {
      p.support[i] = 1.0;
      p.n += 1.0;
      sum += t.cleaned.pixels()[i];
    }
  }
  if (p.n < kMinSupport) return p;
  p.usable = true;
  const double mean = sum / p.n;
  p.tz.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (p.support[i] != 0.0) {
      p.tz[i] = t.cleaned.pixels()[i] - mean;
      p.tnorm2 += p.tz[i] * p.tz[i];
    }
  }
  p.constant = p.tnorm2 / p.n <= kZeroVariance;
  return p;
}

// Everything about one page that is shared by all placements.
struct PageTransform {
  int w = 0;
  int h = 0;
  int rows = 0;
  int cols = 0;
  detail::Spectrum values;
  detail::Spectrum squares;
};

PageTransform transform_page(const GrayImage& cleaned) {
  PageTransform pt;
  pt.w = cleaned.width();
  pt.h = cleaned.height();
  pt.rows = detail::fft_friendly_size(pt.h);
  pt.cols = detail::fft_friendly_size(pt.w);
  std::vector<double> v(cleaned.size());
  std::vector<double> sq(cleaned.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = cleaned.pixels()[i];
    sq[i] = v[i] * v[i];
  }
  pt.values = detail::Spectrum(v.data(), pt.w, pt.h, pt.rows, pt.cols);
  pt.squares = detail::Spectrum(sq.data(), pt.w, pt.h, pt.rows, pt.cols);
  return pt;
}

// NCC at every valid placement of `t` on the page; (w-tw+1) x (h-th+1).
std::vector<double> ncc_surface(const PageTransform& page, const PreparedTemplate& t) {
  const int ow = page.w - t.w + 1;
  const int oh = page.h - t.h + 1;
  if (ow <= 0 || oh <= 0) return {};
  std::vector<double> out(static_cast<std::size_t>(ow) * oh, 0.0);
  if (t.constant) return out;

  const detail::Spectrum tz(t.tz.data(), t.w, t.h, page.rows, page.cols);
  const detail::Spectrum sup(t.support.data(), t.w, t.h, page.rows, page.cols);
  const std::vector<double> num = detail::correlate_valid(page.values, page.w, page.h, tz, t.w, t.h);
  const std::vector<double> s1 = detail::correlate_valid(page.values, page.w, page.h, sup, t.w, t.h);
  const std::vector<double> s2 = detail::correlate_valid(page.squares, page.w, page.h, sup, t.w, t.h);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double var_n = s2[i] - s1[i] * s1[i] / t.n;
    if (var_n / t.n <= kZeroVariance) continue;
    out[i] = std::clamp(num[i] / std::sqrt(t.tnorm2 * var_n), -1.0, 1.0);
  }
  return out;
}

}  // namespace

void QueryModel::validate() const {
  if (positives.empty()) throw Error(ErrorCode::InvalidParams, "query model needs a positive exemplar");
  if (scales.empty() || !std::is_sorted(scales.begin(), scales.end()) ||
      std::any_of(scales.begin(), scales.end(), [](double s) { return !(s > 0.5 && s < 2.0); })) {
    throw Error(ErrorCode::InvalidParams, "scales must be sorted ascending inside (0.5, 2.0)");
  }
  if (!(threshold >= 0.3 && threshold <= 0.9)) {
    throw Error(ErrorCode::InvalidParams, "threshold must lie in [0.3, 0.9]");
  }
}

double ncc(const GrayImage& tmpl, const BinaryImage& mask, const GrayImage& window) {
  if (tmpl.width() != window.width() || tmpl.height() != window.height() ||
      mask.width() != tmpl.width() || mask.height() != tmpl.height()) {
    throw Error(ErrorCode::DimensionMismatch, "template, mask and window sizes differ");
  }
  const BinaryImage sup = dilate(mask, kSupportRadius);
  double n = 0.0, st = 0.0, sw = 0.0;
  for (std::size_t i = 0; i < sup.size(); ++i) {
    if (!sup.pixels()[i]) continue;
    n += 1.0;
    st += tmpl.pixels()[i];
    sw += window.pixels()[i];
  }
  if (n < kMinSupport) throw Error(ErrorCode::InvalidParams, "template support below 16 pixels");
  const double mt = st / n;
  const double mw = sw / n;
  double tt = 0.0, ww = 0.0, tw = 0.0;
  for (std::size_t i = 0; i < sup.size(); ++i) {
    if (!sup.pixels()[i]) continue;
    const double a = tmpl.pixels()[i] - mt;
    const double b = window.pixels()[i] - mw;
    tt += a * a;
    ww += b * b;
    tw += a * b;
  }
  if (tt / n <= kZeroVariance || ww / n <= kZeroVariance) return 0.0;
  return std::clamp(tw / std::sqrt(tt * ww), -1.0, 1.0);
}

WordTemplate rescale_template(const WordTemplate& t, double scale) {
  if (scale == 1.0) return t;
  const int w = std::max(1, static_cast<int>(std::lround(t.cleaned.width() * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(t.cleaned.height() * scale)));
  WordTemplate out;
  out.page_id = t.page_id;
  out.box = t.box;
  out.cleaned = resize_bilinear(t.cleaned, w, h);
  out.mask = resize_nearest(t.mask, w, h);
  return out;
}

BoundingBox ScoreMap::best_box(int x, int y) const {
  const Placement& p = placements[best[index(x, y)]];
  return {x + p.dx, y + p.dy, p.w, p.h};
}

ScoreMap score_map(const QueryModel& q, const Page& page, const EngineConfig& cfg) {
  q.validate();
  ScoreMap map;
  map.ref_w = q.positives.front().cleaned.width();
  map.ref_h = q.positives.front().cleaned.height();
  map.width = std::max(0, page.width() - map.ref_w + 1);
  map.height = std::max(0, page.height() - map.ref_h + 1);
  if (map.width == 0 || map.height == 0) return map;

  const std::size_t anchors = static_cast<std::size_t>(map.width) * map.height;
  std::vector<double> pos(anchors, -std::numeric_limits<double>::infinity());
  std::vector<double> neg(anchors, -std::numeric_limits<double>::infinity());
  map.best.assign(anchors, 0);

  const auto layers = page.layers(cfg);
  const PageTransform pt = transform_page(layers->cleaned);

  auto accumulate = [&](const WordTemplate& exemplar, int index, bool positive) {
    for (double s : q.scales) {
      const PreparedTemplate t = prepare(rescale_template(exemplar, s));
      if (!t.usable) continue;
      const std::vector<double> surface = ncc_surface(pt, t);
      if (surface.empty()) continue;
      const int ow = pt.w - t.w + 1;
      const int oh = pt.h - t.h + 1;
      Placement pl{index, positive, s, t.w, t.h, floor_div2(map.ref_w - t.w), floor_div2(map.ref_h - t.h)};
      const auto slot = static_cast<std::uint16_t>(map.placements.size());
      map.placements.push_back(pl);
      std::vector<double>& target = positive ? pos : neg;
      const int x0 = std::max(0, -pl.dx);
      const int x1 = std::min(map.width, ow - pl.dx);
      const int y0 = std::max(0, -pl.dy);
      const int y1 = std::min(map.height, oh - pl.dy);
      for (int y = y0; y < y1; ++y) {
        const double* src = surface.data() + static_cast<std::size_t>(y + pl.dy) * ow + pl.dx;
        double* dst = target.data() + map.index(0, y);
        std::uint16_t* arg = map.best.data() + map.index(0, y);
        for (int x = x0; x < x1; ++x) {
          if (src[x] > dst[x]) {
            dst[x] = src[x];
            if (positive) arg[x] = slot;
          }
        }
      }
    }
  };
  for (std::size_t i = 0; i < q.positives.size(); ++i) accumulate(q.positives[i], static_cast<int>(i), true);
  for (std::size_t i = 0; i < q.negatives.size(); ++i) accumulate(q.negatives[i], static_cast<int>(i), false);

  map.score.assign(anchors, kNaN);
  map.positive.assign(anchors, std::numeric_limits<float>::quiet_NaN());
  for (std::size_t i = 0; i < anchors; ++i) {
    if (!std::isfinite(pos[i])) continue;
    const double penalty = std::isfinite(neg[i]) ? std::max(0.0, neg[i]) : 0.0;
    map.positive[i] = static_cast<float>(pos[i]);
    map.score[i] = std::clamp(pos[i] - cfg.negative_weight * penalty, -1.0, 1.0);
  }
  return map;
}

bool candidate_before(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.page_id, a.box.y, a.box.x, a.box.h, a.box.w) <
         std::tie(b.page_id, b.box.y, b.box.x, b.box.h, b.box.w);
}

std::vector<Candidate> nms(std::vector<Candidate> cands, double iou_max) {
  std::sort(cands.begin(), cands.end(), candidate_before);
  std::vector<Candidate> kept;
  for (const Candidate& c : cands) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      return k.page_id != c.page_id || iou(k.box, c.box) <= iou_max;
    });
    if (clear) kept.push_back(c);
  }
  return kept;
}

std::vector<Candidate> score_page(const QueryModel& q, const Page& page, const EngineConfig& cfg) {
  const ScoreMap map = score_map(q, page, cfg);
  if (map.width == 0 || map.height == 0) return {};
  const int stride = std::max(1, cfg.stride);

  auto value = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= map.width || y >= map.height) return kNaN;
    return map.at(x, y);
  };

  std::vector<std::pair<int, int>> peaks;
  for (int y = 0; y < map.height; y += stride) {
    for (int x = 0; x < map.width; x += stride) {
      const double v = map.at(x, y);
      if (!std::isfinite(v)) continue;
      bool is_max = true;
      for (int dy = -stride; dy <= stride && is_max; dy += stride) {
        for (int dx = -stride; dx <= stride; dx += stride) {
          if (dx == 0 && dy == 0) continue;
          const double n = value(x + dx, y + dy);
          if (std::isfinite(n) && n > v) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;

      // Stride-1 hill climb to the true peak.
      int cx = x, cy = y;
      for (;;) {
        int bx = cx, by = cy;
        double bv = map.at(cx, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const double n = value(cx + dx, cy + dy);
            if (std::isfinite(n) && n > bv) {
              bv = n;
              bx = cx + dx;
              by = cy + dy;
            }
          }
        }
        if (bx == cx && by == cy) break;
        cx = bx;
        cy = by;
      }
      if (map.at(cx, cy) >= q.threshold) peaks.emplace_back(cx, cy);
    }
  }
  std::sort(peaks.begin(), peaks.end());
  peaks.erase(std::unique(peaks.begin(), peaks.end()), peaks.end());

  std::vector<Candidate> cands;
  cands.reserve(peaks.size());
  for (const auto& [x, y] : peaks) {
    cands.push_back({page.id(), map.best_box(x, y), map.at(x, y), map.best_scale(x, y)});
  }
  cands = nms(std::move(cands), cfg.nms_iou);

  const long long cap = (static_cast<long long>(page.width()) * page.height()) /
                        std::max<long long>(1, static_cast<long long>(map.ref_w) * map.ref_h);
  if (static_cast<long long>(cands.size()) > cap) cands.resize(static_cast<std::size_t>(cap));
  return cands;
}

}  // namespace text
