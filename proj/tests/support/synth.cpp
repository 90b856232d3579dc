#include "synth.hpp"

#include <algorithm>
#include <cmath>

namespace synth {

namespace {

struct Pt {
  double x, y;
};

Pt bezier(const Pt& a, const Pt& b, const Pt& c, const Pt& d, double t) {
  const double u = 1.0 - t;
  return {u * u * u * a.x + 3 * u * u * t * b.x + 3 * u * t * t * c.x + t * t * t * d.x,
          u * u * u * a.y + 3 * u * u * t * b.y + 3 * u * t * t * c.y + t * t * t * d.y};
}

double segment_distance(const Segment& s, double px, double py) {
  const double vx = s.x1 - s.x0, vy = s.y1 - s.y0;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((px - s.x0) * vx + (py - s.y0) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = s.x0 + t * vx - px, dy = s.y0 + t * vy - py;
  return std::sqrt(dx * dx + dy * dy);
}

void add_curve(std::vector<Segment>& out, const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
  constexpr int kSteps = 14;
  Pt prev = a;
  for (int i = 1; i <= kSteps; ++i) {
    const Pt p = bezier(a, b, c, d, static_cast<double>(i) / kSteps);
    out.push_back({prev.x, prev.y, p.x, p.y});
    prev = p;
  }
}

}  // namespace

WordShape random_word(Rng& rng, int letters) {
  WordShape w;
  w.pen_radius = rng.uniform(1.2, 1.8);
  const double xh = rng.uniform(12.0, 16.0);
  const double ascender = xh * 0.9;
  const double top = ascender + 2.0;
  const double baseline = top + xh;
  double x = 2.0 + w.pen_radius;
  Pt pen{x, baseline};
  double min_y = baseline, max_y = baseline;

  for (int l = 0; l < letters; ++l) {
    const double cw = rng.uniform(9.0, 15.0);
    const int kind = rng.integer(0, 5);
    double y_hi = baseline - xh;
    double y_lo = baseline;
    if (kind == 4) y_hi -= ascender;
    if (kind == 5) y_lo += ascender * 0.8;
    const Pt a = pen;
    const Pt b{x + rng.uniform(0.0, cw * 0.5), rng.uniform(y_hi, y_lo)};
    const Pt c{x + rng.uniform(cw * 0.3, cw), rng.uniform(y_hi, y_lo)};
    const Pt d{x + cw, baseline - rng.uniform(0.0, xh * 0.5)};
    add_curve(w.segments, a, {b.x, y_hi}, {c.x, y_lo}, b);
    add_curve(w.segments, b, c, {d.x, y_hi}, d);
    if (rng.chance(0.3)) {
      const Pt e{x + rng.uniform(0.2, 0.8) * cw, y_hi};
      add_curve(w.segments, e, {e.x + 2, y_hi + xh * 0.3}, {e.x - 2, y_hi + xh * 0.6}, {e.x + 1, baseline});
    }
    min_y = std::min(min_y, y_hi);
    max_y = std::max(max_y, y_lo);
    pen = d;
    x += cw;
  }
  for (const Segment& s : w.segments) {
    min_y = std::min({min_y, s.y0, s.y1});
    max_y = std::max({max_y, s.y0, s.y1});
  }
  const double shift = 2.0 + w.pen_radius - min_y;
  for (Segment& s : w.segments) {
    s.y0 += shift;
    s.y1 += shift;
  }
  w.width = x + 2.0 + 2 * w.pen_radius;
  w.height = max_y - min_y + 4.0 + 2 * w.pen_radius;
  return w;
}

text::GrayImage rasterize(const WordShape& shape, double scale) {
  const int W = static_cast<int>(std::ceil(shape.width * scale));
  const int H = static_cast<int>(std::ceil(shape.height * scale));
  text::GrayImage img(W, H, 0.0f);
  const double r = shape.pen_radius * scale;
  for (const Segment& raw : shape.segments) {
    const Segment s{raw.x0 * scale, raw.y0 * scale, raw.x1 * scale, raw.y1 * scale};
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(s.x0, s.x1) - r - 1)));
    const int x1 = std::min(W - 1, static_cast<int>(std::ceil(std::max(s.x0, s.x1) + r + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(s.y0, s.y1) - r - 1)));
    const int y1 = std::min(H - 1, static_cast<int>(std::ceil(std::max(s.y0, s.y1) + r + 1)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d = segment_distance(s, x + 0.5, y + 0.5);
        const double cov = std::clamp(r + 0.5 - d, 0.0, 1.0);
        float& px = img.at(x, y);
        px = std::max(px, static_cast<float>(cov));
      }
    }
  }
  return img;
}

text::BoundingBox ink_box(const text::GrayImage& coverage, double level) {
  int x0 = coverage.width(), y0 = coverage.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < coverage.height(); ++y) {
    for (int x = 0; x < coverage.width(); ++x) {
      if (coverage.at(x, y) < level) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return {0, 0, 0, 0};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

void stamp(text::GrayImage& dst, const text::GrayImage& src, int x, int y) {
  for (int sy = 0; sy < src.height(); ++sy) {
    const int dy = y + sy;
    if (dy < 0 || dy >= dst.height()) continue;
    for (int sx = 0; sx < src.width(); ++sx) {
      const int dx = x + sx;
      if (dx < 0 || dx >= dst.width()) continue;
      dst.at(dx, dy) = std::max(dst.at(dx, dy), src.at(sx, sy));
    }
  }
}

text::GrayImage paper(int width, int height, const PaperStyle& st) {
  text::GrayImage img(width, height, 0.0f);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) / width, v = static_cast<double>(y) / height;
      const double bg = st.base - st.ramp_x * u - st.ramp_y * v +
                        st.wave * std::sin(2 * M_PI * (0.7 * u + 0.4 * v));
      img.at(x, y) = static_cast<float>(std::clamp(bg, 0.0, 1.0));
    }
  }
  return img;
}

text::GrayImage compose(const text::GrayImage& coverage, const PaperStyle& st, Rng& rng) {
  text::GrayImage img = paper(coverage.width(), coverage.height(), st);
  auto& px = img.pixels();
  const auto& cov = coverage.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = px[i] * (1.0 - st.ink * cov[i]) + (st.noise > 0 ? rng.normal(st.noise) : 0.0);
    px[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return img;
}

text::Gray8Image quantize(const text::GrayImage& lum) {
  text::Gray8Image out(lum.width(), lum.height(), 0);
  for (std::size_t i = 0; i < lum.size(); ++i) {
    out.pixels()[i] = static_cast<std::uint8_t>(std::lround(std::clamp(lum.pixels()[i], 0.0f, 1.0f) * 255.0));
  }
  return out;
}

void add_speckles(text::GrayImage& coverage, Rng& rng, int count, int max_area, const text::BoundingBox& avoid,
                  int clearance) {
  std::vector<text::BoundingBox> keep_out{text::expand(avoid, clearance)};
  int placed = 0;
  for (int attempt = 0; placed < count && attempt < count * 50; ++attempt) {
    const int area = rng.integer(1, max_area);
    const int bw = area >= 2 ? rng.integer(1, 2) : 1;
    const int bh = (area + bw - 1) / bw;
    const int x = rng.integer(0, coverage.width() - bw);
    const int y = rng.integer(0, coverage.height() - bh);
    const text::BoundingBox b{x - 2, y - 2, bw + 4, bh + 4};
    if (std::any_of(keep_out.begin(), keep_out.end(), [&](const auto& k) { return text::intersect(b, k); })) continue;
    // Separate dots, so two of them never merge into one larger blot.
    keep_out.push_back(text::expand(b, 1));
    int n = 0;
    for (int yy = 0; yy < bh; ++yy) {
      for (int xx = 0; xx < bw && n < area; ++xx, ++n) coverage.at(x + xx, y + yy) = 1.0f;
    }
    ++placed;
  }
}

PlantedPage planted_page(Rng& rng, int width, int height, const WordShape& target, int n_targets,
                         const PaperStyle& style, int line_pitch, int margin) {
  PlantedPage out;
  out.coverage = text::GrayImage(width, height, 0.0f);
  const text::GrayImage target_raster = rasterize(target);
  const text::BoundingBox target_ink = ink_box(target_raster);

  const int lines = std::max(1, (height - 2 * margin) / line_pitch);
  const int per_line = std::max(1, (width - 2 * margin) / 160);
  std::vector<std::pair<int, int>> slots;
  for (int l = 0; l < lines; ++l) {
    for (int k = 0; k < per_line; ++k) slots.emplace_back(l, k);
  }
  std::shuffle(slots.begin(), slots.end(), rng.engine());
  if (n_targets > static_cast<int>(slots.size())) n_targets = static_cast<int>(slots.size());
  slots.resize(static_cast<std::size_t>(n_targets));

  for (int l = 0; l < lines; ++l) {
    int x = margin + rng.integer(0, 20);
    const int y_base = margin + l * line_pitch;
    for (int k = 0;; ++k) {
      const bool is_target = std::find(slots.begin(), slots.end(), std::make_pair(l, k)) != slots.end();
      const text::GrayImage raster = is_target ? target_raster : rasterize(random_word(rng, rng.integer(3, 7)));
      if (x + raster.width() > width - margin) break;
      const int y = y_base + rng.integer(-3, 3);
      stamp(out.coverage, raster, x, y);
      const text::BoundingBox ink = is_target ? target_ink : ink_box(raster);
      const text::BoundingBox placed{x + ink.x, y + ink.y, ink.w, ink.h};
      out.words.push_back(placed);
      if (is_target) out.targets.push_back(placed);
      x += raster.width() + rng.integer(18, 40);
    }
  }
  out.gray = quantize(compose(out.coverage, style, rng));
  return out;
}

text::GrayImage random_image(Rng& rng, int width, int height) {
  text::GrayImage img(width, height, 0.0f);
  // Sum of a few smooth blobs plus fine noise, so NCC sees real structure.
  const int blobs = rng.integer(4, 10);
  std::vector<double> bx(blobs), by(blobs), bs(blobs), ba(blobs);
  for (int k = 0; k < blobs; ++k) {
    bx[k] = rng.uniform(0, width);
    by[k] = rng.uniform(0, height);
    bs[k] = rng.uniform(3, 20);
    ba[k] = rng.uniform(-0.5, 0.5);
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.5 + rng.uniform(-0.15, 0.15);
      for (int k = 0; k < blobs; ++k) {
        const double dx = x - bx[k], dy = y - by[k];
        v += ba[k] * std::exp(-(dx * dx + dy * dy) / (2 * bs[k] * bs[k]));
      }
      img.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return img;
}

}  // namespace synth
