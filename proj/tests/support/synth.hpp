#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "text/geometry.hpp"
#include "text/image.hpp"

namespace synth {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(gen_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

struct Segment {
  double x0, y0, x1, y1;
};

/// A pen trajectory; coordinates are relative to the shape's top-left.
struct WordShape {
  std::vector<Segment> segments;
  double pen_radius = 1.5;
  double width = 0.0;
  double height = 0.0;
};

/// Cursive-looking word of `letters` random Bezier glyphs on a common baseline.
WordShape random_word(Rng& rng, int letters);

/// Anti-aliased ink coverage in [0, 1], sized to the shape.
text::GrayImage rasterize(const WordShape& shape, double scale = 1.0);

/// Tight box of pixels with coverage >= level; w = h = 0 when none.
text::BoundingBox ink_box(const text::GrayImage& coverage, double level = 0.5);

/// Max-composite `src` into `dst` with its top-left at (x, y).
void stamp(text::GrayImage& dst, const text::GrayImage& src, int x, int y);

struct PaperStyle {
  double base = 0.9;
  /// Brightness drop across the page, horizontally and vertically.
  double ramp_x = 0.25;
  double ramp_y = 0.1;
  double wave = 0.03;
  /// Fraction of paper brightness removed by full ink coverage.
  double ink = 0.7;
  double noise = 0.04;
};

/// Paper luminance with no ink, in [0, 1].
text::GrayImage paper(int width, int height, const PaperStyle& style);

/// Ink laid on paper plus Gaussian noise, as [0, 1] luminance.
text::GrayImage compose(const text::GrayImage& coverage, const PaperStyle& style, Rng& rng);
text::Gray8Image quantize(const text::GrayImage& luminance);

/// Separate small blobs of full coverage with area in [1, max_area], away
/// from `avoid`.
void add_speckles(text::GrayImage& coverage, Rng& rng, int count, int max_area,
                  const text::BoundingBox& avoid, int clearance);

/// A page of text lines: random distractor words plus `n_targets` copies of
/// one target word. Boxes are ink boxes (coverage >= 0.5) in page pixels.
struct PlantedPage {
  text::Gray8Image gray;
  text::GrayImage coverage;
  std::vector<text::BoundingBox> targets;
  std::vector<text::BoundingBox> words;
};

PlantedPage planted_page(Rng& rng, int width, int height, const WordShape& target, int n_targets,
                         const PaperStyle& style, int line_pitch = 75, int margin = 30);

/// Random non-constant image in [0, 1].
text::GrayImage random_image(Rng& rng, int width, int height);

}  // namespace synth
