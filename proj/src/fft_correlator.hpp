#pragma once

#include <complex>
#include <vector>

#include "text/image.hpp"

namespace text::detail {

/// Smallest integer >= n whose only prime factors are 2, 3, 5, 7.
int fft_friendly_size(int n);

/// Real 2-D spectrum at a fixed transform size (rows x cols, r2c layout).
class Spectrum {
 public:
  Spectrum() = default;
  /// Zero-pads `data` (h x w, row-major) into rows x cols and transforms it.
  Spectrum(const double* data, int w, int h, int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<std::complex<double>>& bins() const { return bins_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::complex<double>> bins_;
};

/// Valid-region cross-correlation out[v][u] = sum_{k,l} signal[v+k][u+l] * kernel[k][l]
/// for all placements of a kw x kh kernel inside a sw x sh signal.
/// `signal` and `kernel` must share the transform size; the size must be at
/// least sw x sh so valid placements do not wrap.
std::vector<double> correlate_valid(const Spectrum& signal, int sw, int sh,
                                    const Spectrum& kernel, int kw, int kh);

}  // namespace text::detail
