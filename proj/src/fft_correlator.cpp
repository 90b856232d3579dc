#include "fft_correlator.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include <fftw3.h>

namespace text::detail {

namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// The FFTW planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per transform size and kept for the
// life of the process.
Plans plans_for(int rows, int cols) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, Plans> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({rows, cols});
  if (it != cache.end()) return it->second;

  const std::size_t nreal = static_cast<std::size_t>(rows) * cols;
  const std::size_t ncplx = static_cast<std::size_t>(rows) * (cols / 2 + 1);
  auto real = fftw_buffer<double>(nreal);
  auto cplx = fftw_buffer<fftw_complex>(ncplx);
  Plans p;
  p.forward = fftw_plan_dft_r2c_2d(rows, cols, real.get(), cplx.get(), FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_2d(rows, cols, cplx.get(), real.get(), FFTW_ESTIMATE);
  cache.emplace(std::make_pair(rows, cols), p);
  return p;
}

}  // namespace

int fft_friendly_size(int n) {
  n = std::max(n, 1);
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

Spectrum::Spectrum(const double* data, int w, int h, int rows, int cols)
    : rows_(rows), cols_(cols) {
  const Plans plans = plans_for(rows, cols);
  const std::size_t nreal = static_cast<std::size_t>(rows) * cols;
  const std::size_t ncplx = static_cast<std::size_t>(rows) * (cols / 2 + 1);
  auto real = fftw_buffer<double>(nreal);
  std::fill(real.get(), real.get() + nreal, 0.0);
  for (int y = 0; y < h; ++y) {
    std::memcpy(real.get() + static_cast<std::size_t>(y) * cols,
                data + static_cast<std::size_t>(y) * w, sizeof(double) * w);
  }
  auto cplx = fftw_buffer<fftw_complex>(ncplx);
  fftw_execute_dft_r2c(plans.forward, real.get(), cplx.get());
  const auto* first = reinterpret_cast<const std::complex<double>*>(cplx.get());
  bins_.assign(first, first + ncplx);
}

std::vector<double> correlate_valid(const Spectrum& signal, int sw, int sh,
                                    const Spectrum& kernel, int kw, int kh) {
  const int rows = signal.rows();
  const int cols = signal.cols();
  const Plans plans = plans_for(rows, cols);
  const std::size_t ncplx = signal.bins().size();
  auto cplx = fftw_buffer<fftw_complex>(ncplx);
  auto* prod = reinterpret_cast<std::complex<double>*>(cplx.get());
  const auto& a = signal.bins();
  const auto& b = kernel.bins();
  for (std::size_t i = 0; i < ncplx; ++i) prod[i] = a[i] * std::conj(b[i]);

  auto real = fftw_buffer<double>(static_cast<std::size_t>(rows) * cols);
  fftw_execute_dft_c2r(plans.inverse, cplx.get(), real.get());

  const int ow = sw - kw + 1;
  const int oh = sh - kh + 1;
  std::vector<double> out(static_cast<std::size_t>(std::max(ow, 0)) * std::max(oh, 0));
  const double scale = 1.0 / (static_cast<double>(rows) * cols);
  for (int v = 0; v < oh; ++v) {
    const double* src = real.get() + static_cast<std::size_t>(v) * cols;
    double* dst = out.data() + static_cast<std::size_t>(v) * ow;
    for (int u = 0; u < ow; ++u) dst[u] = src[u] * scale;
  }
  return out;
}

}  // namespace text::detail
