// SPDX-License-Identifier: Apache-2.0
#include "cxrt/resample.hpp"

#include <algorithm>
#include <cmath>

#include "cxrt/error.hpp"

namespace cxrt {

double sample_bilinear(const Image& image, double y, double x) noexcept {
  const int rows = image.rows();
  const int cols = image.cols();
  y = std::clamp(y, 0.0, static_cast<double>(rows - 1));
  x = std::clamp(x, 0.0, static_cast<double>(cols - 1));
  const int y0 = static_cast<int>(std::floor(y));
  const int x0 = static_cast<int>(std::floor(x));
  const int y1 = std::min(y0 + 1, rows - 1);
  const int x1 = std::min(x0 + 1, cols - 1);
  const double fy = y - y0;
  const double fx = x - x0;
  const double top = image(y0, x0) + fx * (image(y0, x1) - image(y0, x0));
  const double bottom = image(y1, x0) + fx * (image(y1, x1) - image(y1, x0));
  return top + fy * (bottom - top);
}

namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> make_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(s));
    taps[static_cast<std::size_t>(i)] = {lo, std::min(lo + 1, src - 1), s - lo};
  }
  return taps;
}

}  // namespace

Image resize_bilinear(const Image& image, int rows, int cols) {
  if (image.empty()) throw DataError("cannot resize an empty image");
  if (rows <= 0 || cols <= 0) throw DataError("resize target must be positive");
  if (image.rows() == rows && image.cols() == cols) return image;

  const auto row_taps = make_taps(image.rows(), rows);
  const auto col_taps = make_taps(image.cols(), cols);

  // Horizontal pass per source row, then vertical blend.
  Image horizontal(image.rows(), cols);
  for (int r = 0; r < image.rows(); ++r) {
    for (int c = 0; c < cols; ++c) {
      const Tap& t = col_taps[static_cast<std::size_t>(c)];
      const double a = image(r, t.lo);
      horizontal(r, c) = a + t.frac * (image(r, t.hi) - a);
    }
  }
  Image out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Tap& t = row_taps[static_cast<std::size_t>(r)];
    for (int c = 0; c < cols; ++c) {
      const double a = horizontal(t.lo, c);
      out(r, c) = a + t.frac * (horizontal(t.hi, c) - a);
    }
  }
  return out;
}

}  // namespace cxrt
