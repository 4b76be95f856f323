#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "wxaug/image.hpp"

namespace wxaug {

/// Dense NHWC tensor.
template <typename T>
struct Tensor {
  int n = 0;
  int h = 0;
  int w = 0;
  int c = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int n_, int h_, int w_, int c_, T fill = T(0))
      : n(n_), h(h_), w(w_), c(c_), data(static_cast<std::size_t>(n_) * h_ * w_ * c_, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t image_stride() const { return static_cast<std::size_t>(h) * w * c; }
  std::size_t index(int b, int y, int x, int ch) const {
    return ((static_cast<std::size_t>(b) * h + y) * w + x) * c + ch;
  }
  T& at(int b, int y, int x, int ch) { return data[index(b, y, x, ch)]; }
  const T& at(int b, int y, int x, int ch) const { return data[index(b, y, x, ch)]; }
  T* image(int b) { return data.data() + static_cast<std::size_t>(b) * image_stride(); }
  const T* image(int b) const { return data.data() + static_cast<std::size_t>(b) * image_stride(); }

  bool all_finite() const {
    for (const T& v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

/// Channel value / 255 into slot b of a (n, h, w, 3) tensor.
template <typename T>
void write_normalized(const ImageRGB& img, Tensor<T>& batch, int b) {
  T* dst = batch.image(b);
  for (std::size_t i = 0; i < img.data.size(); ++i) dst[i] = static_cast<T>(img.data[i]) / T(255);
}

}  // namespace wxaug
