#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace wxaug {

/// Round half up and clamp into 8-bit range. Every floating-point image
/// stage in the library funnels through this so results stay in 8-bit space.
inline std::uint8_t to_u8(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

/// Row-major interleaved 8-bit RGB.
struct ImageRGB {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  ImageRGB() = default;
  ImageRGB(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * 3;
  }
  std::uint8_t* at(int x, int y) { return data.data() + offset(x, y); }
  const std::uint8_t* at(int x, int y) const { return data.data() + offset(x, y); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool valid() const { return width > 0 && height > 0 && data.size() == pixel_count() * 3; }

  friend bool operator==(const ImageRGB&, const ImageRGB&) = default;
};

/// Row-major per-pixel class ids.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  MaskImage() = default;
  MaskImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool valid() const { return width > 0 && height > 0 && data.size() == pixel_count(); }

  friend bool operator==(const MaskImage&, const MaskImage&) = default;
};

/// Mean Rec.601 luma over all pixels.
double mean_luminance(const ImageRGB& img);

/// Throws DataError if any class id is >= num_classes.
void validate_mask(const MaskImage& mask, int num_classes);

}  // namespace wxaug
