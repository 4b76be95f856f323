#pragma once

#include <filesystem>

#include "wxaug/image.hpp"

namespace wxaug {

// 8-bit RGB PNG. Reading also accepts RGBA (alpha dropped); anything else is
// a DataError.
void write_rgb_png(const ImageRGB& img, const std::filesystem::path& path);
ImageRGB read_rgb_png(const std::filesystem::path& path);

// Masks are 8-bit single-channel grayscale PNGs whose pixel value is the
// class id. Reading any other layout is a DataError. When num_classes > 0 the
// values are validated against it.
void write_mask_png(const MaskImage& mask, const std::filesystem::path& path);
MaskImage read_mask_png(const std::filesystem::path& path, int num_classes = 0);

}  // namespace wxaug
