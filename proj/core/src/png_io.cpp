#include "wxaug/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <string>
#include <utility>

#include "wxaug/errors.hpp"

namespace wxaug {

namespace {

// RAII wrapper over libpng's simplified API control block.
class PngImage {
 public:
  PngImage() {
    std::memset(&image_, 0, sizeof(image_));
    image_.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image_); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  png_image* get() { return &image_; }
  png_image* operator->() { return &image_; }

 private:
  png_image image_;
};

void write_png(const std::filesystem::path& path, int width, int height,
               png_uint_32 format, const std::uint8_t* pixels) {
  PngImage png;
  png->width = static_cast<png_uint_32>(width);
  png->height = static_cast<png_uint_32>(height);
  png->format = format;
  if (!png_image_write_to_file(png.get(), path.c_str(), 0, pixels, 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + png->message);
  }
}

void begin_read(PngImage& png, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("missing file " + path.string());
  }
  if (!png_image_begin_read_from_file(png.get(), path.c_str())) {
    throw DataError("cannot decode PNG " + path.string() + ": " + png->message);
  }
}

// Bit depth and color type straight from IHDR; the simplified API expands
// low bit depths silently.
std::pair<int, int> ihdr_depth_and_type(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) throw IoError("cannot open " + path.string());
  unsigned char head[26] = {};
  const std::size_t n = std::fread(head, 1, sizeof(head), f);
  std::fclose(f);
  if (n < sizeof(head) || png_sig_cmp(head, 0, 8) != 0 ||
      std::memcmp(head + 12, "IHDR", 4) != 0) {
    throw DataError("not a PNG file: " + path.string());
  }
  return {head[24], head[25]};
}

}  // namespace

void write_rgb_png(const ImageRGB& img, const std::filesystem::path& path) {
  if (!img.valid()) throw DataError("write_rgb_png: invalid image");
  write_png(path, img.width, img.height, PNG_FORMAT_RGB, img.data.data());
}

ImageRGB read_rgb_png(const std::filesystem::path& path) {
  PngImage png;
  begin_read(png, path);
  const png_uint_32 fmt = png->format;
  if ((fmt & PNG_FORMAT_FLAG_COLOR) == 0 || (fmt & PNG_FORMAT_FLAG_LINEAR) != 0) {
    throw DataError("expected 8-bit RGB PNG: " + path.string());
  }
  png->format = PNG_FORMAT_RGB;
  ImageRGB img(static_cast<int>(png->width), static_cast<int>(png->height));
  if (!png_image_finish_read(png.get(), nullptr, img.data.data(), 0, nullptr)) {
    throw DataError("cannot decode PNG " + path.string() + ": " + png->message);
  }
  return img;
}

void write_mask_png(const MaskImage& mask, const std::filesystem::path& path) {
  if (!mask.valid()) throw DataError("write_mask_png: invalid mask");
  write_png(path, mask.width, mask.height, PNG_FORMAT_GRAY, mask.data.data());
}

MaskImage read_mask_png(const std::filesystem::path& path, int num_classes) {
  PngImage png;
  begin_read(png, path);
  const auto [depth, color_type] = ihdr_depth_and_type(path);
  if (png->format != PNG_FORMAT_GRAY || depth != 8 || color_type != PNG_COLOR_TYPE_GRAY) {
    throw DataError("mask must be an 8-bit single-channel PNG: " + path.string());
  }
  MaskImage mask(static_cast<int>(png->width), static_cast<int>(png->height));
  if (!png_image_finish_read(png.get(), nullptr, mask.data.data(), 0, nullptr)) {
    throw DataError("cannot decode PNG " + path.string() + ": " + png->message);
  }
  if (num_classes > 0) {
    try {
      validate_mask(mask, num_classes);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return mask;
}

}  // namespace wxaug
