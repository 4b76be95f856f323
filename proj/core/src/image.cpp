#include "wxaug/image.hpp"

#include <string>

#include "wxaug/errors.hpp"

namespace wxaug {

double mean_luminance(const ImageRGB& img) {
  if (img.pixel_count() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < img.data.size(); i += 3) {
    sum += 0.299 * img.data[i] + 0.587 * img.data[i + 1] + 0.114 * img.data[i + 2];
  }
  return sum / static_cast<double>(img.pixel_count());
}

void validate_mask(const MaskImage& mask, int num_classes) {
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    if (mask.data[i] >= num_classes) {
      throw DataError("mask value " + std::to_string(mask.data[i]) + " at pixel " +
                      std::to_string(i) + " is outside [0, " +
                      std::to_string(num_classes) + ")");
    }
  }
}

}  // namespace wxaug
