#pragma once

#include <filesystem>

#include "wxaug/unet.hpp"

namespace wxaug {

// Little-endian weights checkpoint:
//
//   "WLAB1"                          5-byte magic
//   u32 levels, base_channels, num_classes, input_size
//   u32 layer count
//   per layer, in declaration order:
//     u32 kernel, in_ch, out_ch
//     f32[kernel*kernel*in_ch*out_ch] weights   ([ky][kx][in][out])
//     f32[out_ch] bias
void save_checkpoint(const UNetWeights& weights, const std::filesystem::path& path);

/// Throws DataError on a bad magic, truncated file, or a layer table that
/// disagrees with the header's UNetConfig.
UNetWeights load_checkpoint(const std::filesystem::path& path);

}  // namespace wxaug
