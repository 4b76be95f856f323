#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "wxaug/unet.hpp"

namespace wxaug {

/// 8x8 input, 2 levels, base 2 channels, 3 classes.
UNetConfig tiny_grad_check_config();

struct GradCheckResult {
  double max_rel_error = 0.0;  // max |ga - gn| / max(|ga|, |gn|, 1e-8)
  std::size_t checked = 0;
  std::string worst_parameter;  // "<layer>.<weight|bias>[index]"
};

/// Compares analytic gradients of the batch-mean cross-entropy with central
/// differences (64-bit) on randomly chosen parameters. Every layer's weight
/// and bias tensors are sampled, at least `min_samples` parameters overall.
/// All weights, the head included, are randomized so no gradient path is
/// trivially zero. Throws ConfigError for an invalid config.
GradCheckResult grad_check(const UNetConfig& config, std::uint64_t seed, std::size_t min_samples = 200,
                           double step = 1e-5, int batch = 2);

}  // namespace wxaug
