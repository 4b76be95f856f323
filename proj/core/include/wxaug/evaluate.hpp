#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "wxaug/corpus.hpp"
#include "wxaug/unet.hpp"

namespace wxaug {

struct EvalResult {
  std::string dataset_name;
  double mean_loss = 0.0;       // mean of per-image mean cross-entropy
  double pixel_accuracy = 0.0;  // pooled over every pixel of every image
  std::size_t n_images = 0;
};

/// Per-image losses are summed in sorted order, so the result does not
/// depend on record order. Throws DataError for an empty sample set.
EvalResult evaluate(const UNetWeights& weights, const std::string& name,
                    std::span<const Sample> samples, int ignore_class = -1);

/// Loads the manifest's images resized to the model's input size, then
/// evaluates. Throws DataError for an empty manifest or class-range
/// violations and IoError for missing files.
EvalResult evaluate(const UNetWeights& weights, const Manifest& manifest, int ignore_class = -1);

}  // namespace wxaug
