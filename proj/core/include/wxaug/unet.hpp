#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wxaug/image.hpp"
#include "wxaug/rng.hpp"
#include "wxaug/tensor.hpp"

namespace wxaug {

struct UNetConfig {
  int levels = 3;
  int base_channels = 8;
  int num_classes = 8;
  int input_size = 64;

  /// Throws ConfigError unless all counts are >= 1 and input_size is
  /// divisible by 2^levels.
  void validate() const;
  /// Channel count of encoder level l (doubles per level); level `levels`
  /// is the bottleneck.
  int channels_at(int level) const { return base_channels << level; }

  friend bool operator==(const UNetConfig&, const UNetConfig&) = default;
};

/// One convolution: weights laid out [ky][kx][in][out], bias [out].
template <typename T>
struct ConvLayer {
  std::string name;
  int kernel = 3;
  int in_ch = 0;
  int out_ch = 0;
  std::vector<T> weight;
  std::vector<T> bias;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(kernel) * kernel * in_ch * out_ch;
  }
};

/// All learnable tensors in declaration order:
///   enc{l}_a, enc{l}_b               for l = 0 .. levels-1
///   mid_a, mid_b                     bottleneck at channels_at(levels)
///   dec{l}_up, dec{l}_a, dec{l}_b    for l = levels-1 .. 0
///   head                             1x1 to num_classes logits
/// dec{l}_a consumes the concatenation [dec{l}_up output, enc{l}_b output].
template <typename T>
struct BasicUNetWeights {
  UNetConfig config;
  std::vector<ConvLayer<T>> layers;

  /// Correctly shaped, all-zero tensors.
  static BasicUNetWeights zeros(const UNetConfig& config);

  std::size_t parameter_count() const;
  void set_zero();
  const ConvLayer<T>& head() const { return layers.back(); }
  ConvLayer<T>& head() { return layers.back(); }

  template <typename U>
  BasicUNetWeights<U> cast() const {
    BasicUNetWeights<U> out;
    out.config = config;
    for (const auto& l : layers) {
      ConvLayer<U> c{l.name, l.kernel, l.in_ch, l.out_ch, {}, {}};
      c.weight.assign(l.weight.begin(), l.weight.end());
      c.bias.assign(l.bias.begin(), l.bias.end());
      out.layers.push_back(std::move(c));
    }
    return out;
  }

  bool operator==(const BasicUNetWeights& o) const {
    if (!(config == o.config) || layers.size() != o.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (layers[i].weight != o.layers[i].weight || layers[i].bias != o.layers[i].bias) return false;
    }
    return true;
  }
};

using UNetWeights = BasicUNetWeights<float>;

/// He-uniform convolution kernels (bound sqrt(6 / fan_in), i.e. standard
/// deviation sqrt(2 / fan_in)), drawn in declaration order; zero biases; the
/// 1x1 head (weights and bias) is exactly zero so the initial softmax is
/// uniform.
UNetWeights init_weights(const UNetConfig& config, RngStream& stream);

/// Logits (n, size, size, num_classes) for a batch of normalized RGB inputs.
/// Throws DataError on a shape mismatch.
template <typename T>
Tensor<T> forward(const BasicUNetWeights<T>& weights, const Tensor<T>& batch);

/// Mean sparse cross-entropy statistics of one batch.
struct BatchStats {
  double loss_sum = 0.0;      // sum of per-pixel losses over counted pixels
  std::size_t pixels = 0;     // counted pixels
  std::size_t correct = 0;    // counted pixels whose argmax equals the label
  double mean_loss() const { return pixels ? loss_sum / static_cast<double>(pixels) : 0.0; }
  double accuracy() const { return pixels ? static_cast<double>(correct) / static_cast<double>(pixels) : 0.0; }
};

/// Forward + analytic backward of the batch-mean sparse cross-entropy.
/// Gradients are written (not accumulated) into `grads`, which must have the
/// shapes of `weights`. `labels` holds n*h*w class ids. Pixels whose label
/// equals `ignore_class` (when >= 0) are excluded from loss and gradient.
template <typename T>
BatchStats loss_and_gradients(const BasicUNetWeights<T>& weights, const Tensor<T>& batch,
                              std::span<const std::uint8_t> labels, BasicUNetWeights<T>& grads,
                              int ignore_class = -1);

/// Per-pixel argmax over logits, ties toward the lowest class id.
MaskImage predict_mask(const UNetWeights& weights, const ImageRGB& img);

/// Argmax with lowest-index tie breaking.
template <typename T>
int argmax_class(const T* logits, int num_classes) {
  int best = 0;
  for (int k = 1; k < num_classes; ++k) {
    if (logits[k] > logits[best]) best = k;
  }
  return best;
}

}  // namespace wxaug
