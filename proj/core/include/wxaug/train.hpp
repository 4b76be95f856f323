#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wxaug/augment.hpp"
#include "wxaug/corpus.hpp"
#include "wxaug/unet.hpp"

namespace wxaug {

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 1e-3;
  int batch_size = 8;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int ignore_class = -1;  // < 0 disables

  void validate() const;
};

struct HistoryRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN when the validation set is empty
  double train_acc = 0.0;
  double val_acc = 0.0;
};

struct TrainResult {
  UNetWeights weights;
  std::vector<HistoryRow> history;
  std::vector<double> step_losses;  // batch loss before each update
  double initial_loss = 0.0;        // step_losses.front()
};

/// Adam with bias correction:
///   m = b1 m + (1 - b1) g;  v = b2 v + (1 - b2) g^2
///   p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
class AdamOptimizer {
 public:
  AdamOptimizer(const UNetConfig& config, const TrainConfig& train);
  void step(UNetWeights& weights, const UNetWeights& grads);
  long long steps() const { return t_; }

 private:
  TrainConfig cfg_;
  UNetWeights m_;
  UNetWeights v_;
  long long t_ = 0;
};

/// The training loader: augments the RGB frame and copies the mask
/// unchanged. With `augment` null the sample is copied as is.
Sample load_training_pair(const Sample& sample, const AugmentConfig* augment, RngStream& stream);

/// Disjoint seeded split of [0, n): a Fisher-Yates shuffle with
/// derive_stream(seed, [("split", 0)]), first train_count indices for
/// training and the next val_count for validation.
struct TrainValSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};
TrainValSplit select_train_val(std::size_t n, std::size_t train_count, std::size_t val_count,
                               std::uint64_t seed);

using EpochCallback = std::function<void(const HistoryRow&)>;

/// Trains a fresh network on samples[train_indices].
///
/// Streams, all derived from `seed`: ("init", 0) for weights, ("shuffle", e)
/// for the epoch order, ("augment", e)/("image", i) and ("val_augment", e)/
/// ("image", i) for per-image augmentation, re-drawn every epoch. Validation
/// applies the same augmentation policy as training. Throws NumericalError on
/// a non-finite loss or gradient.
TrainResult train(std::span<const Sample> samples, std::span<const std::size_t> train_indices,
                  std::span<const std::size_t> val_indices, const TrainConfig& train_cfg,
                  const UNetConfig& unet_cfg, const AugmentConfig* augment, std::uint64_t seed,
                  const EpochCallback& on_epoch = {});

/// Pixel-pooled loss/accuracy of a model over samples[indices], unaugmented.
BatchStats evaluate_samples(const UNetWeights& weights, std::span<const Sample> samples,
                            std::span<const std::size_t> indices, int ignore_class = -1);

/// CSV header `epoch,train_loss,val_loss,train_acc,val_acc`.
void write_history_csv(const std::vector<HistoryRow>& history, const std::filesystem::path& path);

}  // namespace wxaug
