#include "wxaug/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "wxaug/errors.hpp"
#include "wxaug/loss.hpp"

namespace wxaug {

namespace {

bool grads_finite(const UNetWeights& g) {
  for (const auto& l : g.layers) {
    for (float v : l.weight) {
      if (!std::isfinite(v)) return false;
    }
    for (float v : l.bias) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void shuffle(std::vector<std::size_t>& v, RngStream& rs) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rs.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

// Builds a (n, size, size, 3) input tensor plus flat labels for the given
// sample indices, augmenting each image with its own stream when requested.
struct Batch {
  Tensor<float> images;
  std::vector<std::uint8_t> labels;
};

Batch make_batch(std::span<const Sample> samples, std::span<const std::size_t> indices, int size,
                 const AugmentConfig* augment, std::uint64_t seed, const char* label, int epoch) {
  Batch batch{Tensor<float>(static_cast<int>(indices.size()), size, size, 3), {}};
  batch.labels.reserve(indices.size() * static_cast<std::size_t>(size) * size);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const Sample& s = samples[indices[b]];
    if (s.rgb.width != size || s.rgb.height != size) {
      throw DataError("training sample has the wrong size");
    }
    RngStream stream = derive_stream(seed, {{label, static_cast<std::uint64_t>(epoch)},
                                            {"image", indices[b]}});
    const Sample pair = load_training_pair(s, augment, stream);
    write_normalized(pair.rgb, batch.images, static_cast<int>(b));
    batch.labels.insert(batch.labels.end(), pair.mask.data.begin(), pair.mask.data.end());
  }
  return batch;
}

BatchStats evaluate_batches(const UNetWeights& weights, std::span<const Sample> samples,
                            std::span<const std::size_t> indices, int batch_size,
                            const AugmentConfig* augment, std::uint64_t seed, int epoch,
                            int ignore_class) {
  BatchStats total;
  const int size = weights.config.input_size;
  for (std::size_t start = 0; start < indices.size(); start += static_cast<std::size_t>(batch_size)) {
    const auto chunk = indices.subspan(start, std::min<std::size_t>(batch_size, indices.size() - start));
    const Batch batch = make_batch(samples, chunk, size, augment, seed, "val_augment", epoch);
    const Tensor<float> logits = forward(weights, batch.images);
    const BatchStats s = sparse_ce_stats<float>(logits, batch.labels, ignore_class, nullptr, 0.0);
    total.loss_sum += s.loss_sum;
    total.pixels += s.pixels;
    total.correct += s.correct;
  }
  return total;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train config: learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("train config: Adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("train config: epsilon must be > 0");
}

AdamOptimizer::AdamOptimizer(const UNetConfig& config, const TrainConfig& train)
    : cfg_(train), m_(UNetWeights::zeros(config)), v_(UNetWeights::zeros(config)) {}

void AdamOptimizer::step(UNetWeights& weights, const UNetWeights& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const auto b1 = static_cast<float>(cfg_.beta1);
  const auto b2 = static_cast<float>(cfg_.beta2);
  const auto lr = static_cast<float>(cfg_.learning_rate);
  const auto eps = static_cast<float>(cfg_.epsilon);
  const auto inv_c1 = static_cast<float>(1.0 / c1);
  const auto inv_c2 = static_cast<float>(1.0 / c2);
  auto update = [&](std::vector<float>& p, const std::vector<float>& g, std::vector<float>& m,
                    std::vector<float>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0f - b1) * g[i];
      v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
      p[i] -= lr * (m[i] * inv_c1) / (std::sqrt(v[i] * inv_c2) + eps);
    }
  };
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    update(weights.layers[l].weight, grads.layers[l].weight, m_.layers[l].weight, v_.layers[l].weight);
    update(weights.layers[l].bias, grads.layers[l].bias, m_.layers[l].bias, v_.layers[l].bias);
  }
}

Sample load_training_pair(const Sample& sample, const AugmentConfig* augment, RngStream& stream) {
  Sample out{augment ? augment_image(sample.rgb, stream, *augment) : sample.rgb, sample.mask};
  if (out.mask != sample.mask || out.rgb.width != out.mask.width || out.rgb.height != out.mask.height) {
    throw DataError("training loader: augmentation broke image/mask alignment");
  }
  return out;
}

TrainValSplit select_train_val(std::size_t n, std::size_t train_count, std::size_t val_count,
                               std::uint64_t seed) {
  if (train_count + val_count > n) {
    throw ConfigError("train/val split of " + std::to_string(train_count) + "+" +
                      std::to_string(val_count) + " exceeds " + std::to_string(n) + " samples");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rs = derive_stream(seed, {{"split", 0}});
  shuffle(order, rs);
  TrainValSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
  split.val.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count),
                   order.begin() + static_cast<std::ptrdiff_t>(train_count + val_count));
  return split;
}

BatchStats evaluate_samples(const UNetWeights& weights, std::span<const Sample> samples,
                            std::span<const std::size_t> indices, int ignore_class) {
  return evaluate_batches(weights, samples, indices, 8, nullptr, 0, 0, ignore_class);
}

TrainResult train(std::span<const Sample> samples, std::span<const std::size_t> train_indices,
                  std::span<const std::size_t> val_indices, const TrainConfig& train_cfg,
                  const UNetConfig& unet_cfg, const AugmentConfig* augment, std::uint64_t seed,
                  const EpochCallback& on_epoch) {
  train_cfg.validate();
  unet_cfg.validate();
  if (augment != nullptr) augment->validate();
  if (train_indices.empty()) throw ConfigError("train: empty training set");
  for (std::size_t i : train_indices) {
    if (i >= samples.size()) throw ConfigError("train: index out of range");
  }
  for (std::size_t i : val_indices) {
    if (i >= samples.size()) throw ConfigError("train: index out of range");
  }

  TrainResult result;
  RngStream init = derive_stream(seed, {{"init", 0}});
  result.weights = init_weights(unet_cfg, init);
  UNetWeights grads = UNetWeights::zeros(unet_cfg);
  AdamOptimizer adam(unet_cfg, train_cfg);

  std::vector<std::size_t> order(train_indices.begin(), train_indices.end());
  const auto batch = static_cast<std::size_t>(train_cfg.batch_size);
  for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
    RngStream rs = derive_stream(seed, {{"shuffle", static_cast<std::uint64_t>(epoch)}});
    order.assign(train_indices.begin(), train_indices.end());
    shuffle(order, rs);

    BatchStats epoch_stats;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::span<const std::size_t> chunk(order.data() + start, std::min(batch, order.size() - start));
      const Batch b = make_batch(samples, chunk, unet_cfg.input_size, augment, seed, "augment", epoch);
      const BatchStats s = loss_and_gradients(result.weights, b.images, b.labels, grads, train_cfg.ignore_class);
      const double loss = s.mean_loss();
      if (!std::isfinite(loss) || !grads_finite(grads)) {
        throw NumericalError("non-finite loss or gradient at epoch " + std::to_string(epoch) +
                             " step " + std::to_string(adam.steps()));
      }
      result.step_losses.push_back(loss);
      epoch_stats.loss_sum += s.loss_sum;
      epoch_stats.pixels += s.pixels;
      epoch_stats.correct += s.correct;
      adam.step(result.weights, grads);
    }

    HistoryRow row;
    row.epoch = epoch;
    row.train_loss = epoch_stats.mean_loss();
    row.train_acc = epoch_stats.accuracy();
    if (val_indices.empty()) {
      row.val_loss = std::numeric_limits<double>::quiet_NaN();
      row.val_acc = std::numeric_limits<double>::quiet_NaN();
    } else {
      const BatchStats v = evaluate_batches(result.weights, samples, val_indices, train_cfg.batch_size,
                                            augment, seed, epoch, train_cfg.ignore_class);
      row.val_loss = v.mean_loss();
      row.val_acc = v.accuracy();
      if (!std::isfinite(row.val_loss)) {
        throw NumericalError("non-finite validation loss at epoch " + std::to_string(epoch));
      }
    }
    result.history.push_back(row);
    if (on_epoch) on_epoch(row);
  }
  result.initial_loss = result.step_losses.front();
  return result;
}

void write_history_csv(const std::vector<HistoryRow>& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,train_loss,val_loss,train_acc,val_acc\n";
  auto num = [](double v) -> std::string {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
  };
  for (const auto& r : history) {
    out << r.epoch << ',' << num(r.train_loss) << ',' << num(r.val_loss) << ',' << num(r.train_acc)
        << ',' << num(r.val_acc) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace wxaug
