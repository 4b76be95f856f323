#include "wxaug/evaluate.hpp"

#include <algorithm>
#include <vector>

#include "wxaug/errors.hpp"
#include "wxaug/loss.hpp"

namespace wxaug {

EvalResult evaluate(const UNetWeights& weights, const std::string& name,
                    std::span<const Sample> samples, int ignore_class) {
  if (samples.empty()) throw DataError("evaluate: dataset '" + name + "' is empty");
  const int size = weights.config.input_size;
  std::vector<double> losses;
  losses.reserve(samples.size());
  std::size_t pixels = 0;
  std::size_t correct = 0;
  Tensor<float> input(1, size, size, 3);
  for (const Sample& s : samples) {
    if (s.rgb.width != size || s.rgb.height != size) {
      throw DataError("evaluate: sample is not " + std::to_string(size) + "x" + std::to_string(size));
    }
    validate_mask(s.mask, weights.config.num_classes);
    write_normalized(s.rgb, input, 0);
    const Tensor<float> logits = forward(weights, input);
    const BatchStats st = sparse_ce_stats<float>(logits, s.mask.data, ignore_class, nullptr, 0.0);
    losses.push_back(st.mean_loss());
    pixels += st.pixels;
    correct += st.correct;
  }
  std::sort(losses.begin(), losses.end());
  double sum = 0.0;
  for (double l : losses) sum += l;
  EvalResult r;
  r.dataset_name = name;
  r.mean_loss = sum / static_cast<double>(losses.size());
  r.pixel_accuracy = pixels ? static_cast<double>(correct) / static_cast<double>(pixels) : 0.0;
  r.n_images = samples.size();
  return r;
}

EvalResult evaluate(const UNetWeights& weights, const Manifest& manifest, int ignore_class) {
  if (manifest.records.empty()) throw DataError("evaluate: manifest '" + manifest.name + "' is empty");
  if (manifest.num_classes > weights.config.num_classes) {
    throw DataError("evaluate: manifest has more classes than the model");
  }
  const std::vector<Sample> samples = load_samples(manifest, weights.config.input_size);
  return evaluate(weights, manifest.name, samples, ignore_class);
}

}  // namespace wxaug
