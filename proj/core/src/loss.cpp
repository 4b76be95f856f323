#include "wxaug/loss.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "wxaug/errors.hpp"

namespace wxaug {

template <typename T>
BatchStats sparse_ce_stats(const Tensor<T>& logits, std::span<const std::uint8_t> labels,
                           int ignore_class, Tensor<T>* grad, double scale) {
  const std::size_t pixels = static_cast<std::size_t>(logits.n) * logits.h * logits.w;
  if (labels.size() != pixels) throw DataError("sparse_ce: label count does not match logits");
  const int k = logits.c;
  if (grad != nullptr) *grad = Tensor<T>(logits.n, logits.h, logits.w, k);
  BatchStats stats;
  std::vector<double> p(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < pixels; ++i) {
    const int label = labels[i];
    if (label >= k) {
      throw DataError("sparse_ce: label " + std::to_string(label) + " out of range for " +
                      std::to_string(k) + " classes");
    }
    if (label == ignore_class) continue;
    const T* z = logits.data.data() + i * k;
    double zmax = z[0];
    for (int j = 1; j < k; ++j) zmax = std::max(zmax, static_cast<double>(z[j]));
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      p[static_cast<std::size_t>(j)] = std::exp(static_cast<double>(z[j]) - zmax);
      sum += p[static_cast<std::size_t>(j)];
    }
    stats.loss_sum += std::log(sum) - (static_cast<double>(z[label]) - zmax);
    stats.pixels += 1;
    if (argmax_class(z, k) == label) stats.correct += 1;
    if (grad != nullptr) {
      T* g = grad->data.data() + i * k;
      for (int j = 0; j < k; ++j) {
        const double prob = p[static_cast<std::size_t>(j)] / sum;
        g[j] = static_cast<T>(scale * (prob - (j == label ? 1.0 : 0.0)));
      }
    }
  }
  return stats;
}

template <typename T>
double sparse_ce_loss(const Tensor<T>& logits, std::span<const std::uint8_t> labels,
                      int ignore_class) {
  return sparse_ce_stats<T>(logits, labels, ignore_class, nullptr, 0.0).mean_loss();
}

template BatchStats sparse_ce_stats<float>(const Tensor<float>&, std::span<const std::uint8_t>,
                                           int, Tensor<float>*, double);
template BatchStats sparse_ce_stats<double>(const Tensor<double>&, std::span<const std::uint8_t>,
                                            int, Tensor<double>*, double);
template double sparse_ce_loss<float>(const Tensor<float>&, std::span<const std::uint8_t>, int);
template double sparse_ce_loss<double>(const Tensor<double>&, std::span<const std::uint8_t>, int);

}  // namespace wxaug
