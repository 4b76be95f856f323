#pragma once

#include <cstdint>
#include <span>

#include "wxaug/tensor.hpp"
#include "wxaug/unet.hpp"

namespace wxaug {

/// Mean over all counted pixels of -ln softmax(logits)[label], evaluated in
/// double with max-subtraction. Throws DataError on shape mismatch or a label
/// >= the logit channel count.
template <typename T>
double sparse_ce_loss(const Tensor<T>& logits, std::span<const std::uint8_t> labels,
                      int ignore_class = -1);

/// Same statistics as sparse_ce_loss plus the argmax hit count. When `grad`
/// is non-null it receives scale * (softmax - onehot) per counted pixel and
/// zero elsewhere.
template <typename T>
BatchStats sparse_ce_stats(const Tensor<T>& logits, std::span<const std::uint8_t> labels,
                           int ignore_class, Tensor<T>* grad, double scale);

}  // namespace wxaug
