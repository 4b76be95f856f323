#include "wxaug/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wxaug/loss.hpp"
#include "wxaug/rng.hpp"

namespace wxaug {

UNetConfig tiny_grad_check_config() { return UNetConfig{2, 2, 3, 8}; }

GradCheckResult grad_check(const UNetConfig& config, std::uint64_t seed, std::size_t min_samples,
                           double step, int batch) {
  config.validate();
  RngStream rs = derive_stream(seed, {{"gradcheck", 0}});

  auto weights = BasicUNetWeights<double>::zeros(config);
  for (auto& layer : weights.layers) {
    const double bound = std::sqrt(6.0 / (layer.kernel * layer.kernel * layer.in_ch));
    for (auto& v : layer.weight) v = rs.uniform(-bound, bound);
    for (auto& v : layer.bias) v = rs.uniform(-0.1, 0.1);
  }
  Tensor<double> input(batch, config.input_size, config.input_size, 3);
  for (auto& v : input.data) v = rs.uniform(0.0, 1.0);
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(batch) * config.input_size * config.input_size);
  for (auto& l : labels) l = static_cast<std::uint8_t>(rs.uniform_int(0, config.num_classes - 1));

  auto grads = BasicUNetWeights<double>::zeros(config);
  loss_and_gradients(weights, input, labels, grads);

  auto loss_at = [&]() { return sparse_ce_loss(forward(weights, input), labels); };

  const std::size_t tensors = weights.layers.size() * 2;
  const std::size_t per_tensor = std::max<std::size_t>(1, (min_samples + tensors - 1) / tensors);

  GradCheckResult result;
  for (std::size_t li = 0; li < weights.layers.size(); ++li) {
    for (int which = 0; which < 2; ++which) {
      std::vector<double>& params = which == 0 ? weights.layers[li].weight : weights.layers[li].bias;
      const std::vector<double>& analytic = which == 0 ? grads.layers[li].weight : grads.layers[li].bias;
      for (std::size_t s = 0; s < per_tensor; ++s) {
        const auto idx = static_cast<std::size_t>(rs.uniform_int(0, static_cast<std::int64_t>(params.size()) - 1));
        const double saved = params[idx];
        params[idx] = saved + step;
        const double plus = loss_at();
        params[idx] = saved - step;
        const double minus = loss_at();
        params[idx] = saved;
        const double numeric = (plus - minus) / (2.0 * step);
        const double ga = analytic[idx];
        const double err = std::abs(ga - numeric) / std::max({std::abs(ga), std::abs(numeric), 1e-8});
        ++result.checked;
        if (err > result.max_rel_error) {
          result.max_rel_error = err;
          result.worst_parameter = weights.layers[li].name + (which == 0 ? ".weight[" : ".bias[") +
                                   std::to_string(idx) + "]";
        }
      }
    }
  }
  return result;
}

}  // namespace wxaug
