#include <benchmark/benchmark.h>

#include <vector>

#include "wxaug/augment.hpp"
#include "wxaug/rng.hpp"
#include "wxaug/scene.hpp"
#include "wxaug/stats.hpp"
#include "wxaug/tensor.hpp"
#include "wxaug/unet.hpp"
#include "wxaug/weather.hpp"

using namespace wxaug;

namespace {

std::pair<ImageRGB, MaskImage> scene(int size) {
  return render_scene({kTowns[0], 42}, preset_weather("ClearNoon"), size, size);
}

// Forward + backward for one batch of the default 64x64 model.
void BM_LossAndGradients(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const UNetConfig cfg;
  RngStream s = derive_stream(42, {{"bench_init", 0}});
  const UNetWeights w = init_weights(cfg, s);
  UNetWeights grads = UNetWeights::zeros(cfg);
  const auto [rgb, mask] = scene(cfg.input_size);
  Tensor<float> x(batch, cfg.input_size, cfg.input_size, 3);
  std::vector<std::uint8_t> labels;
  for (int b = 0; b < batch; ++b) {
    write_normalized(rgb, x, b);
    labels.insert(labels.end(), mask.data.begin(), mask.data.end());
  }
  for (auto _ : state) {
    grads.set_zero();
    benchmark::DoNotOptimize(loss_and_gradients(w, x, labels, grads));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_LossAndGradients)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const UNetConfig cfg;
  RngStream s = derive_stream(42, {{"bench_init", 0}});
  const UNetWeights w = init_weights(cfg, s);
  Tensor<float> x(8, cfg.input_size, cfg.input_size, 3);
  write_normalized(scene(cfg.input_size).first, x, 0);
  for (auto _ : state) benchmark::DoNotOptimize(forward(w, x));
  state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMillisecond);

void BM_AugmentImage(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const ImageRGB img = scene(size).first;
  AugmentConfig cfg;
  cfg.gate_probability = 1.0;
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream s = derive_stream(42, {{"bench_aug", i++}});
    benchmark::DoNotOptimize(augment_image(img, s, cfg));
  }
}
BENCHMARK(BM_AugmentImage)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_RenderScene(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const WeatherParams weather = preset_weather("HardRainNoon");
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(render_scene({kTowns[i % kTowns.size()], i++}, weather, size, size));
}
BENCHMARK(BM_RenderScene)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_StudentTCdf(benchmark::State& state) {
  double t = -6.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(student_t_cdf(t, 18.0));
    t = t > 6.0 ? -6.0 : t + 0.013;
  }
}
BENCHMARK(BM_StudentTCdf);

}  // namespace

BENCHMARK_MAIN();
