#include "wxaug/unet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wxaug/errors.hpp"
#include "wxaug/loss.hpp"

namespace wxaug {

void UNetConfig::validate() const {
  if (levels < 1 || base_channels < 1 || num_classes < 1 || input_size < 1) {
    throw ConfigError("unet config: levels, base_channels, num_classes and input_size must be >= 1");
  }
  if (levels > 8 || num_classes > 256) throw ConfigError("unet config: levels or num_classes too large");
  if (input_size % (1 << levels) != 0) {
    throw ConfigError("unet config: input_size " + std::to_string(input_size) +
                      " is not divisible by 2^levels = " + std::to_string(1 << levels));
  }
}

namespace {

// Layer index helpers matching the declaration order documented in unet.hpp.
struct LayerIndex {
  int levels;
  int enc_a(int l) const { return 2 * l; }
  int enc_b(int l) const { return 2 * l + 1; }
  int mid_a() const { return 2 * levels; }
  int mid_b() const { return 2 * levels + 1; }
  int dec_base(int l) const { return 2 * levels + 2 + 3 * (levels - 1 - l); }
  int dec_up(int l) const { return dec_base(l); }
  int dec_a(int l) const { return dec_base(l) + 1; }
  int dec_b(int l) const { return dec_base(l) + 2; }
  int head() const { return 5 * levels + 2; }
};

template <typename T>
ConvLayer<T> make_layer(std::string name, int kernel, int in_ch, int out_ch) {
  ConvLayer<T> l{std::move(name), kernel, in_ch, out_ch, {}, {}};
  l.weight.assign(l.weight_count(), T(0));
  l.bias.assign(static_cast<std::size_t>(out_ch), T(0));
  return l;
}

// Same-padding convolution of one HWC image; optional fused ReLU.
template <typename T>
void conv_forward(const T* __restrict in, int H, int W, const ConvLayer<T>& layer,
                  T* __restrict out, bool relu) {
  const int K = layer.kernel;
  const int pad = K / 2;
  const int ci_n = layer.in_ch;
  const int co_n = layer.out_ch;
  const T* __restrict weight = layer.weight.data();
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      T* __restrict o = out + (static_cast<std::size_t>(y) * W + x) * co_n;
      for (int co = 0; co < co_n; ++co) o[co] = layer.bias[static_cast<std::size_t>(co)];
      for (int ky = 0; ky < K; ++ky) {
        const int sy = y + ky - pad;
        if (sy < 0 || sy >= H) continue;
        for (int kx = 0; kx < K; ++kx) {
          const int sx = x + kx - pad;
          if (sx < 0 || sx >= W) continue;
          const T* __restrict ip = in + (static_cast<std::size_t>(sy) * W + sx) * ci_n;
          const T* __restrict wp = weight + static_cast<std::size_t>(ky * K + kx) * ci_n * co_n;
          for (int ci = 0; ci < ci_n; ++ci) {
            const T v = ip[ci];
            if (v == T(0)) continue;
            const T* __restrict wr = wp + static_cast<std::size_t>(ci) * co_n;
            for (int co = 0; co < co_n; ++co) o[co] += v * wr[co];
          }
        }
      }
      if (relu) {
        for (int co = 0; co < co_n; ++co) o[co] = std::max(o[co], T(0));
      }
    }
  }
}

// Accumulates dW, db into `grad` and (when din != nullptr) dX into din.
// `dout` is the gradient w.r.t. the pre-activation output.
template <typename T>
void conv_backward(const T* __restrict in, int H, int W, const ConvLayer<T>& layer,
                   const T* __restrict dout, T* __restrict din, ConvLayer<T>& grad,
                   std::vector<T>& transposed) {
  const int K = layer.kernel;
  const int pad = K / 2;
  const int ci_n = layer.in_ch;
  const int co_n = layer.out_ch;
  if (din != nullptr) {
    transposed.resize(layer.weight.size());
    for (int k = 0; k < K * K; ++k) {
      for (int ci = 0; ci < ci_n; ++ci) {
        for (int co = 0; co < co_n; ++co) {
          const std::size_t base = static_cast<std::size_t>(k) * ci_n * co_n;
          transposed[base + static_cast<std::size_t>(co) * ci_n + ci] =
              layer.weight[base + static_cast<std::size_t>(ci) * co_n + co];
        }
      }
    }
  }
  T* __restrict dw = grad.weight.data();
  T* __restrict db = grad.bias.data();
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const T* __restrict g = dout + (static_cast<std::size_t>(y) * W + x) * co_n;
      bool any = false;
      for (int co = 0; co < co_n; ++co) any |= (g[co] != T(0));
      if (!any) continue;
      for (int co = 0; co < co_n; ++co) db[co] += g[co];
      for (int ky = 0; ky < K; ++ky) {
        const int sy = y + ky - pad;
        if (sy < 0 || sy >= H) continue;
        for (int kx = 0; kx < K; ++kx) {
          const int sx = x + kx - pad;
          if (sx < 0 || sx >= W) continue;
          const std::size_t kofs = static_cast<std::size_t>(ky * K + kx) * ci_n * co_n;
          const std::size_t pofs = (static_cast<std::size_t>(sy) * W + sx) * ci_n;
          const T* __restrict ip = in + pofs;
          T* __restrict dwp = dw + kofs;
          for (int ci = 0; ci < ci_n; ++ci) {
            const T v = ip[ci];
            if (v == T(0)) continue;
            T* __restrict dwr = dwp + static_cast<std::size_t>(ci) * co_n;
            for (int co = 0; co < co_n; ++co) dwr[co] += v * g[co];
          }
          if (din != nullptr) {
            T* __restrict dip = din + pofs;
            const T* __restrict wt = transposed.data() + kofs;
            for (int co = 0; co < co_n; ++co) {
              const T gv = g[co];
              if (gv == T(0)) continue;
              const T* __restrict wr = wt + static_cast<std::size_t>(co) * ci_n;
              for (int ci = 0; ci < ci_n; ++ci) dip[ci] += gv * wr[ci];
            }
          }
        }
      }
    }
  }
}

// Zeroes gradient entries whose forward ReLU output was not positive.
template <typename T>
void relu_mask(const std::vector<T>& activation, std::vector<T>& grad) {
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(activation[i] > T(0))) grad[i] = T(0);
  }
}

// 2x2 max-pool; argmax records the flat input offset, first maximum wins in
// the scan order (0,0), (0,1), (1,0), (1,1).
template <typename T>
void maxpool_forward(const std::vector<T>& in, int H, int W, int C, std::vector<T>& out,
                     std::vector<std::uint32_t>& argmax) {
  const int h2 = H / 2;
  const int w2 = W / 2;
  out.assign(static_cast<std::size_t>(h2) * w2 * C, T(0));
  argmax.assign(out.size(), 0);
  for (int y = 0; y < h2; ++y) {
    for (int x = 0; x < w2; ++x) {
      for (int c = 0; c < C; ++c) {
        std::size_t best = (static_cast<std::size_t>(2 * y) * W + 2 * x) * C + c;
        for (const auto& [dy, dx] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{1, 1}}) {
          const std::size_t idx = (static_cast<std::size_t>(2 * y + dy) * W + 2 * x + dx) * C + c;
          if (in[idx] > in[best]) best = idx;
        }
        const std::size_t o = (static_cast<std::size_t>(y) * w2 + x) * C + c;
        out[o] = in[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
}

template <typename T>
void upsample_forward(const std::vector<T>& in, int H, int W, int C, std::vector<T>& out) {
  out.resize(static_cast<std::size_t>(4) * H * W * C);
  for (int y = 0; y < 2 * H; ++y) {
    for (int x = 0; x < 2 * W; ++x) {
      const T* src = in.data() + (static_cast<std::size_t>(y / 2) * W + x / 2) * C;
      T* dst = out.data() + (static_cast<std::size_t>(y) * 2 * W + x) * C;
      std::copy(src, src + C, dst);
    }
  }
}

// Sums gradients over each 2x2 replication group; H, W are the small size.
template <typename T>
void upsample_backward(const std::vector<T>& dout, int H, int W, int C, std::vector<T>& din) {
  din.assign(static_cast<std::size_t>(H) * W * C, T(0));
  for (int y = 0; y < 2 * H; ++y) {
    for (int x = 0; x < 2 * W; ++x) {
      const T* src = dout.data() + (static_cast<std::size_t>(y) * 2 * W + x) * C;
      T* dst = din.data() + (static_cast<std::size_t>(y / 2) * W + x / 2) * C;
      for (int c = 0; c < C; ++c) dst[c] += src[c];
    }
  }
}

template <typename T>
struct ForwardCache {
  std::vector<std::vector<T>> enc_a, enc_b, pooled;
  std::vector<std::vector<std::uint32_t>> argmax;
  std::vector<T> mid_a, mid_b;
  std::vector<std::vector<T>> up_in, up, cat, dec_a, dec_b;
  std::vector<T> logits;

  explicit ForwardCache(int levels)
      : enc_a(levels), enc_b(levels), pooled(levels), argmax(levels),
        up_in(levels), up(levels), cat(levels), dec_a(levels), dec_b(levels) {}
};

template <typename T>
void forward_image(const BasicUNetWeights<T>& wts, const T* input, ForwardCache<T>& cache) {
  const UNetConfig& cfg = wts.config;
  const LayerIndex li{cfg.levels};
  const int L = cfg.levels;
  auto size_at = [&](int l) { return cfg.input_size >> l; };
  auto area = [&](int l) { return static_cast<std::size_t>(size_at(l)) * size_at(l); };

  const T* x = input;
  for (int l = 0; l < L; ++l) {
    const int s = size_at(l);
    const int c = cfg.channels_at(l);
    cache.enc_a[l].resize(area(l) * c);
    conv_forward(x, s, s, wts.layers[li.enc_a(l)], cache.enc_a[l].data(), true);
    cache.enc_b[l].resize(area(l) * c);
    conv_forward(cache.enc_a[l].data(), s, s, wts.layers[li.enc_b(l)], cache.enc_b[l].data(), true);
    maxpool_forward(cache.enc_b[l], s, s, c, cache.pooled[l], cache.argmax[l]);
    x = cache.pooled[l].data();
  }
  {
    const int s = size_at(L);
    const int c = cfg.channels_at(L);
    cache.mid_a.resize(area(L) * c);
    conv_forward(x, s, s, wts.layers[li.mid_a()], cache.mid_a.data(), true);
    cache.mid_b.resize(area(L) * c);
    conv_forward(cache.mid_a.data(), s, s, wts.layers[li.mid_b()], cache.mid_b.data(), true);
  }
  const std::vector<T>* y = &cache.mid_b;
  for (int l = L - 1; l >= 0; --l) {
    const int s = size_at(l);
    const int c = cfg.channels_at(l);
    upsample_forward(*y, s / 2, s / 2, cfg.channels_at(l + 1), cache.up_in[l]);
    cache.up[l].resize(area(l) * c);
    conv_forward(cache.up_in[l].data(), s, s, wts.layers[li.dec_up(l)], cache.up[l].data(), true);
    cache.cat[l].resize(area(l) * 2 * c);
    for (std::size_t p = 0; p < area(l); ++p) {
      std::copy_n(cache.up[l].data() + p * c, c, cache.cat[l].data() + p * 2 * c);
      std::copy_n(cache.enc_b[l].data() + p * c, c, cache.cat[l].data() + p * 2 * c + c);
    }
    cache.dec_a[l].resize(area(l) * c);
    conv_forward(cache.cat[l].data(), s, s, wts.layers[li.dec_a(l)], cache.dec_a[l].data(), true);
    cache.dec_b[l].resize(area(l) * c);
    conv_forward(cache.dec_a[l].data(), s, s, wts.layers[li.dec_b(l)], cache.dec_b[l].data(), true);
    y = &cache.dec_b[l];
  }
  cache.logits.resize(area(0) * cfg.num_classes);
  conv_forward(y->data(), cfg.input_size, cfg.input_size, wts.layers[li.head()], cache.logits.data(), false);
}

template <typename T>
void backward_image(const BasicUNetWeights<T>& wts, const T* input, const ForwardCache<T>& cache,
                    const T* dlogits, BasicUNetWeights<T>& grads, std::vector<T>& scratch) {
  const UNetConfig& cfg = wts.config;
  const LayerIndex li{cfg.levels};
  const int L = cfg.levels;
  auto size_at = [&](int l) { return cfg.input_size >> l; };
  auto area = [&](int l) { return static_cast<std::size_t>(size_at(l)) * size_at(l); };

  // Gradient w.r.t. the current decoder output (post-ReLU activation).
  std::vector<T> dy(area(0) * cfg.channels_at(0), T(0));
  conv_backward(cache.dec_b[0].data(), cfg.input_size, cfg.input_size, wts.layers[li.head()], dlogits,
                dy.data(), grads.layers[li.head()], scratch);

  std::vector<std::vector<T>> dskip(static_cast<std::size_t>(L));
  std::vector<T> da, dcat, dup, dup_in;
  for (int l = 0; l < L; ++l) {
    const int s = size_at(l);
    const int c = cfg.channels_at(l);
    relu_mask(cache.dec_b[l], dy);
    da.assign(area(l) * c, T(0));
    conv_backward(cache.dec_a[l].data(), s, s, wts.layers[li.dec_b(l)], dy.data(), da.data(),
                  grads.layers[li.dec_b(l)], scratch);
    relu_mask(cache.dec_a[l], da);
    dcat.assign(area(l) * 2 * c, T(0));
    conv_backward(cache.cat[l].data(), s, s, wts.layers[li.dec_a(l)], da.data(), dcat.data(),
                  grads.layers[li.dec_a(l)], scratch);
    dup.resize(area(l) * c);
    dskip[l].resize(area(l) * c);
    for (std::size_t p = 0; p < area(l); ++p) {
      std::copy_n(dcat.data() + p * 2 * c, c, dup.data() + p * c);
      std::copy_n(dcat.data() + p * 2 * c + c, c, dskip[l].data() + p * c);
    }
    relu_mask(cache.up[l], dup);
    dup_in.assign(area(l) * cfg.channels_at(l + 1), T(0));
    conv_backward(cache.up_in[l].data(), s, s, wts.layers[li.dec_up(l)], dup.data(), dup_in.data(),
                  grads.layers[li.dec_up(l)], scratch);
    upsample_backward(dup_in, s / 2, s / 2, cfg.channels_at(l + 1), dy);
  }

  // Bottleneck; dy now holds d(mid_b).
  std::vector<T> dpooled;
  {
    const int s = size_at(L);
    const int c = cfg.channels_at(L);
    relu_mask(cache.mid_b, dy);
    da.assign(area(L) * c, T(0));
    conv_backward(cache.mid_a.data(), s, s, wts.layers[li.mid_b()], dy.data(), da.data(),
                  grads.layers[li.mid_b()], scratch);
    relu_mask(cache.mid_a, da);
    dpooled.assign(area(L) * cfg.channels_at(L - 1), T(0));
    conv_backward(cache.pooled[L - 1].data(), s, s, wts.layers[li.mid_a()], da.data(), dpooled.data(),
                  grads.layers[li.mid_a()], scratch);
  }

  std::vector<T> denc_b;
  for (int l = L - 1; l >= 0; --l) {
    const int s = size_at(l);
    const int c = cfg.channels_at(l);
    denc_b = dskip[l];
    for (std::size_t o = 0; o < dpooled.size(); ++o) denc_b[cache.argmax[l][o]] += dpooled[o];
    relu_mask(cache.enc_b[l], denc_b);
    da.assign(area(l) * c, T(0));
    conv_backward(cache.enc_a[l].data(), s, s, wts.layers[li.enc_b(l)], denc_b.data(), da.data(),
                  grads.layers[li.enc_b(l)], scratch);
    relu_mask(cache.enc_a[l], da);
    if (l == 0) {
      conv_backward(input, s, s, wts.layers[li.enc_a(0)], da.data(), static_cast<T*>(nullptr),
                    grads.layers[li.enc_a(0)], scratch);
    } else {
      dpooled.assign(area(l) * cfg.channels_at(l - 1), T(0));
      conv_backward(cache.pooled[l - 1].data(), s, s, wts.layers[li.enc_a(l)], da.data(),
                    dpooled.data(), grads.layers[li.enc_a(l)], scratch);
    }
  }
}

template <typename T>
void check_input(const UNetConfig& cfg, const Tensor<T>& batch) {
  if (batch.h != cfg.input_size || batch.w != cfg.input_size || batch.c != 3) {
    throw DataError("unet: expected input (n, " + std::to_string(cfg.input_size) + ", " +
                    std::to_string(cfg.input_size) + ", 3), got (" + std::to_string(batch.n) + ", " +
                    std::to_string(batch.h) + ", " + std::to_string(batch.w) + ", " +
                    std::to_string(batch.c) + ")");
  }
}

}  // namespace

template <typename T>
BasicUNetWeights<T> BasicUNetWeights<T>::zeros(const UNetConfig& config) {
  config.validate();
  BasicUNetWeights<T> w;
  w.config = config;
  const int L = config.levels;
  for (int l = 0; l < L; ++l) {
    const int in = l == 0 ? 3 : config.channels_at(l - 1);
    const std::string p = "enc" + std::to_string(l);
    w.layers.push_back(make_layer<T>(p + "_a", 3, in, config.channels_at(l)));
    w.layers.push_back(make_layer<T>(p + "_b", 3, config.channels_at(l), config.channels_at(l)));
  }
  w.layers.push_back(make_layer<T>("mid_a", 3, config.channels_at(L - 1), config.channels_at(L)));
  w.layers.push_back(make_layer<T>("mid_b", 3, config.channels_at(L), config.channels_at(L)));
  for (int l = L - 1; l >= 0; --l) {
    const int c = config.channels_at(l);
    const std::string p = "dec" + std::to_string(l);
    w.layers.push_back(make_layer<T>(p + "_up", 3, config.channels_at(l + 1), c));
    w.layers.push_back(make_layer<T>(p + "_a", 3, 2 * c, c));
    w.layers.push_back(make_layer<T>(p + "_b", 3, c, c));
  }
  w.layers.push_back(make_layer<T>("head", 1, config.channels_at(0), config.num_classes));
  return w;
}

template <typename T>
std::size_t BasicUNetWeights<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

template <typename T>
void BasicUNetWeights<T>::set_zero() {
  for (auto& l : layers) {
    std::fill(l.weight.begin(), l.weight.end(), T(0));
    std::fill(l.bias.begin(), l.bias.end(), T(0));
  }
}

UNetWeights init_weights(const UNetConfig& config, RngStream& stream) {
  UNetWeights w = UNetWeights::zeros(config);
  for (std::size_t i = 0; i + 1 < w.layers.size(); ++i) {
    auto& layer = w.layers[i];
    const double fan_in = static_cast<double>(layer.kernel) * layer.kernel * layer.in_ch;
    const double bound = std::sqrt(6.0 / fan_in);
    for (auto& v : layer.weight) v = static_cast<float>(stream.uniform(-bound, bound));
  }
  return w;
}

template <typename T>
Tensor<T> forward(const BasicUNetWeights<T>& weights, const Tensor<T>& batch) {
  const UNetConfig& cfg = weights.config;
  check_input(cfg, batch);
  Tensor<T> logits(batch.n, cfg.input_size, cfg.input_size, cfg.num_classes);
  ForwardCache<T> cache(cfg.levels);
  for (int b = 0; b < batch.n; ++b) {
    forward_image(weights, batch.image(b), cache);
    std::copy(cache.logits.begin(), cache.logits.end(), logits.image(b));
  }
  return logits;
}

template <typename T>
BatchStats loss_and_gradients(const BasicUNetWeights<T>& weights, const Tensor<T>& batch,
                              std::span<const std::uint8_t> labels, BasicUNetWeights<T>& grads,
                              int ignore_class) {
  const UNetConfig& cfg = weights.config;
  check_input(cfg, batch);
  const std::size_t per_image = static_cast<std::size_t>(cfg.input_size) * cfg.input_size;
  if (labels.size() != per_image * static_cast<std::size_t>(batch.n)) {
    throw DataError("loss_and_gradients: label count does not match batch");
  }
  std::size_t counted = 0;
  for (auto v : labels) counted += (static_cast<int>(v) != ignore_class);
  const double scale = counted ? 1.0 / static_cast<double>(counted) : 0.0;

  grads.set_zero();
  BatchStats total;
  ForwardCache<T> cache(cfg.levels);
  std::vector<T> scratch;
  Tensor<T> logits(1, cfg.input_size, cfg.input_size, cfg.num_classes);
  Tensor<T> dlogits;
  for (int b = 0; b < batch.n; ++b) {
    forward_image(weights, batch.image(b), cache);
    std::copy(cache.logits.begin(), cache.logits.end(), logits.data.begin());
    const auto image_labels = labels.subspan(static_cast<std::size_t>(b) * per_image, per_image);
    const BatchStats s = sparse_ce_stats(logits, image_labels, ignore_class, &dlogits, scale);
    total.loss_sum += s.loss_sum;
    total.pixels += s.pixels;
    total.correct += s.correct;
    backward_image(weights, batch.image(b), cache, dlogits.data.data(), grads, scratch);
  }
  return total;
}

MaskImage predict_mask(const UNetWeights& weights, const ImageRGB& img) {
  const UNetConfig& cfg = weights.config;
  if (img.width != cfg.input_size || img.height != cfg.input_size) {
    throw DataError("predict_mask: image must be " + std::to_string(cfg.input_size) + "x" +
                    std::to_string(cfg.input_size));
  }
  Tensor<float> batch(1, img.height, img.width, 3);
  write_normalized(img, batch, 0);
  const Tensor<float> logits = forward(weights, batch);
  MaskImage mask(img.width, img.height);
  for (std::size_t p = 0; p < mask.data.size(); ++p) {
    mask.data[p] = static_cast<std::uint8_t>(
        argmax_class(logits.data.data() + p * cfg.num_classes, cfg.num_classes));
  }
  return mask;
}

template struct BasicUNetWeights<float>;
template struct BasicUNetWeights<double>;
template Tensor<float> forward<float>(const BasicUNetWeights<float>&, const Tensor<float>&);
template Tensor<double> forward<double>(const BasicUNetWeights<double>&, const Tensor<double>&);
template BatchStats loss_and_gradients<float>(const BasicUNetWeights<float>&, const Tensor<float>&,
                                              std::span<const std::uint8_t>,
                                              BasicUNetWeights<float>&, int);
template BatchStats loss_and_gradients<double>(const BasicUNetWeights<double>&, const Tensor<double>&,
                                               std::span<const std::uint8_t>,
                                               BasicUNetWeights<double>&, int);

}  // namespace wxaug
