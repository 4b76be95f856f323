#include "wxaug/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wxaug/errors.hpp"
#include "wxaug/parallel.hpp"

namespace wxaug {

namespace {

constexpr double kReferenceSide = 224.0;

bool ordered(const std::array<double, 2>& r) { return r[0] <= r[1]; }

bool color_ok(const std::array<int, 3>& c) {
  return std::all_of(c.begin(), c.end(), [](int v) { return v >= 0 && v <= 255; });
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(2.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable convolution with clamp-to-edge borders, rounded once at the end.
ImageRGB separable_filter(const ImageRGB& img, const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width;
  const int h = img.height;
  std::vector<double> tmp(img.data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int sx = std::clamp(x + i, 0, w - 1);
          acc += kernel[static_cast<std::size_t>(i + radius)] * img.at(sx, y)[c];
        }
        tmp[img.offset(x, y) + c] = acc;
      }
    }
  }
  ImageRGB out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int sy = std::clamp(y + i, 0, h - 1);
          acc += kernel[static_cast<std::size_t>(i + radius)] * tmp[img.offset(x, sy) + c];
        }
        out.at(x, y)[c] = to_u8(acc);
      }
    }
  }
  return out;
}

}  // namespace

void AugmentConfig::validate() const {
  auto fail = [](const char* what) { throw ConfigError(std::string("augment config: ") + what); };
  if (!(gate_probability >= 0.0 && gate_probability <= 1.0)) fail("gate_probability outside [0,1]");
  if (!ordered(gamma_range) || !(gamma_range[0] > 0.0)) fail("gamma_range must be ordered and positive");
  if (rgb_shift_limit < 0 || rgb_shift_limit > 255) fail("rgb_shift_limit outside [0,255]");
  if (!ordered(fog_coef_range) || fog_coef_range[0] < 0.0 || fog_coef_range[1] > 1.0) {
    fail("fog_coef_range must be ordered within [0,1]");
  }
  if (!(fog_alpha >= 0.0 && fog_alpha <= 1.0)) fail("fog_alpha outside [0,1]");
  if (!color_ok(fog_color) || !color_ok(rain_drop_color)) fail("color outside [0,255]");
  if (!ordered(rain_slant_range) || rain_slant_range[0] < -90.0 || rain_slant_range[1] > 90.0) {
    fail("rain_slant_range must be ordered within [-90,90]");
  }
  if (!(rain_drop_length > 0.0)) fail("rain_drop_length must be positive");
  if (!ordered(rain_density_range) || rain_density_range[0] < 0.0) {
    fail("rain_density_range must be ordered and non-negative");
  }
  if (!(rain_brightness >= 0.0)) fail("rain_brightness must be non-negative");
  if (rain_blur_kernel < 1 || rain_blur_kernel % 2 == 0) fail("rain_blur_kernel must be odd and >= 1");
  if (!(flare_radius_frac >= 0.0)) fail("flare_radius_frac must be non-negative");
  if (!(flare_intensity >= 0.0 && flare_intensity <= 1.0)) fail("flare_intensity outside [0,1]");
}

ImageRGB apply_gamma(const ImageRGB& img, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("apply_gamma: gamma must be > 0");
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    lut[static_cast<std::size_t>(v)] = to_u8(255.0 * std::pow(v / 255.0, gamma));
  }
  ImageRGB out = img;
  for (auto& v : out.data) v = lut[v];
  return out;
}

ImageRGB apply_rgb_shift(const ImageRGB& img, int dr, int dg, int db) {
  for (int d : {dr, dg, db}) {
    if (d < -255 || d > 255) throw ConfigError("apply_rgb_shift: offset outside [-255,255]");
  }
  const int shift[3] = {dr, dg, db};
  ImageRGB out = img;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = static_cast<std::uint8_t>(std::clamp(out.data[i] + shift[i % 3], 0, 255));
  }
  return out;
}

ImageRGB fog_blend(const ImageRGB& img, double fog_coef, const AugmentConfig& cfg) {
  if (!(fog_coef >= 0.0 && fog_coef <= 1.0)) throw ConfigError("apply_fog: fog_coef outside [0,1]");
  const double alpha = cfg.fog_alpha * fog_coef;
  ImageRGB out = img;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = to_u8((1.0 - alpha) * img.data[i] + alpha * cfg.fog_color[i % 3]);
  }
  return out;
}

ImageRGB apply_fog(const ImageRGB& img, double fog_coef, const AugmentConfig& cfg) {
  if (!(fog_coef >= 0.0 && fog_coef <= 1.0)) throw ConfigError("apply_fog: fog_coef outside [0,1]");
  if (fog_coef == 0.0) return img;
  return separable_filter(fog_blend(img, fog_coef, cfg), gaussian_kernel(2.0 * fog_coef));
}

ImageRGB box_blur(const ImageRGB& img, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) throw ConfigError("box_blur: kernel must be odd and >= 1");
  if (kernel == 1) return img;
  return separable_filter(img, std::vector<double>(static_cast<std::size_t>(kernel), 1.0 / kernel));
}

ImageRGB apply_rain(const ImageRGB& img, RngStream& stream, const AugmentConfig& cfg) {
  const int w = img.width;
  const int h = img.height;
  const double area_scale = static_cast<double>(w) * h / (kReferenceSide * kReferenceSide);
  const double density = stream.uniform(cfg.rain_density_range[0], cfg.rain_density_range[1]);
  const int drops = round_half_up(density * area_scale);
  const double slant = stream.uniform(cfg.rain_slant_range[0], cfg.rain_slant_range[1]) *
                       std::numbers::pi / 180.0;
  const int length = std::max(1, round_half_up(cfg.rain_drop_length * std::min(w, h) / kReferenceSide));
  const double sx = std::sin(slant);
  const double sy = std::cos(slant);

  ImageRGB out = img;
  for (int d = 0; d < drops; ++d) {
    const auto x0 = static_cast<int>(stream.uniform_int(0, w - 1));
    const auto y0 = static_cast<int>(stream.uniform_int(0, h - 1));
    for (int k = 0; k < length; ++k) {
      const int x = x0 + round_half_up(k * sx);
      const int y = y0 + round_half_up(k * sy);
      if (x < 0 || x >= w || y < 0 || y >= h) continue;
      std::uint8_t* px = out.at(x, y);
      for (int c = 0; c < 3; ++c) px[c] = to_u8(0.7 * cfg.rain_drop_color[c] + 0.3 * px[c]);
    }
  }
  out = box_blur(out, cfg.rain_blur_kernel);
  for (auto& v : out.data) v = to_u8(v * cfg.rain_brightness);
  return out;
}

ImageRGB apply_sun_flare_at(const ImageRGB& img, int cx, int cy, const AugmentConfig& cfg) {
  const double radius = cfg.flare_radius_frac * std::min(img.width, img.height);
  ImageRGB out = img;
  if (!(radius > 0.0)) return out;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double d = std::hypot(x - cx, y - cy);
      if (d > radius) continue;
      const double k = cfg.flare_intensity * (1.0 - d / radius);
      std::uint8_t* px = out.at(x, y);
      for (int c = 0; c < 3; ++c) {
        px[c] = static_cast<std::uint8_t>(px[c] + round_half_up((255 - px[c]) * k));
      }
    }
  }
  return out;
}

ImageRGB apply_sun_flare(const ImageRGB& img, RngStream& stream, const AugmentConfig& cfg) {
  const int top_rows = std::max(1, img.height / 3);
  const auto cx = static_cast<int>(stream.uniform_int(0, img.width - 1));
  const auto cy = static_cast<int>(stream.uniform_int(0, top_rows - 1));
  return apply_sun_flare_at(img, cx, cy, cfg);
}

ImageRGB apply_transform(Transform t, const ImageRGB& img, RngStream& stream,
                         const AugmentConfig& cfg) {
  switch (t) {
    case Transform::Rain:
      return apply_rain(img, stream, cfg);
    case Transform::SunFlare:
      return apply_sun_flare(img, stream, cfg);
    case Transform::Fog:
      return apply_fog(img, stream.uniform(cfg.fog_coef_range[0], cfg.fog_coef_range[1]), cfg);
    case Transform::RgbShift: {
      const double lim = cfg.rgb_shift_limit;
      const int dr = round_half_up(stream.uniform(-lim, lim));
      const int dg = round_half_up(stream.uniform(-lim, lim));
      const int db = round_half_up(stream.uniform(-lim, lim));
      return apply_rgb_shift(img, dr, dg, db);
    }
    case Transform::Gamma:
      return apply_gamma(img, stream.uniform(cfg.gamma_range[0], cfg.gamma_range[1]));
  }
  return img;
}

ImageRGB augment_image(const ImageRGB& img, RngStream& stream, const AugmentConfig& cfg) {
  ImageRGB out = img;
  for (Transform t : kPipelineOrder) {
    if (stream.bernoulli(cfg.gate_probability)) out = apply_transform(t, out, stream, cfg);
  }
  return out;
}

std::vector<ImageRGB> augment_batch(std::span<const ImageRGB> images, std::uint64_t seed,
                                    const AugmentConfig& cfg, int jobs) {
  cfg.validate();
  std::vector<ImageRGB> out(images.size());
  parallel_for(images.size(), jobs, [&](std::size_t i) {
    RngStream stream = derive_stream(seed, {{"augment", i}});
    out[i] = augment_image(images[i], stream, cfg);
  });
  return out;
}

}  // namespace wxaug
