#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "wxaug/image.hpp"
#include "wxaug/rng.hpp"

namespace wxaug {

/// Parameter ranges and gate probability for the five photometric weather
/// transforms. Rain sizes are given at a 224-pixel reference resolution and
/// rescaled to the actual image.
struct AugmentConfig {
  double gate_probability = 0.5;
  std::array<double, 2> gamma_range = {0.8, 1.2};
  int rgb_shift_limit = 20;
  std::array<double, 2> fog_coef_range = {0.3, 1.0};
  double fog_alpha = 0.5;
  std::array<int, 3> fog_color = {220, 220, 220};
  std::array<double, 2> rain_slant_range = {-10.0, 10.0};  // degrees
  double rain_drop_length = 20.0;                          // at 224 px
  std::array<int, 3> rain_drop_color = {200, 200, 200};
  std::array<double, 2> rain_density_range = {50.0, 150.0};  // drops at 224^2
  double rain_brightness = 0.7;
  int rain_blur_kernel = 3;
  double flare_radius_frac = 0.3;
  double flare_intensity = 0.6;

  /// Throws ConfigError on any violated constraint.
  void validate() const;
};

/// out = round(255 * (in / 255)^gamma). Throws ConfigError for gamma <= 0.
ImageRGB apply_gamma(const ImageRGB& img, double gamma);

/// out_c = clamp(in_c + d_c, 0, 255). Offsets must lie in [-255, 255].
ImageRGB apply_rgb_shift(const ImageRGB& img, int dr, int dg, int db);

/// Blend toward fog_color with alpha = fog_alpha * fog_coef, then a Gaussian
/// blur with sigma = 2 * fog_coef (radius ceil(2 sigma), clamp-to-edge).
/// fog_coef = 0 is an exact identity.
ImageRGB apply_fog(const ImageRGB& img, double fog_coef, const AugmentConfig& cfg);

/// The blend stage of apply_fog alone (exposed for the contraction property).
ImageRGB fog_blend(const ImageRGB& img, double fog_coef, const AugmentConfig& cfg);

/// Box blur with an odd k x k kernel and clamp-to-edge borders; k = 1 copies.
ImageRGB box_blur(const ImageRGB& img, int kernel);

/// Rain streaks drawn from `stream`: drop count, slant, then one top point per
/// drop; 1-px lines composited at 0.7 drop / 0.3 underlying; box blur; then
/// scale by rain_brightness.
ImageRGB apply_rain(const ImageRGB& img, RngStream& stream, const AugmentConfig& cfg);

/// Additive flare toward white centered in the top third of the image.
ImageRGB apply_sun_flare(const ImageRGB& img, RngStream& stream, const AugmentConfig& cfg);

/// Flare at a fixed integer center.
ImageRGB apply_sun_flare_at(const ImageRGB& img, int cx, int cy, const AugmentConfig& cfg);

enum class Transform { Rain, SunFlare, Fog, RgbShift, Gamma };
inline constexpr std::array<Transform, 5> kPipelineOrder = {
    Transform::Rain, Transform::SunFlare, Transform::Fog, Transform::RgbShift, Transform::Gamma};

/// Samples the transform's parameters from `stream` and applies it
/// unconditionally.
ImageRGB apply_transform(Transform t, const ImageRGB& img, RngStream& stream,
                         const AugmentConfig& cfg);

/// For each transform in kPipelineOrder: draw a Bernoulli gate; when open,
/// draw the transform's parameters and apply it. Closed gates consume only
/// the gate draw.
ImageRGB augment_image(const ImageRGB& img, RngStream& stream, const AugmentConfig& cfg);

/// Augments each image with its own stream derive_stream(seed, [("augment", i)]).
/// Output is byte-identical for any `jobs`.
std::vector<ImageRGB> augment_batch(std::span<const ImageRGB> images, std::uint64_t seed,
                                    const AugmentConfig& cfg, int jobs);

}  // namespace wxaug
