#include <gtest/gtest.h>

#include <vector>

#include "wxaug/augment.hpp"
#include "wxaug/errors.hpp"

using namespace wxaug;

namespace {

// 6x5 pattern shared with tests/oracles/augment_oracle.py.
ImageRGB pattern() {
  ImageRGB img(6, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 6; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y)[c] = static_cast<std::uint8_t>((37 * (y * 6 + x) + 11 * c) % 256);
    }
  }
  return img;
}

ImageRGB noise_image(std::uint64_t seed, int w, int h) {
  RngStream s = derive_stream(seed, {{"noise", 0}});
  ImageRGB img(w, h);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(s.uniform_int(0, 255));
  return img;
}

}  // namespace

TEST(Gamma, IdentityEndpointsAndFormula) {
  const ImageRGB img = noise_image(1, 17, 9);
  EXPECT_EQ(apply_gamma(img, 1.0), img);
  ImageRGB px(1, 1);
  px.data = {128, 0, 255};
  const ImageRGB g2 = apply_gamma(px, 2.0);
  EXPECT_EQ(g2.data[0], 64);  // round(128^2 / 255)
  EXPECT_EQ(g2.data[1], 0);
  EXPECT_EQ(g2.data[2], 255);
  ImageRGB six(2, 1);
  six.data = {0, 1, 64, 128, 200, 255};
  EXPECT_EQ(apply_gamma(six, 0.8).data, (std::vector<std::uint8_t>{0, 3, 84, 147, 210, 255}));
  EXPECT_EQ(apply_gamma(six, 1.2).data, (std::vector<std::uint8_t>{0, 0, 49, 112, 191, 255}));
  EXPECT_THROW(apply_gamma(img, 0.0), ConfigError);
}

TEST(Gamma, MonotoneInPixelAndExponent) {
  ImageRGB ramp(256, 1);
  for (int v = 0; v < 256; ++v) std::fill_n(ramp.at(v, 0), 3, static_cast<std::uint8_t>(v));
  for (double g : {0.8, 0.9, 1.1, 1.2}) {
    const ImageRGB out = apply_gamma(ramp, g);
    for (int v = 1; v < 256; ++v) ASSERT_GE(out.at(v, 0)[0], out.at(v - 1, 0)[0]);
  }
  const ImageRGB lo = apply_gamma(ramp, 0.8);
  const ImageRGB hi = apply_gamma(ramp, 1.2);
  for (int v = 0; v < 256; ++v) ASSERT_GE(lo.at(v, 0)[0], hi.at(v, 0)[0]);
}

TEST(RgbShift, ClampingAndExactMean) {
  ImageRGB px(1, 1);
  px.data = {250, 10, 100};
  EXPECT_EQ(apply_rgb_shift(px, 20, -20, 20).data, (std::vector<std::uint8_t>{255, 0, 120}));
  const ImageRGB img = noise_image(2, 8, 8);
  EXPECT_EQ(apply_rgb_shift(img, 0, 0, 0), img);
  const ImageRGB flat = apply_rgb_shift(ImageRGB(9, 4, 128), 5, 5, 5);
  for (auto v : flat.data) ASSERT_EQ(v, 133);
  EXPECT_THROW(apply_rgb_shift(img, 256, 0, 0), ConfigError);
}

TEST(Fog, ZeroCoefIsIdentity) {
  const ImageRGB img = noise_image(3, 20, 11);
  EXPECT_EQ(apply_fog(img, 0.0, AugmentConfig{}), img);
}

TEST(Fog, ConstantImageBlendsExactly) {
  const ImageRGB out = apply_fog(ImageRGB(16, 12, 0), 1.0, AugmentConfig{});
  for (auto v : out.data) ASSERT_EQ(v, 110);
}

TEST(Fog, MatchesDirectFormula) {
  const std::vector<std::uint8_t> expected = {
      111, 119, 126, 111, 119, 126, 119, 126, 134, 136, 143, 151, 157, 164, 172, 174, 181, 189,
      146, 154, 162, 132, 140, 148, 124, 132, 139, 129, 136, 144, 143, 151, 159, 158, 166, 173,
      171, 179, 186, 157, 164, 172, 139, 146, 154, 128, 136, 143, 130, 138, 145, 139, 146, 154,
      176, 183, 191, 172, 180, 187, 159, 166, 174, 139, 146, 154, 124, 132, 140, 122, 130, 138,
      169, 177, 184, 177, 185, 192, 175, 183, 190, 154, 162, 169, 126, 134, 142, 111, 119, 127};
  EXPECT_EQ(apply_fog(pattern(), 0.6, AugmentConfig{}).data, expected);
}

TEST(Fog, BlendMovesTowardFogColor) {
  const AugmentConfig cfg;
  const ImageRGB img = noise_image(4, 10, 10);
  for (double coef : {0.2, 0.5, 1.0}) {
    const ImageRGB b = fog_blend(img, coef, cfg);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      const int fc = cfg.fog_color[i % 3];
      ASSERT_LE(std::abs(b.data[i] - fc), std::abs(img.data[i] - fc));
    }
  }
  EXPECT_THROW(apply_fog(img, 1.5, cfg), ConfigError);
}

TEST(Rain, NoOpParametersAreIdentity) {
  AugmentConfig cfg;
  cfg.rain_density_range = {0.0, 0.0};
  cfg.rain_brightness = 1.0;
  cfg.rain_blur_kernel = 1;
  const ImageRGB img = noise_image(5, 30, 20);
  RngStream s = derive_stream(1, {{"rain", 0}});
  EXPECT_EQ(apply_rain(img, s, cfg), img);
}

TEST(Rain, ZeroDropsOnlyDims) {
  AugmentConfig cfg;
  cfg.rain_density_range = {0.0, 0.0};
  RngStream s = derive_stream(1, {{"rain", 1}});
  const ImageRGB out = apply_rain(ImageRGB(32, 32, 128), s, cfg);
  for (auto v : out.data) ASSERT_EQ(v, 90);  // round(128 * 0.7)
}

TEST(Rain, StreaksAreDeterministicAndVisible) {
  AugmentConfig cfg;
  cfg.rain_brightness = 1.0;
  cfg.rain_blur_kernel = 1;
  const ImageRGB img(224, 224, 0);
  RngStream a = derive_stream(8, {{"rain", 0}});
  RngStream b = derive_stream(8, {{"rain", 0}});
  const ImageRGB ra = apply_rain(img, a, cfg);
  EXPECT_EQ(ra, apply_rain(img, b, cfg));
  std::size_t lit = 0;
  for (std::size_t i = 0; i < ra.data.size(); i += 3) lit += ra.data[i] == 140;  // 0.7 * 200 over black
  // At least 50 drops of 20 px at the reference size, minus clipping at the border.
  EXPECT_GT(lit, 400u);
}

TEST(SunFlare, CenterValueAndFormula) {
  AugmentConfig cfg;
  const ImageRGB black(40, 40, 0);
  const ImageRGB out = apply_sun_flare_at(black, 10, 5, cfg);
  EXPECT_EQ(out.at(10, 5)[0], 153);  // round(255 * 0.6)
  EXPECT_EQ(out.at(39, 39)[0], 0);
  const std::vector<std::uint8_t> expected = {
      0,   11,  22,  44,  55,  66,  110, 119, 128, 116, 127, 137, 148, 159, 170, 185, 196, 207,
      222, 233, 244, 53,  62,  71,  169, 173, 178, 113, 121, 130, 114, 125, 136, 151, 162, 173,
      188, 199, 210, 226, 237, 247, 56,  65,  73,  50,  61,  72,  80,  91,  102, 117, 128, 139,
      154, 165, 176, 191, 202, 213, 228, 239, 250, 9,   20,  31,  46,  57,  68,  83,  94,  105,
      120, 131, 142, 157, 168, 179, 194, 205, 216, 231, 242, 253, 12,  23,  34,  49,  60,  71};
  EXPECT_EQ(apply_sun_flare_at(pattern(), 2, 1, cfg).data, expected);
}

TEST(SunFlare, ZeroIntensityAndPointwiseBrighter) {
  AugmentConfig off;
  off.flare_intensity = 0.0;
  const ImageRGB img = noise_image(6, 33, 21);
  RngStream s = derive_stream(2, {{"flare", 0}});
  EXPECT_EQ(apply_sun_flare(img, s, off), img);
  for (int i = 0; i < 20; ++i) {
    const ImageRGB out = apply_sun_flare(img, s, AugmentConfig{});
    for (std::size_t k = 0; k < img.data.size(); ++k) ASSERT_GE(out.data[k], img.data[k]);
  }
}

TEST(BoxBlur, Validation) {
  const ImageRGB img = noise_image(7, 5, 5);
  EXPECT_EQ(box_blur(img, 1), img);
  EXPECT_THROW(box_blur(img, 2), ConfigError);
  for (auto v : box_blur(ImageRGB(7, 7, 77), 5).data) ASSERT_EQ(v, 77);
}

TEST(Pipeline, ClosedGatesAreIdentity) {
  AugmentConfig cfg;
  cfg.gate_probability = 0.0;
  const ImageRGB img = noise_image(8, 24, 24);
  RngStream s = derive_stream(3, {{"p", 0}});
  EXPECT_EQ(augment_image(img, s, cfg), img);
}

TEST(Pipeline, OpenGatesChangeImage) {
  AugmentConfig cfg;
  cfg.gate_probability = 1.0;
  const ImageRGB img = noise_image(9, 48, 48);
  RngStream s = derive_stream(3, {{"p", 1}});
  EXPECT_NE(augment_image(img, s, cfg), img);
}

TEST(Pipeline, DeterministicAndJobIndependent) {
  std::vector<ImageRGB> images;
  for (int i = 0; i < 24; ++i) images.push_back(noise_image(100 + i, 32, 24));
  const AugmentConfig cfg;
  const auto one = augment_batch(images, 77, cfg, 1);
  const auto eight = augment_batch(images, 77, cfg, 8);
  EXPECT_EQ(one, eight);
  RngStream s = derive_stream(77, {{"augment", 5}});
  EXPECT_EQ(augment_image(images[5], s, cfg), one[5]);
  for (std::size_t i = 0; i < images.size(); ++i) {
    EXPECT_EQ(one[i].width, images[i].width);
    EXPECT_EQ(one[i].height, images[i].height);
  }
}

TEST(Pipeline, GateDrawsOnlyWhenOpen) {
  // With every gate closed the stream advances exactly five draws.
  AugmentConfig cfg;
  cfg.gate_probability = 0.0;
  RngStream s = derive_stream(4, {{"g", 0}});
  RngStream ref = s;
  augment_image(noise_image(1, 8, 8), s, cfg);
  for (int i = 0; i < 5; ++i) ref.next_u32();
  EXPECT_EQ(s, ref);
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(AugmentConfig{}.validate());
  AugmentConfig c;
  c.gate_probability = 1.1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.gamma_range = {1.2, 0.8};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.rain_blur_kernel = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.fog_color = {0, 300, 0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.flare_intensity = -0.1;
  EXPECT_THROW(c.validate(), ConfigError);
}
