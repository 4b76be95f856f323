#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "test_util.hpp"
#include "wxaug/dataset.hpp"
#include "wxaug/errors.hpp"
#include "wxaug/png_io.hpp"
#include "wxaug/scene.hpp"
#include "wxaug/weather.hpp"

using namespace wxaug;
using wxaug::test::TempDir;

TEST(Weather, PresetTable) {
  const WeatherParams clear = preset_weather("ClearNoon");
  EXPECT_EQ(clear.precipitation, 0.0);
  EXPECT_EQ(clear.fog_density, 0.0);
  EXPECT_GT(clear.sun_altitude_deg, 0.0);
  EXPECT_GE(preset_weather("HardRainNoon").precipitation, 0.8);
  EXPECT_TRUE(preset_weather("ClearNight").is_night());
  EXPECT_THROW(preset_weather("ClearMorning"), ConfigError);
  std::set<std::string_view> names;
  for (const auto& p : weather_presets()) {
    names.insert(p.name);
    EXPECT_NO_THROW(p.params.validate()) << p.name;
  }
  EXPECT_EQ(names.size(), weather_presets().size());
}

TEST(Weather, ConditionCodesRoundTrip) {
  for (ConditionCode c : kTestConditions) EXPECT_EQ(parse_condition(to_string(c)), c);
  EXPECT_THROW(parse_condition("XX"), ConfigError);
}

TEST(Weather, SamplesStayInTheirBoxes) {
  for (ConditionCode c : kTestConditions) {
    RngStream s = derive_stream(42, {{"weather", static_cast<std::uint64_t>(c)}});
    const std::string_view name = to_string(c);
    for (int i = 0; i < 500; ++i) {
      const WeatherParams w = sample_weather(c, s);
      ASSERT_NO_THROW(w.validate());
      if (name[0] == 'D' && name.size() == 2) {
        ASSERT_GE(w.sun_altitude_deg, 15.0);
        ASSERT_LE(w.sun_altitude_deg, 90.0);
      }
      if (name[0] == 'N') {
        ASSERT_GE(w.sun_altitude_deg, -90.0);
        ASSERT_LE(w.sun_altitude_deg, -10.0);
      }
      if (name.size() == 2 && name[1] == 'C') {
        ASSERT_EQ(w.precipitation, 0.0);
        ASSERT_LE(w.fog_density, 0.05);
      }
      if (name.size() == 2 && name[1] == 'R') {
        ASSERT_GE(w.precipitation, 0.5);
      }
    }
  }
}

TEST(Weather, SamplingIsDeterministicAndFixedDraw) {
  RngStream a = derive_stream(3, {{"w", 0}});
  RngStream b = derive_stream(3, {{"w", 0}});
  EXPECT_EQ(sample_weather(ConditionCode::W, a), sample_weather(ConditionCode::W, b));
  // Every code consumes the same number of draws.
  RngStream c = derive_stream(3, {{"w", 1}});
  RngStream d = derive_stream(3, {{"w", 1}});
  sample_weather(ConditionCode::DC, c);
  sample_weather(ConditionCode::NR, d);
  EXPECT_EQ(c, d);
  RngStream e = derive_stream(3, {{"w", 2}});
  const RngStream before = e;
  EXPECT_EQ(sample_weather(ConditionCode::CLEAR_NOON, e), preset_weather("ClearNoon"));
  EXPECT_EQ(e, before);
}

TEST(Scene, GeometryIndependentOfWeather) {
  for (int town : kTowns) {
    const SceneSpec spec{town, 1000u + static_cast<std::uint64_t>(town)};
    const auto clear = render_scene(spec, preset_weather("ClearNoon"), 64, 64);
    for (const auto& p : weather_presets()) {
      const auto other = render_scene(spec, p.params, 64, 64);
      ASSERT_EQ(other.second, clear.second) << p.name;
    }
    EXPECT_NE(render_scene(spec, preset_weather("HardRainNoon"), 64, 64).first, clear.first);
  }
}

TEST(Scene, RoadCoversBottomCenterAndClassesInRange) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SceneSpec spec{kTowns[seed % kTowns.size()], seed};
    const auto [rgb, mask] = render_scene(spec, preset_weather("ClearNoon"), 48, 40);
    EXPECT_EQ(rgb.width, 48);
    EXPECT_EQ(mask.height, 40);
    EXPECT_EQ(mask.at(24, 39), static_cast<std::uint8_t>(SceneClass::Road));
    EXPECT_EQ(mask.at(0, 0), static_cast<std::uint8_t>(SceneClass::Sky));
    for (auto v : mask.data) ASSERT_LT(v, kDefaultNumClasses);
  }
}

TEST(Scene, DeterministicRender) {
  const SceneSpec spec{3, 7};
  const auto a = render_scene(spec, preset_weather("ClearNoon"), 64, 64);
  const auto b = render_scene(spec, preset_weather("ClearNoon"), 64, 64);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Scene, NightDarkerThanNoon) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SceneSpec spec{kTowns[seed % kTowns.size()], seed * 31};
    const double noon = mean_luminance(render_scene(spec, preset_weather("ClearNoon"), 64, 64).first);
    const double night = mean_luminance(render_scene(spec, preset_weather("ClearNight"), 64, 64).first);
    EXPECT_LT(night, noon);
  }
}

TEST(Scene, InvalidArguments) {
  EXPECT_THROW(render_scene({8, 1}, preset_weather("ClearNoon"), 64, 64), ConfigError);
  EXPECT_THROW(render_scene({1, 1}, preset_weather("ClearNoon"), 31, 64), ConfigError);
}

TEST(Dataset, PerTownCounts) {
  EXPECT_EQ(samples_per_town(DatasetKind::D1, 1.0), 150);
  EXPECT_EQ(samples_per_town(DatasetKind::NR, 1.0), 50);
  EXPECT_EQ(samples_per_town(DatasetKind::D1, 0.05), 8);   // round(7.5)
  EXPECT_EQ(samples_per_town(DatasetKind::DC, 0.05), 3);   // round(2.5)
  EXPECT_EQ(samples_per_town(DatasetKind::D2, 0.2), 30);
  EXPECT_EQ(samples_per_town(DatasetKind::W, 0.2), 10);
  EXPECT_THROW(samples_per_town(DatasetKind::DC, 0.005), ConfigError);
  EXPECT_THROW(samples_per_town(DatasetKind::DC, 0.0), ConfigError);
  for (DatasetKind k : kAllDatasets) EXPECT_EQ(parse_dataset_kind(to_string(k)), k);
}

TEST(Dataset, GeneratesValidManifests) {
  TempDir dir("gen");
  GenerateOptions opts;
  opts.scale = 0.05;
  opts.image_size = 32;
  const Manifest d1 = generate_dataset(DatasetKind::D1, dir.path(), 42, opts);
  EXPECT_EQ(d1.records.size(), 64u);
  for (const auto& r : d1.records) {
    EXPECT_EQ(r.weather, preset_weather("ClearNoon"));
    EXPECT_EQ(r.condition, ConditionCode::CLEAR_NOON);
  }
  const Manifest nr = generate_dataset(DatasetKind::NR, dir.path(), 42, opts);
  EXPECT_EQ(nr.records.size(), 24u);
  for (const auto& r : nr.records) {
    EXPECT_LT(r.weather.sun_altitude_deg, 0.0);
    EXPECT_GE(r.weather.precipitation, 0.5);
  }
  const Manifest back = read_manifest(dir / "NR/manifest.jsonl");
  EXPECT_EQ(back, nr);
  const MaskImage m = read_mask_png(back.directory / back.records[5].mask_path, 8);
  const auto expect = render_scene({back.records[5].town, back.records[5].scene_seed}, back.records[5].weather, 32, 32);
  EXPECT_EQ(m, expect.second);
  EXPECT_EQ(read_rgb_png(back.directory / back.records[5].rgb_path), expect.first);
}

TEST(Dataset, OutputIndependentOfJobs) {
  TempDir a("gen_a");
  TempDir b("gen_b");
  GenerateOptions opts;
  opts.scale = 0.05;
  opts.image_size = 32;
  const Manifest ma = generate_dataset(DatasetKind::W, a.path(), 9, opts);
  opts.jobs = 4;
  const Manifest mb = generate_dataset(DatasetKind::W, b.path(), 9, opts);
  EXPECT_EQ(ma, mb);
  for (const auto& r : ma.records) {
    std::ifstream fa(a.path() / "W" / r.rgb_path, std::ios::binary);
    std::ifstream fb(b.path() / "W" / r.rgb_path, std::ios::binary);
    ASSERT_EQ(std::string(std::istreambuf_iterator<char>(fa), {}), std::string(std::istreambuf_iterator<char>(fb), {}));
  }
}

TEST(Dataset, RejectsBadOptions) {
  TempDir dir("gen");
  GenerateOptions opts;
  opts.num_classes = 4;
  EXPECT_THROW(generate_dataset(DatasetKind::D1, dir.path(), 1, opts), ConfigError);
  EXPECT_FALSE(std::filesystem::exists(dir / "D1"));
}
