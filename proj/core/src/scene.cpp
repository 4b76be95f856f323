#include "wxaug/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "wxaug/corpus.hpp"
#include "wxaug/errors.hpp"
#include "wxaug/rng.hpp"

namespace wxaug {

namespace {

using Rgb = std::array<double, 3>;

constexpr std::array<TownStyle, 8> kStyles = {{
    {1, 0.36, 0.35, 4, 1, 3, {150, 120, 100}, {55, 115, 50}, {110, 100, 85}},
    {2, 0.32, 0.40, 4, 1, 3, {170, 160, 150}, {60, 125, 55}, {115, 105, 90}},
    {3, 0.40, 0.30, 4, 1, 2, {120, 130, 150}, {50, 105, 45}, {100, 100, 100}},
    {4, 0.45, 0.15, 2, 2, 5, {160, 150, 120}, {70, 130, 60}, {125, 115, 80}},
    {5, 0.38, 0.30, 4, 1, 3, {140, 110, 90}, {55, 110, 50}, {105, 95, 80}},
    {6, 0.42, 0.10, 1, 3, 6, {150, 90, 70}, {80, 140, 60}, {140, 125, 75}},
    {7, 0.30, 0.10, 2, 3, 6, {160, 70, 60}, {95, 145, 55}, {150, 135, 80}},
    {10, 0.37, 0.35, 4, 1, 3, {190, 180, 170}, {60, 120, 55}, {110, 105, 95}},
}};

constexpr Rgb kRoad{95, 95, 100};
constexpr Rgb kSidewalk{160, 155, 150};
constexpr Rgb kLane{235, 235, 220};
constexpr Rgb kSkyZenith{90, 140, 215};
constexpr Rgb kSkyHorizon{175, 200, 230};
constexpr Rgb kCloudGray{170, 170, 175};
constexpr Rgb kFogColor{190, 190, 195};
constexpr Rgb kRainColor{200, 200, 210};
constexpr std::array<Rgb, 6> kVehicleColors = {{
    {180, 30, 30}, {30, 60, 160}, {220, 220, 225}, {30, 30, 35}, {200, 170, 40}, {90, 95, 100},
}};

constexpr auto u8(SceneClass c) { return static_cast<std::uint8_t>(c); }

// Deterministic per-pixel texture in [-1, 1].
double texture(std::uint64_t seed, int x, int y) {
  std::uint64_t s = seed ^ (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL) ^
                    (static_cast<std::uint64_t>(y) * 0xC2B2AE3D27D4EB4FULL);
  const std::uint64_t v = splitmix64_next(s);
  return static_cast<double>(v >> 11) * 0x1p-53 * 2.0 - 1.0;
}

Rgb jitter_color(const Rgb& c, RngStream& rs, double amount) {
  const double k = rs.uniform(1.0 - amount, 1.0 + amount);
  return {c[0] * k, c[1] * k, c[2] * k};
}

struct RoadRow {
  double center;
  double half;
  double sidewalk;
};

struct Canvas {
  int w;
  int h;
  MaskImage mask;
  std::vector<Rgb> albedo;

  Canvas(int w_, int h_) : w(w_), h(h_), mask(w_, h_), albedo(static_cast<std::size_t>(w_) * h_) {}

  void set(int x, int y, SceneClass c, const Rgb& color) {
    mask.at(x, y) = u8(c);
    albedo[static_cast<std::size_t>(y) * w + x] = color;
  }
  SceneClass cls(int x, int y) const { return static_cast<SceneClass>(mask.at(x, y)); }
};

class Layout {
 public:
  Layout(const SceneSpec& spec, int w, int h)
      : style_(town_style(spec.town_style)),
        seed_(spec.scene_seed),
        rs_(derive_stream(spec.scene_seed, {{"layout", static_cast<std::uint64_t>(spec.town_style)}})),
        canvas_(w, h) {
    const double jitter = rs_.uniform(0.0, 1.0);
    horizon_ = static_cast<int>(std::floor(h * (0.45 + 0.1 * jitter) + 0.5));
    vanish_x_ = w * (0.5 + 0.2 * (rs_.uniform(0.0, 1.0) - 0.5));
    road_bottom_ = style_.road_half_width * w * rs_.uniform(0.9, 1.1);
    road_top_ = std::max(0.5, 0.02 * w);
  }

  Canvas build() {
    paint_background();
    paint_buildings();
    paint_trees();
    paint_lane_markings();
    paint_vehicles();
    return std::move(canvas_);
  }

  int horizon() const { return horizon_; }

 private:
  int w() const { return canvas_.w; }
  int h() const { return canvas_.h; }

  // Depth parameter of a ground row: near 0 at the horizon, 1 at the bottom.
  double depth(int y) const {
    return static_cast<double>(y - horizon_ + 1) / static_cast<double>(h() - horizon_);
  }

  RoadRow road_at(double t) const {
    const double half = road_top_ + t * (road_bottom_ - road_top_);
    return {vanish_x_ + t * (w() / 2.0 - vanish_x_), half, half * style_.sidewalk_frac};
  }

  void paint_background() {
    for (int y = 0; y < h(); ++y) {
      if (y < horizon_) {
        const double s = static_cast<double>(y) / std::max(1, horizon_);
        Rgb sky;
        for (int c = 0; c < 3; ++c) sky[c] = kSkyZenith[c] + s * (kSkyHorizon[c] - kSkyZenith[c]);
        for (int x = 0; x < w(); ++x) canvas_.set(x, y, SceneClass::Sky, sky);
        continue;
      }
      const RoadRow row = road_at(depth(y));
      for (int x = 0; x < w(); ++x) {
        const double dx = std::abs(x + 0.5 - row.center);
        const double n = texture(seed_, x, y);
        if (dx <= row.half) {
          canvas_.set(x, y, SceneClass::Road, {kRoad[0] + 6 * n, kRoad[1] + 6 * n, kRoad[2] + 6 * n});
        } else if (dx <= row.half + row.sidewalk) {
          canvas_.set(x, y, SceneClass::Sidewalk, {kSidewalk[0] + 5 * n, kSidewalk[1] + 5 * n, kSidewalk[2] + 5 * n});
        } else {
          const auto& g = style_.ground;
          canvas_.set(x, y, SceneClass::Unlabeled, {g[0] + 10 * n, g[1] + 10 * n, g[2] + 8 * n});
        }
      }
    }
  }

  void paint_buildings() {
    const auto count = rs_.uniform_int(0, style_.max_buildings);
    for (std::int64_t b = 0; b < count; ++b) {
      const bool left = rs_.bernoulli(0.5);
      const double bw = rs_.uniform(0.1, 0.25) * w();
      const double x0 = left ? rs_.uniform(0.0, std::max(0.0, 0.35 * w() - bw))
                             : rs_.uniform(0.65 * w(), std::max(0.65 * w(), w() - bw));
      const double bh = rs_.uniform(0.1, 0.4) * h();
      const int bottom = horizon_ + static_cast<int>(std::lround(0.04 * h()));
      const int top = static_cast<int>(std::lround(bottom - bh));
      const Rgb color = jitter_color(style_.building, rs_, 0.15);
      const int xa = static_cast<int>(std::floor(x0));
      const int xb = static_cast<int>(std::ceil(x0 + bw));
      const int window = std::max(2, w() / 32);
      for (int y = std::max(0, top); y <= std::min(h() - 1, bottom); ++y) {
        for (int x = std::max(0, xa); x < std::min(w(), xb); ++x) {
          const SceneClass c = canvas_.cls(x, y);
          if (c != SceneClass::Sky && c != SceneClass::Unlabeled && c != SceneClass::Building) continue;
          const bool lit = ((x - xa) / window) % 2 == 1 && ((y - top) / window) % 2 == 1;
          const double k = lit ? 0.55 : 1.0;
          canvas_.set(x, y, SceneClass::Building, {color[0] * k, color[1] * k, color[2] * k});
        }
      }
    }
  }

  void paint_trees() {
    const auto count = rs_.uniform_int(style_.min_trees, style_.max_trees);
    for (std::int64_t i = 0; i < count; ++i) {
      const bool left = rs_.bernoulli(0.5);
      const double t = rs_.uniform(0.05, 0.5);
      const double cy = horizon_ + t * (h() - horizon_);
      const RoadRow row = road_at(t);
      const double r = (0.03 + 0.05 * t) * w() * rs_.uniform(0.7, 1.3);
      const double gap = rs_.uniform(0.0, 0.1) * w();
      const double edge = row.half + row.sidewalk + r + gap;
      const double cx = left ? row.center - edge : row.center + edge;
      const Rgb color = jitter_color(style_.vegetation, rs_, 0.2);
      const double ry = 1.3 * r;
      for (int y = std::max(0, static_cast<int>(cy - ry)); y <= std::min(h() - 1, static_cast<int>(cy + ry)); ++y) {
        for (int x = std::max(0, static_cast<int>(cx - r)); x <= std::min(w() - 1, static_cast<int>(cx + r)); ++x) {
          const double nx = (x + 0.5 - cx) / r;
          const double ny = (y + 0.5 - cy) / ry;
          if (nx * nx + ny * ny > 1.0) continue;
          const SceneClass c = canvas_.cls(x, y);
          if (c != SceneClass::Sky && c != SceneClass::Unlabeled && c != SceneClass::Building) continue;
          const double n = 0.85 + 0.15 * texture(seed_ + 1, x, y);
          canvas_.set(x, y, SceneClass::Vegetation, {color[0] * n, color[1] * n, color[2] * n});
        }
      }
    }
  }

  void paint_lane_markings() {
    const double phase = rs_.uniform(0.0, 1.0);
    for (int y = horizon_; y < h(); ++y) {
      const double t = depth(y);
      if (t < 0.08) continue;
      if (std::fmod(1.5 / t + phase, 1.0) >= 0.5) continue;
      const RoadRow row = road_at(t);
      const double half_line = std::max(0.5, 0.03 * row.half);
      for (const double offset : {-0.5 * row.half, 0.5 * row.half}) {
        const double pos = row.center + offset;
        for (int x = std::max(0, static_cast<int>(pos - half_line - 1)); x <= std::min(w() - 1, static_cast<int>(pos + half_line + 1)); ++x) {
          if (std::abs(x + 0.5 - pos) > half_line) continue;
          if (canvas_.cls(x, y) != SceneClass::Road) continue;
          canvas_.set(x, y, SceneClass::LaneMarking, kLane);
        }
      }
    }
  }

  void paint_vehicles() {
    const auto count = rs_.uniform_int(0, 3);
    struct Car {
      double t;
      double lateral;
      Rgb color;
    };
    std::vector<Car> cars;
    for (std::int64_t i = 0; i < count; ++i) {
      Car car;
      car.t = rs_.uniform(0.15, 0.65);
      car.lateral = rs_.uniform(-0.6, 0.6);
      car.color = jitter_color(kVehicleColors[static_cast<std::size_t>(rs_.uniform_int(0, 5))], rs_, 0.1);
      cars.push_back(car);
    }
    std::stable_sort(cars.begin(), cars.end(), [](const Car& a, const Car& b) { return a.t < b.t; });
    for (const Car& car : cars) {
      const RoadRow row = road_at(car.t);
      const double yb = horizon_ + car.t * (h() - horizon_);
      const double cx = row.center + car.lateral * row.half;
      const double vw = 0.8 * row.half;
      const double vh = 0.7 * vw;
      const int ya = static_cast<int>(std::floor(yb - vh));
      const int yz = static_cast<int>(std::floor(yb));
      const int xa = static_cast<int>(std::floor(cx - vw / 2));
      const int xz = static_cast<int>(std::ceil(cx + vw / 2));
      for (int y = std::max(0, ya); y <= std::min(h() - 1, yz); ++y) {
        const bool glass = (y - ya) < (yz - ya) * 0.35;
        for (int x = std::max(0, xa); x < std::min(w(), xz); ++x) {
          const Rgb c = glass ? Rgb{40, 50, 60} : car.color;
          canvas_.set(x, y, SceneClass::Vehicle, c);
        }
      }
    }
  }

  const TownStyle& style_;
  std::uint64_t seed_;
  RngStream rs_;
  Canvas canvas_;
  int horizon_ = 0;
  double vanish_x_ = 0.0;
  double road_bottom_ = 0.0;
  double road_top_ = 0.0;
};

double illumination(const WeatherParams& wp) {
  const double alt = wp.sun_altitude_deg;
  double illum;
  if (alt >= 0.0) {
    illum = 0.55 + 0.45 * std::sin(alt * std::numbers::pi / 180.0);
  } else {
    illum = 0.15 + 0.1 * (1.0 - std::min(1.0, -alt / 90.0));
  }
  illum *= 1.0 - 0.3 * wp.cloudiness;
  illum *= 1.0 - 0.15 * wp.precipitation;
  return std::clamp(illum, 0.15, 1.0);
}

Rgb tint(const WeatherParams& wp) {
  const double alt = wp.sun_altitude_deg;
  if (alt < 0.0) return {0.65, 0.8, 1.15};
  if (alt < 25.0) {
    const double k = (25.0 - alt) / 25.0;
    return {1.0 + 0.15 * k, 1.0, 1.0 - 0.15 * k};
  }
  return {1.0, 1.0, 1.0};
}

void shade(const Canvas& canvas, int horizon, const WeatherParams& wp, const SceneSpec& spec,
           ImageRGB& out) {
  const double illum = illumination(wp);
  const Rgb color_tint = tint(wp);
  const int w = canvas.w;
  const int h = canvas.h;
  std::vector<Rgb> px(canvas.albedo);

  for (int y = 0; y < h; ++y) {
    const double dist = y < horizon ? 1.0 : 1.0 - static_cast<double>(y - horizon) / (h - horizon);
    const double fog_alpha = std::clamp(wp.fog_density * (0.25 + 0.75 * dist), 0.0, 1.0);
    for (int x = 0; x < w; ++x) {
      Rgb& c = px[static_cast<std::size_t>(y) * w + x];
      const SceneClass cls = canvas.cls(x, y);
      if (cls == SceneClass::Sky) {
        for (int k = 0; k < 3; ++k) c[k] += wp.cloudiness * (kCloudGray[k] - c[k]);
      }
      if (cls == SceneClass::Road || cls == SceneClass::Sidewalk || cls == SceneClass::LaneMarking) {
        const double wet = 1.0 - 0.35 * wp.wetness;
        for (auto& v : c) v *= wet;
      }
      const double gray = 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
      for (int k = 0; k < 3; ++k) {
        c[k] += 0.5 * wp.cloudiness * (gray - c[k]);
        c[k] *= illum * color_tint[k];
        c[k] += fog_alpha * (kFogColor[k] * illum - c[k]);
      }
    }
  }

  if (wp.precipitation > 0.0) {
    RngStream rain = derive_stream(spec.scene_seed, {{"rain", static_cast<std::uint64_t>(spec.town_style)}});
    const auto drops = static_cast<std::int64_t>(std::lround(wp.precipitation * w * h * 0.015));
    const int length = std::max(2, static_cast<int>(std::lround(h * 0.08)));
    const double light = std::max(illum, 0.3);
    for (std::int64_t d = 0; d < drops; ++d) {
      const auto x0 = rain.uniform_int(0, w - 1);
      const auto y0 = rain.uniform_int(0, h - 1);
      for (int k = 0; k < length; ++k) {
        const int x = static_cast<int>(x0) + static_cast<int>(std::floor(0.15 * k + 0.5));
        const int y = static_cast<int>(y0) + k;
        if (x >= w || y >= h) break;
        Rgb& c = px[static_cast<std::size_t>(y) * w + x];
        for (int ch = 0; ch < 3; ++ch) c[ch] += 0.35 * (kRainColor[ch] * light - c[ch]);
      }
    }
    double mean = 0.0;
    for (const auto& c : px) mean += (c[0] + c[1] + c[2]) / 3.0;
    mean /= static_cast<double>(px.size());
    const double flatten = 0.15 * wp.precipitation;
    for (auto& c : px) {
      for (auto& v : c) v += flatten * (mean - v);
    }
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb& c = px[static_cast<std::size_t>(y) * w + x];
      std::uint8_t* o = out.at(x, y);
      for (int k = 0; k < 3; ++k) o[k] = to_u8(c[k]);
    }
  }
}

}  // namespace

bool is_valid_town(int town) {
  return std::find(kTowns.begin(), kTowns.end(), town) != kTowns.end();
}

const TownStyle& town_style(int town) {
  for (const auto& s : kStyles) {
    if (s.id == town) return s;
  }
  throw ConfigError("unknown town " + std::to_string(town));
}

std::pair<ImageRGB, MaskImage> render_scene(const SceneSpec& spec, const WeatherParams& weather,
                                            int w, int h) {
  if (w < 32 || h < 32) throw ConfigError("render_scene: dimensions must be >= 32");
  weather.validate();
  Layout layout(spec, w, h);
  const int horizon = layout.horizon();
  Canvas canvas = layout.build();
  ImageRGB rgb(w, h);
  shade(canvas, horizon, weather, spec, rgb);
  return {std::move(rgb), std::move(canvas.mask)};
}

}  // namespace wxaug
