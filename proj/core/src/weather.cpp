#include "wxaug/weather.hpp"

#include "wxaug/errors.hpp"

namespace wxaug {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

struct Box {
  double lo;
  double hi;
};

struct ConditionBox {
  Box altitude;
  Box cloud;
  Box precip;
  Box fog;
  Box wet;
};

constexpr Box kDay{15.0, 90.0};
constexpr Box kNight{-90.0, -10.0};
constexpr Box kFree{0.0, 1.0};

constexpr ConditionBox kClear{{}, {0.0, 0.3}, {0.0, 0.0}, {0.0, 0.05}, {0.0, 0.0}};
constexpr ConditionBox kRain{{}, {0.5, 1.0}, {0.5, 1.0}, {0.0, 0.3}, {0.5, 1.0}};
constexpr ConditionBox kRandom{{}, kFree, kFree, kFree, kFree};

ConditionBox box_for(ConditionCode code) {
  ConditionBox box{};
  switch (code) {
    case ConditionCode::DC: box = kClear; box.altitude = kDay; break;
    case ConditionCode::DR: box = kRain; box.altitude = kDay; break;
    case ConditionCode::DW: box = kRandom; box.altitude = kDay; break;
    case ConditionCode::NC: box = kClear; box.altitude = kNight; break;
    case ConditionCode::NR: box = kRain; box.altitude = kNight; break;
    case ConditionCode::NW: box = kRandom; box.altitude = kNight; break;
    case ConditionCode::W: box = kRandom; box.altitude = {-90.0, 90.0}; break;
    case ConditionCode::CLEAR_NOON: break;
  }
  return box;
}

// altitude, cloudiness, precipitation, fog, wetness
constexpr std::array<WeatherPreset, 16> kPresets = {{
    {"ClearNoon", {75.0, 0.05, 0.0, 0.0, 0.0}},
    {"CloudyNoon", {75.0, 0.6, 0.0, 0.03, 0.0}},
    {"WetNoon", {75.0, 0.05, 0.0, 0.03, 0.5}},
    {"WetCloudyNoon", {75.0, 0.6, 0.0, 0.03, 0.5}},
    {"MidRainyNoon", {75.0, 0.6, 0.6, 0.05, 0.6}},
    {"HardRainNoon", {75.0, 1.0, 1.0, 0.07, 1.0}},
    {"SoftRainNoon", {75.0, 0.2, 0.3, 0.03, 0.5}},
    {"ClearSunset", {15.0, 0.05, 0.0, 0.0, 0.0}},
    {"CloudySunset", {15.0, 0.6, 0.0, 0.03, 0.0}},
    {"WetSunset", {15.0, 0.05, 0.0, 0.03, 0.5}},
    {"WetCloudySunset", {15.0, 0.6, 0.0, 0.03, 0.5}},
    {"MidRainSunset", {15.0, 0.6, 0.6, 0.05, 0.6}},
    {"HardRainSunset", {15.0, 1.0, 1.0, 0.07, 1.0}},
    {"SoftRainSunset", {15.0, 0.2, 0.3, 0.03, 0.5}},
    {"ClearNight", {-80.0, 0.05, 0.0, 0.0, 0.0}},
    {"HardRainNight", {-80.0, 1.0, 1.0, 0.1, 1.0}},
}};

}  // namespace

void WeatherParams::validate() const {
  if (!(sun_altitude_deg >= -90.0 && sun_altitude_deg <= 90.0) || !in_unit(cloudiness) ||
      !in_unit(precipitation) || !in_unit(fog_density) || !in_unit(wetness)) {
    throw ConfigError("weather parameters out of range");
  }
}

std::string_view to_string(ConditionCode code) {
  switch (code) {
    case ConditionCode::DC: return "DC";
    case ConditionCode::DR: return "DR";
    case ConditionCode::DW: return "DW";
    case ConditionCode::NC: return "NC";
    case ConditionCode::NR: return "NR";
    case ConditionCode::NW: return "NW";
    case ConditionCode::W: return "W";
    case ConditionCode::CLEAR_NOON: return "CLEAR_NOON";
  }
  return "?";
}

ConditionCode parse_condition(std::string_view text) {
  for (auto code : {ConditionCode::DC, ConditionCode::DR, ConditionCode::DW,
                    ConditionCode::NC, ConditionCode::NR, ConditionCode::NW,
                    ConditionCode::W, ConditionCode::CLEAR_NOON}) {
    if (to_string(code) == text) return code;
  }
  throw ConfigError("unknown condition code '" + std::string(text) + "'");
}

const std::array<WeatherPreset, 16>& weather_presets() { return kPresets; }

WeatherParams preset_weather(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) return p.params;
  }
  throw ConfigError("unknown weather preset '" + std::string(name) + "'");
}

WeatherParams sample_weather(ConditionCode condition, RngStream& stream) {
  if (condition == ConditionCode::CLEAR_NOON) return preset_weather("ClearNoon");
  const ConditionBox box = box_for(condition);
  WeatherParams w;
  w.sun_altitude_deg = stream.uniform(box.altitude.lo, box.altitude.hi);
  w.cloudiness = stream.uniform(box.cloud.lo, box.cloud.hi);
  w.precipitation = stream.uniform(box.precip.lo, box.precip.hi);
  w.fog_density = stream.uniform(box.fog.lo, box.fog.hi);
  w.wetness = stream.uniform(box.wet.lo, box.wet.hi);
  return w;
}

}  // namespace wxaug
