#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "wxaug/rng.hpp"

namespace wxaug {

/// Environment state that drives RGB shading. Geometry never depends on it.
struct WeatherParams {
  double sun_altitude_deg = 75.0;  // [-90, 90]; below zero is night
  double cloudiness = 0.0;         // [0, 1]
  double precipitation = 0.0;      // [0, 1]
  double fog_density = 0.0;        // [0, 1]
  double wetness = 0.0;            // [0, 1]

  bool is_night() const { return sun_altitude_deg < 0.0; }
  /// Throws ConfigError when any field is out of range.
  void validate() const;

  friend bool operator==(const WeatherParams&, const WeatherParams&) = default;
};

/// Day/night x clear/rain/random, fully random (W), and the fixed
/// ClearNoon preset used for the clear-weather training set.
enum class ConditionCode { DC, DR, DW, NC, NR, NW, W, CLEAR_NOON };

inline constexpr std::array<ConditionCode, 7> kTestConditions = {
    ConditionCode::DC, ConditionCode::DR, ConditionCode::DW, ConditionCode::NC,
    ConditionCode::NR, ConditionCode::NW, ConditionCode::W};

std::string_view to_string(ConditionCode code);
/// Throws ConfigError for an unknown code.
ConditionCode parse_condition(std::string_view text);

struct WeatherPreset {
  std::string_view name;
  WeatherParams params;
};

/// The documented preset table (CARLA-style naming).
const std::array<WeatherPreset, 16>& weather_presets();

/// Throws ConfigError for an unknown preset name.
WeatherParams preset_weather(std::string_view name);

/// Draws parameters uniformly within the condition's box. Draw order is
/// always altitude, cloudiness, precipitation, fog, wetness (five draws) so
/// the stream consumption is identical for every code; CLEAR_NOON returns the
/// preset without consuming the stream.
///
///   D*: altitude in [15, 90]     N*: altitude in [-90, -10]
///   *C: cloud [0, 0.3], precipitation 0, fog [0, 0.05], wetness 0
///   *R: cloud [0.5, 1], precipitation [0.5, 1], fog [0, 0.3], wetness [0.5, 1]
///   *W: all weather fields in [0, 1]
///   W:  altitude in [-90, 90], all weather fields in [0, 1]
WeatherParams sample_weather(ConditionCode condition, RngStream& stream);

}  // namespace wxaug
