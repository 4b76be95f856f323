#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "wxaug/image.hpp"
#include "wxaug/weather.hpp"

namespace wxaug {

inline constexpr std::array<int, 8> kTowns = {1, 2, 3, 4, 5, 6, 7, 10};

bool is_valid_town(int town);

struct SceneSpec {
  int town_style = 1;
  std::uint64_t scene_seed = 0;
};

/// Per-town layout and palette parameters.
struct TownStyle {
  int id;
  double road_half_width;  // bottom-row half width as a fraction of image width
  double sidewalk_frac;    // sidewalk width as a fraction of the road half width
  int max_buildings;       // <= 4
  int min_trees;
  int max_trees;
  std::array<double, 3> building;
  std::array<double, 3> vegetation;
  std::array<double, 3> ground;
};

/// Throws ConfigError for towns outside kTowns.
const TownStyle& town_style(int town);

/// Renders the paired RGB frame and label mask. Geometry (and therefore the
/// mask) depends only on `spec`; `weather` only changes RGB shading.
/// Throws ConfigError if w or h is below 32 or the town is unknown.
std::pair<ImageRGB, MaskImage> render_scene(const SceneSpec& spec, const WeatherParams& weather,
                                            int w, int h);

}  // namespace wxaug
