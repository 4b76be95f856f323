#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "wxaug/image.hpp"
#include "wxaug/weather.hpp"

namespace wxaug {

/// Default label set; `num_classes` stays configurable everywhere.
enum class SceneClass : std::uint8_t {
  Unlabeled = 0,
  Road = 1,
  Sidewalk = 2,
  Building = 3,
  Vehicle = 4,
  Vegetation = 5,
  LaneMarking = 6,
  Sky = 7,
};
inline constexpr int kDefaultNumClasses = 8;

struct SampleRecord {
  std::string rgb_path;   // relative to the manifest's directory
  std::string mask_path;  // relative to the manifest's directory
  int town = 1;
  ConditionCode condition = ConditionCode::CLEAR_NOON;
  std::uint64_t scene_seed = 0;
  WeatherParams weather;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct Manifest {
  std::string name;
  int num_classes = kDefaultNumClasses;
  std::vector<SampleRecord> records;  // generation order
  std::filesystem::path directory;    // set by read_manifest, not serialized

  bool operator==(const Manifest& other) const {
    return name == other.name && num_classes == other.num_classes &&
           records == other.records;
  }
};

/// JSON Lines: a header object {"name", "num_classes"} then one record per
/// line. Throws IoError if the file cannot be written.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Parse errors are DataErrors that name the 1-based line number.
Manifest read_manifest(const std::filesystem::path& path);

struct FoldSpec {
  int fold_index = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Contiguous-block k-fold split: fold i tests [i*n/k, (i+1)*n/k). Throws
/// ConfigError when k < 1, k > n, or k does not divide n.
std::vector<FoldSpec> make_folds(std::size_t n, std::size_t k);

/// Bilinear RGB (half-pixel centers, clamp-to-edge) and nearest-neighbor
/// mask resize to (w, h). Identical dimensions return exact copies.
std::pair<ImageRGB, MaskImage> resize_pair(const ImageRGB& img, const MaskImage& mask,
                                           int w, int h);

ImageRGB resize_bilinear(const ImageRGB& img, int w, int h);
MaskImage resize_nearest(const MaskImage& mask, int w, int h);

/// A decoded sample ready for training or evaluation.
struct Sample {
  ImageRGB rgb;
  MaskImage mask;
};

/// Loads every record of the manifest resized to size x size, validating
/// mask values against the manifest's num_classes.
std::vector<Sample> load_samples(const Manifest& manifest, int size);

}  // namespace wxaug
