#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "wxaug/corpus.hpp"
#include "wxaug/weather.hpp"

namespace wxaug {

/// The two training sets (clear-only D1, random-weather D2) and the seven
/// condition test sets.
enum class DatasetKind { D1, D2, DC, DR, DW, NC, NR, NW, W };

inline constexpr std::array<DatasetKind, 9> kAllDatasets = {
    DatasetKind::D1, DatasetKind::D2, DatasetKind::DC, DatasetKind::DR, DatasetKind::DW,
    DatasetKind::NC, DatasetKind::NR, DatasetKind::NW, DatasetKind::W};

inline constexpr int kTrainPerTown = 150;
inline constexpr int kTestPerTown = 50;

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view text);
ConditionCode condition_of(DatasetKind kind);
bool is_training_set(DatasetKind kind);

/// Records per town: round(150 * scale) for D1/D2, round(50 * scale) for test
/// sets, half rounded away from zero. Throws ConfigError if that is zero.
int samples_per_town(DatasetKind kind, double scale);

struct GenerateOptions {
  double scale = 0.2;
  int image_size = 64;
  int num_classes = kDefaultNumClasses;
  int jobs = 1;
};

/// Renders one dataset into <out_dir>/<name>/{rgb,mask}/NNNNNN.png plus
/// <out_dir>/<name>/manifest.jsonl. Sample (town t, index i) draws its scene
/// seed and weather from derive_stream(global_seed, [("dataset", kind),
/// ("town", t), ("sample", i)]), so output is independent of `jobs`.
Manifest generate_dataset(DatasetKind kind, const std::filesystem::path& out_dir,
                          std::uint64_t global_seed, const GenerateOptions& options);

}  // namespace wxaug
