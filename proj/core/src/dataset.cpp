#include "wxaug/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <system_error>
#include <vector>

#include "wxaug/errors.hpp"
#include "wxaug/parallel.hpp"
#include "wxaug/png_io.hpp"
#include "wxaug/scene.hpp"

namespace wxaug {

namespace fs = std::filesystem;

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::D1: return "D1";
    case DatasetKind::D2: return "D2";
    case DatasetKind::DC: return "DC";
    case DatasetKind::DR: return "DR";
    case DatasetKind::DW: return "DW";
    case DatasetKind::NC: return "NC";
    case DatasetKind::NR: return "NR";
    case DatasetKind::NW: return "NW";
    case DatasetKind::W: return "W";
  }
  return "?";
}

DatasetKind parse_dataset_kind(std::string_view text) {
  for (auto kind : kAllDatasets) {
    if (to_string(kind) == text) return kind;
  }
  throw ConfigError("unknown dataset '" + std::string(text) + "'");
}

ConditionCode condition_of(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::D1: return ConditionCode::CLEAR_NOON;
    case DatasetKind::D2: return ConditionCode::W;
    case DatasetKind::DC: return ConditionCode::DC;
    case DatasetKind::DR: return ConditionCode::DR;
    case DatasetKind::DW: return ConditionCode::DW;
    case DatasetKind::NC: return ConditionCode::NC;
    case DatasetKind::NR: return ConditionCode::NR;
    case DatasetKind::NW: return ConditionCode::NW;
    case DatasetKind::W: return ConditionCode::W;
  }
  return ConditionCode::W;
}

bool is_training_set(DatasetKind kind) {
  return kind == DatasetKind::D1 || kind == DatasetKind::D2;
}

int samples_per_town(DatasetKind kind, double scale) {
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  const int base = is_training_set(kind) ? kTrainPerTown : kTestPerTown;
  const auto n = static_cast<int>(std::lround(base * scale));
  if (n < 1) throw ConfigError("scale too small: zero samples per town");
  return n;
}

Manifest generate_dataset(DatasetKind kind, const fs::path& out_dir, std::uint64_t global_seed,
                          const GenerateOptions& options) {
  if (options.image_size < 32) throw ConfigError("image_size must be >= 32");
  if (options.num_classes < kDefaultNumClasses || options.num_classes > 256) {
    throw ConfigError("the scene renderer emits 8 classes; num_classes must be in [8, 256]");
  }
  const int per_town = samples_per_town(kind, options.scale);
  const std::string name(to_string(kind));
  const fs::path root = out_dir / name;
  std::error_code ec;
  fs::create_directories(root / "rgb", ec);
  if (!ec) fs::create_directories(root / "mask", ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());

  const ConditionCode condition = condition_of(kind);
  const std::size_t total = kTowns.size() * static_cast<std::size_t>(per_town);
  std::vector<SampleRecord> records(total);

  parallel_for(total, options.jobs, [&](std::size_t g) {
    const std::size_t town_index = g / static_cast<std::size_t>(per_town);
    const std::size_t i = g % static_cast<std::size_t>(per_town);
    const int town = kTowns[town_index];
    RngStream stream = derive_stream(global_seed, {{"dataset", static_cast<std::uint64_t>(kind)},
                                                   {"town", static_cast<std::uint64_t>(town)},
                                                   {"sample", i}});
    SampleRecord r;
    r.town = town;
    r.condition = condition;
    r.scene_seed = stream.next_u64();
    r.weather = sample_weather(condition, stream);
    char file[32];
    std::snprintf(file, sizeof(file), "%06zu.png", g);
    r.rgb_path = std::string("rgb/") + file;
    r.mask_path = std::string("mask/") + file;
    auto [rgb, mask] = render_scene({town, r.scene_seed}, r.weather, options.image_size,
                                    options.image_size);
    write_rgb_png(rgb, root / r.rgb_path);
    write_mask_png(mask, root / r.mask_path);
    records[g] = std::move(r);
  });

  Manifest manifest;
  manifest.name = name;
  manifest.num_classes = options.num_classes;
  manifest.records = std::move(records);
  manifest.directory = root;
  write_manifest(manifest, root / "manifest.jsonl");
  return manifest;
}

}  // namespace wxaug
