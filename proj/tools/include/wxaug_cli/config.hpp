#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wxaug/augment.hpp"
#include "wxaug/dataset.hpp"
#include "wxaug/stats.hpp"
#include "wxaug/train.hpp"
#include "wxaug/unet.hpp"

namespace wxaug::cli {

struct ExperimentConfig {
  std::uint64_t seed = 42;
  double scale = 0.2;
  int image_size = 64;
  int num_classes = kDefaultNumClasses;
  int levels = 3;
  int base_channels = 8;
  int epochs = 50;     // train
  int cv_epochs = 20;  // cv
  double learning_rate = 1e-3;
  int batch_size = 8;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int ignore_class = -1;
  int folds = 2;
  TTestKind ttest = TTestKind::Pooled;
  int jobs = 1;
  std::filesystem::path out = "out";
  AugmentConfig augment;

  UNetConfig unet() const;
  TrainConfig train(int epoch_count) const;
  GenerateOptions generate() const;

  /// Every constraint of every downstream config; throws ConfigError.
  void validate() const;

  /// One `key = value` line per setting, in a fixed order; parses back to
  /// the same config.
  std::string to_text() const;
};

/// Sets one key from its text value. Throws ConfigError for unknown keys and
/// unparsable values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Errors name the offending line.
void apply_config_text(ExperimentConfig& config, std::string_view text, const std::string& origin);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

std::vector<std::string> config_keys();

}  // namespace wxaug::cli
