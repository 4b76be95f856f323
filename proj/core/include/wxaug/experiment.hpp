#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wxaug/augment.hpp"
#include "wxaug/evaluate.hpp"
#include "wxaug/stats.hpp"
#include "wxaug/train.hpp"
#include "wxaug/unet.hpp"

namespace wxaug {

/// clear = D1 without augmentation, augmented = D1 through the pipeline,
/// weather = D2 without augmentation.
enum class Regime { Clear, Augmented, Weather };
inline constexpr std::array<Regime, 3> kRegimes = {Regime::Clear, Regime::Augmented, Regime::Weather};
inline constexpr std::size_t kNumTestSets = 7;

std::string_view to_string(Regime r);
Regime parse_regime(std::string_view text);

/// Per-fold, per-test-set losses (and accuracies) of one regime; columns in
/// kTestConditions order DC, DR, DW, NC, NR, NW, W.
struct FoldResults {
  Regime regime = Regime::Clear;
  std::vector<std::array<double, kNumTestSets>> loss;
  std::vector<std::array<double, kNumTestSets>> accuracy;

  friend bool operator==(const FoldResults&, const FoldResults&) = default;
};

struct EvalRow {
  std::string model;
  std::string dataset;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct CvConfig {
  UNetConfig unet;
  TrainConfig train;  // epochs is the per-fold epoch count
  AugmentConfig augment;
  int folds = 2;
  int jobs = 1;
};

struct CvOutput {
  std::array<FoldResults, 3> results;
  std::vector<EvalRow> eval_rows;                 // one per (model, test set)
  std::vector<std::vector<HistoryRow>> histories;  // regime-major, fold-minor
};

/// Trains `folds` models per regime: fold i trains on every record outside
/// its contiguous block and validates on that block. All regimes share the
/// fold's seed derive_seed(seed, [("cv_fold", i)]), so initial weights and
/// batch order match across regimes. Each model is evaluated on all seven
/// test sets. Results are independent of `jobs`.
CvOutput run_cv_experiment(const std::filesystem::path& datasets_dir, const CvConfig& config,
                           std::uint64_t seed,
                           const std::function<void(const std::string&)>& log = {});

/// Table-3 shaped summary: 8 statistic rows x 7 test-set columns.
struct FoldReport {
  static constexpr std::array<std::string_view, 8> kRowNames = {
      "clear_mean", "clear_std", "aug_mean", "aug_std",
      "weather_mean", "weather_std", "p_aug_lt_clear", "p_weather_lt_aug"};
  std::array<std::array<double, kNumTestSets>, 8> values{};
};

/// Throws DataError unless all three regimes have the same fold count k >= 2
/// and only finite entries.
FoldReport build_report(const std::array<FoldResults, 3>& results, TTestKind kind = TTestKind::Pooled);

/// Same report from per-regime summary statistics (e.g. published tables).
FoldReport build_report(const std::array<std::array<SampleSummary, kNumTestSets>, 3>& summaries,
                        TTestKind kind = TTestKind::Pooled);

/// `stat,DC,DR,DW,NC,NR,NW,W` with full-precision (%.17g) values.
void write_report_csv(const FoldReport& report, const std::filesystem::path& path);
/// Throws IoError for a missing file and DataError for a malformed one.
FoldReport read_report_csv(const std::filesystem::path& path);

/// Aligned text table: 4-decimal losses, 5-decimal p-values, "<0.0001" below
/// 1e-4, plus a footer noting that fold models share training data.
std::string render_report(const FoldReport& report);

/// `model,dataset,loss,accuracy`.
void write_eval_csv(const std::vector<EvalRow>& rows, const std::filesystem::path& path);

}  // namespace wxaug
