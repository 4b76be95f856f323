#include "wxaug_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "wxaug/checkpoint.hpp"
#include "wxaug/dataset.hpp"
#include "wxaug/errors.hpp"
#include "wxaug/evaluate.hpp"
#include "wxaug/experiment.hpp"
#include "wxaug/png_io.hpp"
#include "wxaug/scene.hpp"
#include "wxaug/train.hpp"
#include "wxaug_cli/config.hpp"

namespace wxaug::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kTileGap = 4;

fs::path datasets_dir(const ExperimentConfig& c) { return c.out / "datasets"; }

fs::path manifest_path(const ExperimentConfig& c, std::string_view name) {
  return datasets_dir(c) / name / "manifest.jsonl";
}

void echo_config(const ExperimentConfig& c) {
  fs::create_directories(c.out);
  std::ofstream f(c.out / "config.txt", std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + (c.out / "config.txt").string());
  f << c.to_text();
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string full(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void cmd_gen(const ExperimentConfig& c, std::ostream& out) {
  const GenerateOptions opts = c.generate();
  for (DatasetKind kind : kAllDatasets) {
    const Manifest m = generate_dataset(kind, datasets_dir(c), c.seed, opts);
    out << to_string(kind) << ": " << m.records.size() << " records -> "
        << manifest_path(c, to_string(kind)).string() << '\n';
  }
}

/// Original, each transform alone, then the full pipeline with every gate
/// open, left to right on a white strip.
ImageRGB contact_sheet(const ImageRGB& original, const AugmentConfig& cfg, std::uint64_t seed) {
  std::vector<ImageRGB> tiles = {original};
  for (std::size_t i = 0; i < kPipelineOrder.size(); ++i) {
    RngStream s = derive_stream(seed, {{"preview", i}});
    tiles.push_back(apply_transform(kPipelineOrder[i], original, s, cfg));
  }
  AugmentConfig all_on = cfg;
  all_on.gate_probability = 1.0;
  RngStream s = derive_stream(seed, {{"preview", kPipelineOrder.size()}});
  tiles.push_back(augment_image(original, s, all_on));

  const int w = original.width;
  const int h = original.height;
  const int n = static_cast<int>(tiles.size());
  ImageRGB sheet(n * w + (n + 1) * kTileGap, h + 2 * kTileGap, 255);
  for (int t = 0; t < n; ++t) {
    const int x0 = kTileGap + t * (w + kTileGap);
    for (int y = 0; y < h; ++y) {
      std::copy_n(tiles[t].at(0, y), static_cast<std::size_t>(w) * 3, sheet.at(x0, kTileGap + y));
    }
  }
  return sheet;
}

void cmd_preview(const ExperimentConfig& c, const std::optional<std::string>& input, std::ostream& out) {
  ImageRGB original;
  if (input) {
    original = read_rgb_png(*input);
  } else {
    const int size = std::max(128, c.image_size);
    const SceneSpec spec{kTowns[0], derive_seed(c.seed, {{"preview_scene", 0}})};
    original = render_scene(spec, preset_weather("ClearNoon"), size, size).first;
  }
  const ImageRGB sheet = contact_sheet(original, c.augment, c.seed);
  const fs::path path = c.out / "preview.png";
  write_rgb_png(sheet, path);
  out << "tiles: original, rain, sun_flare, fog, rgb_shift, gamma, full pipeline\n"
      << "wrote " << path.string() << '\n';
}

std::vector<Sample> load_named(const ExperimentConfig& c, std::string_view name, int size) {
  const fs::path path = manifest_path(c, name);
  if (!fs::exists(path)) throw IoError("missing " + path.string() + " (run gen first)");
  const Manifest m = read_manifest(path);
  if (m.records.empty()) throw DataError(path.string() + " has no records");
  return load_samples(m, size);
}

void cmd_train(const ExperimentConfig& c, Regime regime, std::ostream& out) {
  const std::vector<Sample> samples =
      load_named(c, regime == Regime::Weather ? "D2" : "D1", c.image_size);
  // 1000 train / 200 validation out of 1200, scaled to the dataset size.
  const std::size_t n = samples.size();
  const auto train_count = static_cast<std::size_t>(std::lround(static_cast<double>(n) * 1000.0 / 1200.0));
  const TrainValSplit split = select_train_val(n, train_count, n - train_count, c.seed);
  const AugmentConfig* augment = regime == Regime::Augmented ? &c.augment : nullptr;

  const std::uint64_t seed = derive_seed(c.seed, {{"train_model", 0}});
  const TrainResult r = train(samples, split.train, split.val, c.train(c.epochs), c.unet(), augment, seed,
                              [&](const HistoryRow& h) {
                                out << "epoch " << h.epoch << " train_loss " << fixed(h.train_loss, 4)
                                    << " val_loss " << fixed(h.val_loss, 4) << " train_acc "
                                    << fixed(h.train_acc, 4) << " val_acc " << fixed(h.val_acc, 4) << '\n';
                              });
  const fs::path dir = c.out / "models";
  fs::create_directories(dir);
  const std::string stem(to_string(regime));
  save_checkpoint(r.weights, dir / (stem + ".wlab"));
  write_history_csv(r.history, dir / (stem + "_history.csv"));
  out << "wrote " << (dir / (stem + ".wlab")).string() << " and " << (dir / (stem + "_history.csv")).string()
      << '\n';
}

void cmd_eval(const ExperimentConfig& c, const fs::path& model, std::vector<std::string> names,
              std::ostream& out) {
  if (names.empty()) {
    for (ConditionCode cc : kTestConditions) names.emplace_back(to_string(cc));
  }
  for (const auto& name : names) parse_dataset_kind(name);
  if (!fs::exists(model)) throw IoError("missing model " + model.string());
  const UNetWeights weights = load_checkpoint(model);

  std::vector<EvalRow> rows;
  for (const auto& name : names) {
    const fs::path path = manifest_path(c, name);
    if (!fs::exists(path)) throw IoError("missing " + path.string() + " (run gen first)");
    const EvalResult e = evaluate(weights, read_manifest(path), c.ignore_class);
    rows.push_back({model.stem().string(), name, e.mean_loss, e.pixel_accuracy});
  }
  out << "model,dataset,loss,accuracy\n";
  for (const auto& r : rows) out << r.model << ',' << r.dataset << ',' << full(r.loss) << ',' << full(r.accuracy) << '\n';
  const fs::path dir = c.out / "eval";
  fs::create_directories(dir);
  write_eval_csv(rows, dir / (model.stem().string() + ".csv"));
}

void cmd_cv(const ExperimentConfig& c, std::ostream& out) {
  CvConfig cv;
  cv.unet = c.unet();
  cv.train = c.train(c.cv_epochs);
  cv.augment = c.augment;
  cv.folds = c.folds;
  cv.jobs = c.jobs;
  const CvOutput result = run_cv_experiment(datasets_dir(c), cv, c.seed, [&](const std::string& line) {
    out << line << '\n' << std::flush;
  });
  const FoldReport report = build_report(result.results, c.ttest);

  const fs::path dir = c.out / "cv";
  fs::create_directories(dir / "history");
  write_report_csv(report, dir / "report.csv");
  write_eval_csv(result.eval_rows, dir / "eval.csv");
  for (std::size_t job = 0; job < result.histories.size(); ++job) {
    const std::size_t k = static_cast<std::size_t>(c.folds);
    const std::string model =
        std::string(to_string(kRegimes[job / k])) + "_fold" + std::to_string(job % k);
    write_history_csv(result.histories[job], dir / "history" / (model + ".csv"));
  }
  const std::string text = render_report(report);
  std::ofstream(dir / "report.txt", std::ios::binary | std::ios::trunc) << text;
  out << text << "wrote " << (dir / "report.csv").string() << '\n';
}

void cmd_report(const fs::path& path, std::ostream& out) { out << render_report(read_report_csv(path)); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weather augmentation segmentation experiments", "wxaug"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<double> scale;
  std::optional<int> jobs;
  std::optional<std::string> out_dir;
  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  app.add_option("--seed", seed, "Global seed (default 42)");
  app.add_option("--config", config_path, "Flat key = value config file");
  app.add_option("--out", out_dir, "Output directory (default out)");
  app.add_option("--scale", scale, "Dataset scaling factor (default 0.2)");
  app.add_option("--jobs", jobs, "Worker threads (default 1)");
  app.add_option("--set", sets, "Override one config key: --set key=value");

  auto* gen = app.add_subcommand("gen", "Render the training and test datasets");
  auto* preview = app.add_subcommand("preview", "Write the augmentation contact sheet preview.png");
  std::optional<std::string> preview_input;
  preview->add_option("--input", preview_input, "RGB PNG to augment instead of a rendered scene");
  auto* train_cmd = app.add_subcommand("train", "Train one model and write checkpoint + history");
  std::string regime_text;
  train_cmd->add_option("--regime", regime_text, "clear | augmented | weather")
      ->required()
      ->check(CLI::IsMember({"clear", "augmented", "weather"}));
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on test datasets");
  std::string model_path;
  std::vector<std::string> eval_sets;
  eval_cmd->add_option("--model", model_path, "Checkpoint path")->required();
  eval_cmd->add_option("--dataset", eval_sets, "Datasets to evaluate (default: the seven test sets)");
  auto* cv_cmd = app.add_subcommand("cv", "Cross-validated three-regime experiment");
  auto* report_cmd = app.add_subcommand("report", "Print a report.csv as an aligned table");
  std::optional<std::string> report_path;
  report_cmd->add_option("path", report_path, "report.csv (default <out>/cv/report.csv)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (!args.empty() && !args[0].starts_with('-') && app.get_subcommands().empty()) {
      err << "error: unknown subcommand '" << args[0] << "'\n\n" << app.help();
      return kUsage;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    ExperimentConfig cfg;
    if (config_path) apply_config_file(cfg, *config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    if (scale) cfg.scale = *scale;
    if (jobs) cfg.jobs = *jobs;
    if (out_dir) cfg.out = *out_dir;
    cfg.validate();

    if (report_cmd->parsed()) {
      cmd_report(report_path ? fs::path(*report_path) : cfg.out / "cv" / "report.csv", out);
      return kOk;
    }
    echo_config(cfg);
    if (gen->parsed()) {
      cmd_gen(cfg, out);
    } else if (preview->parsed()) {
      cmd_preview(cfg, preview_input, out);
    } else if (train_cmd->parsed()) {
      cmd_train(cfg, parse_regime(regime_text), out);
    } else if (eval_cmd->parsed()) {
      cmd_eval(cfg, model_path, eval_sets, out);
    } else if (cv_cmd->parsed()) {
      cmd_cv(cfg, out);
    }
    return kOk;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace wxaug::cli
