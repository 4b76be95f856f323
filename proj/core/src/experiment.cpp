#include "wxaug/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "wxaug/dataset.hpp"
#include "wxaug/errors.hpp"
#include "wxaug/parallel.hpp"

namespace wxaug {

namespace fs = std::filesystem;

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Clear: return "clear";
    case Regime::Augmented: return "augmented";
    case Regime::Weather: return "weather";
  }
  return "?";
}

Regime parse_regime(std::string_view text) {
  for (Regime r : kRegimes) {
    if (to_string(r) == text) return r;
  }
  throw ConfigError("unknown regime '" + std::string(text) + "' (expected clear, augmented or weather)");
}

namespace {

struct LoadedSet {
  std::string name;
  std::vector<Sample> samples;
};

LoadedSet load_set(const fs::path& dir, std::string_view name, const UNetConfig& unet) {
  const fs::path path = dir / name / "manifest.jsonl";
  if (!fs::exists(path)) throw IoError("missing dataset " + path.string() + " (run gen first)");
  const Manifest m = read_manifest(path);
  if (m.records.empty()) throw DataError("dataset " + std::string(name) + " is empty");
  if (m.num_classes > unet.num_classes) {
    throw DataError("dataset " + std::string(name) + " has more classes than the model");
  }
  return {std::string(name), load_samples(m, unet.input_size)};
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

CvOutput run_cv_experiment(const fs::path& datasets_dir, const CvConfig& config, std::uint64_t seed,
                           const std::function<void(const std::string&)>& log) {
  config.unet.validate();
  config.train.validate();
  config.augment.validate();
  if (config.folds < 2) throw ConfigError("cv: folds must be >= 2 for standard deviations");

  const LoadedSet d1 = load_set(datasets_dir, "D1", config.unet);
  const LoadedSet d2 = load_set(datasets_dir, "D2", config.unet);
  std::vector<LoadedSet> tests;
  for (ConditionCode c : kTestConditions) tests.push_back(load_set(datasets_dir, to_string(c), config.unet));

  const auto k = static_cast<std::size_t>(config.folds);
  const std::vector<FoldSpec> folds_d1 = make_folds(d1.samples.size(), k);
  const std::vector<FoldSpec> folds_d2 = make_folds(d2.samples.size(), k);

  CvOutput out;
  for (std::size_t r = 0; r < kRegimes.size(); ++r) {
    out.results[r].regime = kRegimes[r];
    out.results[r].loss.resize(k);
    out.results[r].accuracy.resize(k);
  }
  out.histories.resize(kRegimes.size() * k);
  std::vector<std::vector<EvalRow>> rows(kRegimes.size() * k);
  std::mutex log_mutex;

  parallel_for(kRegimes.size() * k, config.jobs, [&](std::size_t job) {
    const std::size_t r = job / k;
    const std::size_t fold = job % k;
    const Regime regime = kRegimes[r];
    const LoadedSet& train_set = regime == Regime::Weather ? d2 : d1;
    const FoldSpec& spec = regime == Regime::Weather ? folds_d2[fold] : folds_d1[fold];
    const AugmentConfig* augment = regime == Regime::Augmented ? &config.augment : nullptr;
    const std::uint64_t fold_seed = derive_seed(seed, {{"cv_fold", fold}});
    const std::string model = std::string(to_string(regime)) + "_fold" + std::to_string(fold);

    TrainResult trained = train(train_set.samples, spec.train_indices, spec.test_indices, config.train,
                                config.unet, augment, fold_seed);
    for (std::size_t t = 0; t < tests.size(); ++t) {
      const EvalResult e = evaluate(trained.weights, tests[t].name, tests[t].samples, config.train.ignore_class);
      out.results[r].loss[fold][t] = e.mean_loss;
      out.results[r].accuracy[fold][t] = e.pixel_accuracy;
      rows[job].push_back({model, tests[t].name, e.mean_loss, e.pixel_accuracy});
    }
    out.histories[job] = std::move(trained.history);
    if (log) {
      std::lock_guard lock(log_mutex);
      const auto& last = out.histories[job].back();
      log(model + ": final train_loss " + fmt("%.4f", last.train_loss) + ", NR loss " +
          fmt("%.4f", out.results[r].loss[fold][4]));
    }
  });

  for (auto& v : rows) out.eval_rows.insert(out.eval_rows.end(), v.begin(), v.end());
  return out;
}

FoldReport build_report(const std::array<std::array<SampleSummary, kNumTestSets>, 3>& s, TTestKind kind) {
  FoldReport rep;
  for (std::size_t t = 0; t < kNumTestSets; ++t) {
    for (std::size_t r = 0; r < 3; ++r) {
      rep.values[2 * r][t] = s[r][t].mean;
      rep.values[2 * r + 1][t] = s[r][t].std;
    }
    rep.values[6][t] = t_test_b_lower(s[0][t], s[1][t], kind).p_value;
    rep.values[7][t] = t_test_b_lower(s[1][t], s[2][t], kind).p_value;
  }
  return rep;
}

FoldReport build_report(const std::array<FoldResults, 3>& results, TTestKind kind) {
  const std::size_t k = results[0].loss.size();
  if (k < 2) throw DataError("report: need at least two folds per regime");
  std::array<std::array<SampleSummary, kNumTestSets>, 3> s{};
  for (std::size_t r = 0; r < 3; ++r) {
    if (results[r].loss.size() != k) throw DataError("report: regimes have different fold counts");
    for (std::size_t t = 0; t < kNumTestSets; ++t) {
      std::vector<double> column;
      for (const auto& row : results[r].loss) {
        if (!std::isfinite(row[t])) throw DataError("report: non-finite loss entry");
        column.push_back(row[t]);
      }
      s[r][t] = summarize(column);
    }
  }
  return build_report(s, kind);
}

void write_report_csv(const FoldReport& report, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "stat";
  for (ConditionCode c : kTestConditions) out << ',' << to_string(c);
  out << '\n';
  for (std::size_t row = 0; row < FoldReport::kRowNames.size(); ++row) {
    out << FoldReport::kRowNames[row];
    for (double v : report.values[row]) out << ',' << fmt("%.17g", v);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

FoldReport read_report_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "stat,DC,DR,DW,NC,NR,NW,W") {
    throw DataError(path.string() + ": unexpected header");
  }
  FoldReport rep;
  for (std::size_t row = 0; row < FoldReport::kRowNames.size(); ++row) {
    if (!std::getline(in, line)) throw DataError(path.string() + ": missing rows");
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell != FoldReport::kRowNames[row]) {
      throw DataError(path.string() + ": expected row " + std::string(FoldReport::kRowNames[row]));
    }
    for (std::size_t t = 0; t < kNumTestSets; ++t) {
      if (!std::getline(ss, cell, ',')) throw DataError(path.string() + ": short row " + std::to_string(row + 2));
      try {
        rep.values[row][t] = std::stod(cell);
      } catch (const std::exception&) {
        throw DataError(path.string() + ": bad number '" + cell + "'");
      }
    }
  }
  return rep;
}

std::string render_report(const FoldReport& report) {
  static constexpr std::array<std::string_view, 8> kLabels = {
      "Clear Mean", "Clear Stdev", "Augmented Mean", "Augmented Stdev", "Weather Mean", "Weather Stdev",
      "Augmented lower loss than clear, p-value", "Weather lower loss than augmented, p-value"};
  std::size_t label_width = 0;
  for (auto l : kLabels) label_width = std::max(label_width, l.size());
  std::ostringstream out;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  out << std::string(label_width, ' ');
  for (ConditionCode c : kTestConditions) out << "  " << pad(std::string(to_string(c)), 8);
  out << '\n';
  for (std::size_t row = 0; row < kLabels.size(); ++row) {
    out << kLabels[row] << std::string(label_width - kLabels[row].size(), ' ');
    for (double v : report.values[row]) {
      std::string cell;
      if (row >= 6) {
        cell = v < 1e-4 ? "<0.0001" : fmt("%.5f", v);
      } else {
        cell = fmt("%.4f", v);
      }
      out << "  " << pad(cell, 8);
    }
    out << '\n';
  }
  out << "\nOne-tailed pooled two-sample t-tests. Fold models share training data, so the\n"
         "per-fold losses are not fully independent and p-values are optimistic.\n";
  return out.str();
}

void write_eval_csv(const std::vector<EvalRow>& rows, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "model,dataset,loss,accuracy\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.dataset << ',' << fmt("%.17g", r.loss) << ',' << fmt("%.17g", r.accuracy) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace wxaug
