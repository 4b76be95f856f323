#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "wxaug/corpus.hpp"
#include "wxaug/errors.hpp"
#include "wxaug_cli/cli.hpp"
#include "wxaug_cli/config.hpp"

using namespace wxaug;
using namespace wxaug::cli;
using wxaug::test::TempDir;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Small, fast settings for end-to-end CLI runs.
std::vector<std::string> small(const TempDir& dir, std::vector<std::string> args) {
  for (const char* s : {"--out", "", "--scale", "0.05", "--set", "image_size=32", "--set", "levels=2", "--set",
                        "base_channels=4", "--set", "epochs=1", "--set", "cv_epochs=1"}) {
    args.emplace_back(*s ? s : dir.path().string());
  }
  return args;
}

}  // namespace

TEST(Config, DefaultsMatchDeskSettings) {
  const ExperimentConfig c;
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.scale, 0.2);
  EXPECT_EQ(c.image_size, 64);
  EXPECT_EQ(c.folds, 2);
  EXPECT_EQ(c.cv_epochs, 20);
  EXPECT_EQ(c.epochs, 50);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, TextParsingAndEcho) {
  ExperimentConfig c;
  apply_config_text(c,
                    "# desk run\n"
                    "seed = 7\n"
                    "\n"
                    "scale=0.1   # smaller\n"
                    "gamma_range = 0.7, 1.3\n"
                    "fog_color = 200,210,220\n"
                    "ttest = welch\n",
                    "inline");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.scale, 0.1);
  EXPECT_EQ(c.augment.gamma_range[1], 1.3);
  EXPECT_EQ(c.augment.fog_color[2], 220);
  EXPECT_EQ(c.ttest, TTestKind::Welch);

  ExperimentConfig back;
  apply_config_text(back, c.to_text(), "echo");
  EXPECT_EQ(back.to_text(), c.to_text());
  EXPECT_EQ(back.augment.gamma_range, c.augment.gamma_range);
  const std::string text = c.to_text();
  EXPECT_EQ(config_keys().size(), static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')));
}

TEST(Config, ErrorsNameTheLine) {
  ExperimentConfig c;
  try {
    apply_config_text(c, "seed = 1\nbogus_key = 3\n", "cfg.txt");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.txt:2"), std::string::npos);
  }
  EXPECT_THROW(apply_config_text(c, "seed 1\n", "x"), ConfigError);
  EXPECT_THROW(apply_setting(c, "seed", "-3"), ConfigError);
  EXPECT_THROW(apply_setting(c, "scale", "abc"), ConfigError);
  EXPECT_THROW(apply_setting(c, "gamma_range", "1"), ConfigError);
  EXPECT_THROW(apply_setting(c, "gamma_range", "1,2,3"), ConfigError);
  EXPECT_THROW(apply_setting(c, "ttest", "paired"), ConfigError);
}

TEST(Config, ValidateCoversDownstreamConstraints) {
  auto bad = [](const char* key, const char* value) {
    ExperimentConfig c;
    apply_setting(c, key, value);
    EXPECT_THROW(c.validate(), ConfigError) << key << "=" << value;
  };
  bad("image_size", "60");
  bad("num_classes", "4");
  bad("scale", "0.001");
  bad("folds", "1");
  bad("jobs", "0");
  bad("learning_rate", "0");
  bad("gate_probability", "2");
  bad("rain_blur_kernel", "2");
  bad("ignore_class", "8");
}

TEST(Cli, UsageErrors) {
  CliRun r = run_cli({"bogus"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"train"}).code, kUsage);  // --regime is required
  EXPECT_EQ(run_cli({"train", "--regime", "foggy"}).code, kUsage);
  EXPECT_EQ(run_cli({"gen", "--seed", "abc"}).code, kUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kOk);
}

TEST(Cli, ReportMissingFileIsDataError) {
  TempDir dir("cli");
  EXPECT_EQ(run_cli({"report", (dir / "missing.csv").string()}).code, kDataError);
}

TEST(Cli, InvalidConfigHasNoSideEffects) {
  TempDir dir("cli");
  const auto out = dir / "run";
  EXPECT_EQ(run_cli({"gen", "--out", out.string(), "--set", "gate_probability=3"}).code, kDataError);
  EXPECT_EQ(run_cli({"gen", "--out", out.string(), "--scale", "0.001"}).code, kDataError);
  EXPECT_EQ(run_cli({"gen", "--out", out.string(), "--config", (dir / "none.cfg").string()}).code, kDataError);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(Cli, ConfigFileThenFlagsPrecedence) {
  TempDir dir("cli");
  std::ofstream(dir / "exp.cfg") << "seed = 5\nscale = 0.5\nout = " << (dir / "from_file").string() << "\n";
  const auto out = dir / "flag_out";
  const CliRun r = run_cli({"preview", "--config", (dir / "exp.cfg").string(), "--seed", "9", "--out", out.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  ExperimentConfig echoed;
  apply_config_text(echoed, read_file(out / "config.txt"), "echo");
  EXPECT_EQ(echoed.seed, 9u);
  EXPECT_EQ(echoed.scale, 0.5);
  EXPECT_EQ(echoed.out, out);
  EXPECT_TRUE(std::filesystem::exists(out / "preview.png"));
}

TEST(Cli, EndToEndWorkflow) {
  TempDir dir("cli");
  CliRun r = run_cli(small(dir, {"gen"}));
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(read_manifest(dir / "datasets/D1/manifest.jsonl").records.size(), 64u);
  EXPECT_EQ(read_manifest(dir / "datasets/NR/manifest.jsonl").records.size(), 24u);
  for (const char* name : {"D1", "D2", "DC", "DR", "DW", "NC", "NR", "NW", "W"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "datasets" / name / "manifest.jsonl")) << name;
  }

  r = run_cli(small(dir, {"train", "--regime", "augmented"}));
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "models/augmented.wlab"));
  EXPECT_NE(read_file(dir / "models/augmented_history.csv").find("epoch,train_loss"), std::string::npos);

  r = run_cli(small(dir, {"eval", "--model", (dir / "models/augmented.wlab").string(), "--dataset", "NR"}));
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("augmented,NR,"), std::string::npos);
  EXPECT_EQ(run_cli(small(dir, {"eval", "--model", (dir / "nope.wlab").string()})).code, kDataError);
  EXPECT_EQ(run_cli(small(dir, {"eval", "--model", (dir / "models/augmented.wlab").string(), "--dataset", "XX"})).code,
            kDataError);

  r = run_cli(small(dir, {"cv"}));
  ASSERT_EQ(r.code, kOk) << r.err;
  const std::string csv = read_file(dir / "cv/report.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "stat,DC,DR,DW,NC,NR,NW,W");
  EXPECT_TRUE(std::filesystem::exists(dir / "cv/eval.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "cv/history/weather_fold1.csv"));

  r = run_cli({"report", "--out", dir.path().string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("Weather lower loss than augmented, p-value"), std::string::npos);
}

TEST(Cli, NumericalFailureExitCode) {
  TempDir dir("cli");
  ASSERT_EQ(run_cli(small(dir, {"gen"})).code, kOk);
  const CliRun r = run_cli(small(dir, {"train", "--regime", "clear", "--set", "epochs=30", "--set", "learning_rate=1e30"}));
  EXPECT_EQ(r.code, kNumerical) << r.err;
}
