#include "wxaug_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "wxaug/errors.hpp"
#include "wxaug/scene.hpp"

namespace wxaug::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* what) {
  throw ConfigError(std::string(key) + ": '" + std::string(value) + "' is not " + what);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text, const char* what) {
  text = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) bad_value(key, text, what);
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) bad_value(key, text, what);
  }
  return v;
}

int parse_int(std::string_view key, std::string_view t) { return parse_number<int>(key, t, "an integer"); }
double parse_double(std::string_view key, std::string_view t) { return parse_number<double>(key, t, "a number"); }

template <typename T, std::size_t N>
std::array<T, N> parse_list(std::string_view key, std::string_view text) {
  std::array<T, N> out{};
  std::size_t i = 0;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view part = text.substr(0, comma);
    if (i == N) bad_value(key, text, "the right number of comma-separated values");
    if constexpr (std::is_same_v<T, int>) {
      out[i++] = parse_int(key, part);
    } else {
      out[i++] = parse_double(key, part);
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (i != N) bad_value(key, text, "the right number of comma-separated values");
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt_double(double v) {
  char buf[40];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

template <typename T, std::size_t N>
std::string fmt_list(const std::array<T, N>& a) {
  std::string s;
  for (std::size_t i = 0; i < N; ++i) {
    if (i) s += ',';
    if constexpr (std::is_same_v<T, int>) {
      s += std::to_string(a[i]);
    } else {
      s += fmt_double(a[i]);
    }
  }
  return s;
}

struct Field {
  std::string_view name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define INT_FIELD(key, member)                                                            \
  Field {                                                                                 \
    key, [](ExperimentConfig& c, std::string_view v) { c.member = parse_int(key, v); },   \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }                \
  }
#define DOUBLE_FIELD(key, member)                                                            \
  Field {                                                                                    \
    key, [](ExperimentConfig& c, std::string_view v) { c.member = parse_double(key, v); },   \
        [](const ExperimentConfig& c) { return fmt_double(c.member); }                       \
  }
#define LIST_FIELD(key, member, T, N)                                                           \
  Field {                                                                                       \
    key, [](ExperimentConfig& c, std::string_view v) { c.member = parse_list<T, N>(key, v); },  \
        [](const ExperimentConfig& c) { return fmt_list(c.member); }                            \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"seed",
       [](ExperimentConfig& c, std::string_view v) {
         c.seed = parse_number<std::uint64_t>("seed", v, "an unsigned 64-bit integer");
       },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      DOUBLE_FIELD("scale", scale),
      INT_FIELD("image_size", image_size),
      INT_FIELD("num_classes", num_classes),
      INT_FIELD("levels", levels),
      INT_FIELD("base_channels", base_channels),
      INT_FIELD("epochs", epochs),
      INT_FIELD("cv_epochs", cv_epochs),
      DOUBLE_FIELD("learning_rate", learning_rate),
      INT_FIELD("batch_size", batch_size),
      DOUBLE_FIELD("beta1", beta1),
      DOUBLE_FIELD("beta2", beta2),
      DOUBLE_FIELD("epsilon", epsilon),
      INT_FIELD("ignore_class", ignore_class),
      INT_FIELD("folds", folds),
      {"ttest",
       [](ExperimentConfig& c, std::string_view v) {
         v = trim(v);
         if (v == "pooled") {
           c.ttest = TTestKind::Pooled;
         } else if (v == "welch") {
           c.ttest = TTestKind::Welch;
         } else {
           bad_value("ttest", v, "pooled or welch");
         }
       },
       [](const ExperimentConfig& c) { return std::string(c.ttest == TTestKind::Pooled ? "pooled" : "welch"); }},
      INT_FIELD("jobs", jobs),
      {"out", [](ExperimentConfig& c, std::string_view v) { c.out = std::string(trim(v)); },
       [](const ExperimentConfig& c) { return c.out.string(); }},
      DOUBLE_FIELD("gate_probability", augment.gate_probability),
      LIST_FIELD("gamma_range", augment.gamma_range, double, 2),
      INT_FIELD("rgb_shift_limit", augment.rgb_shift_limit),
      LIST_FIELD("fog_coef_range", augment.fog_coef_range, double, 2),
      DOUBLE_FIELD("fog_alpha", augment.fog_alpha),
      LIST_FIELD("fog_color", augment.fog_color, int, 3),
      LIST_FIELD("rain_slant_range", augment.rain_slant_range, double, 2),
      DOUBLE_FIELD("rain_drop_length", augment.rain_drop_length),
      LIST_FIELD("rain_drop_color", augment.rain_drop_color, int, 3),
      LIST_FIELD("rain_density_range", augment.rain_density_range, double, 2),
      DOUBLE_FIELD("rain_brightness", augment.rain_brightness),
      INT_FIELD("rain_blur_kernel", augment.rain_blur_kernel),
      DOUBLE_FIELD("flare_radius_frac", augment.flare_radius_frac),
      DOUBLE_FIELD("flare_intensity", augment.flare_intensity),
  };
  return table;
}

#undef INT_FIELD
#undef DOUBLE_FIELD
#undef LIST_FIELD

}  // namespace

UNetConfig ExperimentConfig::unet() const { return {levels, base_channels, num_classes, image_size}; }

TrainConfig ExperimentConfig::train(int epoch_count) const {
  TrainConfig t;
  t.epochs = epoch_count;
  t.learning_rate = learning_rate;
  t.batch_size = batch_size;
  t.beta1 = beta1;
  t.beta2 = beta2;
  t.epsilon = epsilon;
  t.ignore_class = ignore_class;
  return t;
}

GenerateOptions ExperimentConfig::generate() const { return {scale, image_size, num_classes, jobs}; }

void ExperimentConfig::validate() const {
  unet().validate();
  train(epochs).validate();
  train(cv_epochs).validate();
  augment.validate();
  if (num_classes < kDefaultNumClasses || num_classes > 256) {
    throw ConfigError("num_classes must be in [8, 256] (the scene renderer emits 8 classes)");
  }
  if (ignore_class >= num_classes) throw ConfigError("ignore_class must be < num_classes");
  if (!(scale > 0.0)) throw ConfigError("scale must be > 0");
  for (DatasetKind k : kAllDatasets) samples_per_town(k, scale);
  if (folds < 2) throw ConfigError("folds must be >= 2");
  const auto per_town = static_cast<std::size_t>(samples_per_town(DatasetKind::D1, scale));
  if (per_town * kTowns.size() < static_cast<std::size_t>(folds)) {
    throw ConfigError("folds exceeds the number of training records");
  }
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (out.empty()) throw ConfigError("out must not be empty");
}

std::string ExperimentConfig::to_text() const {
  std::string s;
  for (const Field& f : fields()) {
    s += f.name;
    s += " = ";
    s += f.get(*this);
    s += '\n';
  }
  return s;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  for (const Field& f : fields()) {
    if (f.name == key) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_config_text(ExperimentConfig& config, std::string_view text, const std::string& origin) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    try {
      apply_setting(config, line.substr(0, eq), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(config, ss.str(), path.string());
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.emplace_back(f.name);
  return keys;
}

}  // namespace wxaug::cli
