#include "wxaug/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "wxaug/errors.hpp"
#include "wxaug/png_io.hpp"

namespace wxaug {

using nlohmann::json;

namespace {

json record_to_json(const SampleRecord& r) {
  return json{
      {"rgb_path", r.rgb_path},
      {"mask_path", r.mask_path},
      {"town", r.town},
      {"condition", std::string(to_string(r.condition))},
      {"scene_seed", r.scene_seed},
      {"weather",
       {{"sun_altitude_deg", r.weather.sun_altitude_deg},
        {"cloudiness", r.weather.cloudiness},
        {"precipitation", r.weather.precipitation},
        {"fog_density", r.weather.fog_density},
        {"wetness", r.weather.wetness}}},
  };
}

template <typename T>
T required(const json& obj, const char* key) {
  if (!obj.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  return obj.at(key).get<T>();
}

SampleRecord record_from_json(const json& j) {
  if (!j.is_object()) throw DataError("record is not a JSON object");
  SampleRecord r;
  r.rgb_path = required<std::string>(j, "rgb_path");
  r.mask_path = required<std::string>(j, "mask_path");
  r.town = required<int>(j, "town");
  r.condition = parse_condition(required<std::string>(j, "condition"));
  r.scene_seed = required<std::uint64_t>(j, "scene_seed");
  const json& w = j.contains("weather") ? j.at("weather") : throw DataError("missing field 'weather'");
  r.weather.sun_altitude_deg = required<double>(w, "sun_altitude_deg");
  r.weather.cloudiness = required<double>(w, "cloudiness");
  r.weather.precipitation = required<double>(w, "precipitation");
  r.weather.fog_density = required<double>(w, "fog_density");
  r.weather.wetness = required<double>(w, "wetness");
  return r;
}

}  // namespace

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << json{{"name", manifest.name}, {"num_classes", manifest.num_classes}}.dump() << '\n';
  for (const auto& r : manifest.records) out << record_to_json(r).dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  Manifest m;
  m.directory = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        m.name = required<std::string>(j, "name");
        m.num_classes = required<int>(j, "num_classes");
        if (m.num_classes < 1 || m.num_classes > 256) throw DataError("num_classes out of range");
        have_header = true;
      } else {
        m.records.push_back(record_from_json(j));
      }
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw DataError(path.string() + ":1: missing header line");
  return m;
}

std::vector<FoldSpec> make_folds(std::size_t n, std::size_t k) {
  if (k < 1) throw ConfigError("make_folds: k must be >= 1");
  if (k > n) throw ConfigError("make_folds: k > n");
  if (n % k != 0) {
    throw ConfigError("make_folds: k=" + std::to_string(k) + " does not divide n=" +
                      std::to_string(n));
  }
  const std::size_t block = n / k;
  std::vector<FoldSpec> folds(k);
  for (std::size_t i = 0; i < k; ++i) {
    FoldSpec& f = folds[i];
    f.fold_index = static_cast<int>(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j >= i * block && j < (i + 1) * block) {
        f.test_indices.push_back(j);
      } else {
        f.train_indices.push_back(j);
      }
    }
  }
  return folds;
}

ImageRGB resize_bilinear(const ImageRGB& img, int w, int h) {
  if (w <= 0 || h <= 0) throw ConfigError("resize: zero target dimension");
  if (w == img.width && h == img.height) return img;
  ImageRGB out(w, h);
  const double sx = static_cast<double>(img.width) / w;
  const double sy = static_cast<double>(img.height) / h;
  for (int y = 0; y < h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double tx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0)[c] * (1 - tx) + img.at(x1, y0)[c] * tx;
        const double bot = img.at(x0, y1)[c] * (1 - tx) + img.at(x1, y1)[c] * tx;
        out.at(x, y)[c] = to_u8(top * (1 - ty) + bot * ty);
      }
    }
  }
  return out;
}

MaskImage resize_nearest(const MaskImage& mask, int w, int h) {
  if (w <= 0 || h <= 0) throw ConfigError("resize: zero target dimension");
  if (w == mask.width && h == mask.height) return mask;
  MaskImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(static_cast<int>((y + 0.5) * mask.height / h), mask.height - 1);
    for (int x = 0; x < w; ++x) {
      const int sx = std::min(static_cast<int>((x + 0.5) * mask.width / w), mask.width - 1);
      out.at(x, y) = mask.at(sx, sy);
    }
  }
  return out;
}

std::pair<ImageRGB, MaskImage> resize_pair(const ImageRGB& img, const MaskImage& mask,
                                           int w, int h) {
  if (img.width != mask.width || img.height != mask.height) {
    throw DataError("resize_pair: image and mask dimensions differ");
  }
  return {resize_bilinear(img, w, h), resize_nearest(mask, w, h)};
}

std::vector<Sample> load_samples(const Manifest& manifest, int size) {
  std::vector<Sample> samples;
  samples.reserve(manifest.records.size());
  for (const auto& r : manifest.records) {
    ImageRGB rgb = read_rgb_png(manifest.directory / r.rgb_path);
    MaskImage mask = read_mask_png(manifest.directory / r.mask_path, manifest.num_classes);
    auto [img, m] = resize_pair(rgb, mask, size, size);
    samples.push_back({std::move(img), std::move(m)});
  }
  return samples;
}

}  // namespace wxaug
