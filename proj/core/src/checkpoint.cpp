#include "wxaug/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "wxaug/errors.hpp"

namespace wxaug {

namespace {

constexpr char kMagic[5] = {'W', 'L', 'A', 'B', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32s(std::ofstream& out, const std::vector<float>& values) {
  for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open checkpoint " + path.string());
  }

  std::uint32_t u32() {
    unsigned char b[4];
    in_.read(reinterpret_cast<char*>(b), 4);
    if (!in_) throw DataError("truncated checkpoint " + path_.string());
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  void f32s(std::vector<float>& values) {
    for (float& f : values) f = std::bit_cast<float>(u32());
  }

  void magic() {
    char m[5];
    in_.read(m, 5);
    if (!in_ || std::memcmp(m, kMagic, 5) != 0) throw DataError("not a WLAB1 checkpoint: " + path_.string());
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace

void save_checkpoint(const UNetWeights& weights, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(kMagic, 5);
  const UNetConfig& c = weights.config;
  for (int v : {c.levels, c.base_channels, c.num_classes, c.input_size}) put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(weights.layers.size()));
  for (const auto& l : weights.layers) {
    put_u32(out, static_cast<std::uint32_t>(l.kernel));
    put_u32(out, static_cast<std::uint32_t>(l.in_ch));
    put_u32(out, static_cast<std::uint32_t>(l.out_ch));
    put_f32s(out, l.weight);
    put_f32s(out, l.bias);
  }
  if (!out) throw IoError("write failed for " + path.string());
}

UNetWeights load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  r.magic();
  UNetConfig c;
  c.levels = static_cast<int>(r.u32());
  c.base_channels = static_cast<int>(r.u32());
  c.num_classes = static_cast<int>(r.u32());
  c.input_size = static_cast<int>(r.u32());
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw DataError(path.string() + ": bad header: " + e.what());
  }
  UNetWeights w = UNetWeights::zeros(c);
  if (r.u32() != w.layers.size()) throw DataError(path.string() + ": layer count mismatch");
  for (auto& l : w.layers) {
    const auto k = static_cast<int>(r.u32());
    const auto in = static_cast<int>(r.u32());
    const auto out = static_cast<int>(r.u32());
    if (k != l.kernel || in != l.in_ch || out != l.out_ch) {
      throw DataError(path.string() + ": shape mismatch in layer " + l.name);
    }
    r.f32s(l.weight);
    r.f32s(l.bias);
  }
  if (!r.at_end()) throw DataError(path.string() + ": trailing bytes");
  return w;
}

}  // namespace wxaug
