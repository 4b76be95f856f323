#include "wxaug/rng.hpp"

#include "wxaug/errors.hpp"

namespace wxaug {

namespace {
constexpr std::uint64_t kPcgMultiplier = 6364136223846793005ULL;
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}  // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view label, std::uint64_t index) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : label) {
    h ^= c;
    h *= kFnvPrime;
  }
  for (int b = 0; b < 8; ++b) {
    h ^= (index >> (8 * b)) & 0xFFu;
    h *= kFnvPrime;
  }
  return h;
}

RngStream::RngStream(std::uint64_t init_state, std::uint64_t init_seq)
    : state_(0), inc_((init_seq << 1u) | 1u) {
  next_u32();
  state_ += init_state;
  next_u32();
}

std::uint32_t RngStream::next_u32() {
  const std::uint64_t old = state_;
  state_ = old * kPcgMultiplier + inc_;
  const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const auto rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform(double lo, double hi) {
  if (lo > hi) throw ConfigError("uniform: lo > hi");
  return lo + (hi - lo) * (static_cast<double>(next_u32()) * 0x1p-32);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw ConfigError("uniform_int: lo > hi");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span > (1ULL << 32)) throw ConfigError("uniform_int: span exceeds 2^32");
  const std::uint64_t r = (static_cast<std::uint64_t>(next_u32()) * span) >> 32;
  return lo + static_cast<std::int64_t>(r);
}

bool RngStream::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("bernoulli: p outside [0,1]");
  return uniform(0.0, 1.0) < p;
}

RngStream derive_stream(std::uint64_t global_seed,
                        const std::vector<PathStep>& path) {
  if (path.empty()) throw ConfigError("derive_stream: empty path");
  std::uint64_t x = global_seed;
  for (const auto& step : path) {
    x ^= fnv1a64(step.label, step.index);
    std::uint64_t s = x;
    x = splitmix64_next(s);
  }
  std::uint64_t sm = x;
  const std::uint64_t init_state = splitmix64_next(sm);
  const std::uint64_t init_seq = splitmix64_next(sm);
  return RngStream(init_state, init_seq);
}

std::uint64_t derive_seed(std::uint64_t global_seed,
                          const std::vector<PathStep>& path) {
  return derive_stream(global_seed, path).next_u64();
}

}  // namespace wxaug
