#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wxaug {

/// One step of the splitmix64 generator: advances `state` by the golden
/// gamma and returns the mixed output.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// 64-bit FNV-1a over the label bytes followed by the 8 little-endian bytes
/// of `index`.
std::uint64_t fnv1a64(std::string_view label, std::uint64_t index);

/// PCG32 (XSH-RR, 64-bit state, 64-bit odd increment). A value type: copies
/// are independent generators that continue the same sequence.
class RngStream {
 public:
  /// Standard pcg32_srandom seeding.
  RngStream(std::uint64_t init_state, std::uint64_t init_seq);

  std::uint32_t next_u32();
  std::uint64_t next_u64();  // high word first

  /// lo + (hi - lo) * next_u32() / 2^32. Throws ConfigError if lo > hi.
  double uniform(double lo, double hi);

  /// Integer in [lo, hi] inclusive via the multiply-shift reduction
  /// (next_u32() * span) >> 32. Throws ConfigError if lo > hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// uniform(0, 1) < p. Throws ConfigError if p is outside [0, 1].
  bool bernoulli(double p);

  std::uint64_t state() const { return state_; }
  std::uint64_t increment() const { return inc_; }

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
};

struct PathStep {
  std::string label;
  std::uint64_t index = 0;
};

/// Derives an independent stream from a global seed and a labelled path.
///
/// The chain starts at x = global_seed. For each (label, index) step,
/// x ^= fnv1a64(label, index) and then x = splitmix64_next(x) (output, with
/// the state copy discarded). The final x seeds a splitmix64 whose next two
/// outputs become PCG32's init_state and init_seq. Throws ConfigError for an
/// empty path.
RngStream derive_stream(std::uint64_t global_seed,
                        const std::vector<PathStep>& path);

inline RngStream derive_stream(std::uint64_t global_seed,
                               std::initializer_list<PathStep> path) {
  return derive_stream(global_seed, std::vector<PathStep>(path));
}

/// Convenience: a 64-bit child seed from a derived stream.
std::uint64_t derive_seed(std::uint64_t global_seed,
                          const std::vector<PathStep>& path);

}  // namespace wxaug
