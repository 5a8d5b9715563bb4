#pragma once

#include <array>
#include <cstdint>

namespace hetmed {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every output
// block is a pure function of (key, counter), which is what makes per-trial
// replay and thread-count-independent results possible.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Maps 64 random bits to the open interval (0, 1): the top 52 bits pick a
// cell of width 2^-52 and the result is its midpoint. Every output is a
// multiple of 2^-53, so 0 and 1 are never produced and 1 - u is exact.
constexpr double bits_to_open_unit(std::uint64_t bits) noexcept {
  constexpr double step = 1.0 / 4503599627370496.0;  // 2^-52
  return (static_cast<double>(bits >> 12) + 0.5) * step;
}

// A keyed family of uniform streams: uniform(stream, index) depends only on
// (seed, stream, index). The simulation uses stream = trial index and
// index = observation index.
class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  [[nodiscard]] constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                  static_cast<std::uint32_t>(index >> 32),
                                  static_cast<std::uint32_t>(stream),
                                  static_cast<std::uint32_t>(stream >> 32)};
    const auto out = Philox4x32::block(ctr, key_);
    return (std::uint64_t{out[0]} << 32) | out[1];
  }

  [[nodiscard]] constexpr double uniform(std::uint64_t stream, std::uint64_t index) const noexcept {
    return bits_to_open_unit(bits(stream, index));
  }

 private:
  Philox4x32::Key key_;
};

// splitmix64 finalizer; used to derive independent keys for different
// purposes from one user-facing seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t purpose) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (purpose + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Sequential view over one stream, for code that just wants "the next
// uniform" (randomized verification suites).
class StreamCursor {
 public:
  constexpr StreamCursor(const CounterStream& source, std::uint64_t stream) noexcept
      : source_(source), stream_(stream) {}

  constexpr double uniform() noexcept { return source_.uniform(stream_, next_++); }

  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi]. The modulo bias is below 2^-40 for the
  // ranges used here.
  constexpr std::int64_t integer(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(source_.bits(stream_, next_++) % span);
  }

 private:
  CounterStream source_;
  std::uint64_t stream_;
  std::uint64_t next_ = 0;
};

}  // namespace hetmed
