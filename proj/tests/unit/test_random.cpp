#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "hetmed/random.hpp"

using hetmed::Philox4x32;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block(C{1, 0, 0, 0}, K{0, 0}) == C{0xf8e4cca4, 0x5cb200db, 0xb1a574eb, 0x097eff67});
  CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox block is usable at compile time") {
  constexpr auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  STATIC_REQUIRE(out[0] == 0x6627e8d5u);
}

TEST_CASE("uniforms lie strictly inside (0, 1)") {
  CHECK(hetmed::bits_to_open_unit(0) > 0.0);
  CHECK(hetmed::bits_to_open_unit(~std::uint64_t{0}) < 1.0);
  CHECK(1.0 - hetmed::bits_to_open_unit(~std::uint64_t{0}) == hetmed::bits_to_open_unit(0));
  CHECK(hetmed::bits_to_open_unit(~std::uint64_t{0}) == 1.0 - 0x1p-53);
}

TEST_CASE("counter stream is a pure function of (seed, stream, index)") {
  const hetmed::CounterStream a(42), b(42), c(43);
  CHECK(a.uniform(3, 7) == b.uniform(3, 7));
  CHECK(a.uniform(3, 7) != c.uniform(3, 7));
  CHECK(a.uniform(3, 7) != a.uniform(7, 3));
  CHECK(a.uniform(3, 7) != a.uniform(3, 8));
  // far-apart counters still differ; the high words are part of the counter
  CHECK(a.bits(std::uint64_t{1} << 33, 0) != a.bits(0, 0));
  CHECK(a.bits(0, std::uint64_t{1} << 33) != a.bits(0, 0));
}

TEST_CASE("uniform stream has the right first two moments") {
  const hetmed::CounterStream s(7);
  const int m = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = s.uniform(0, static_cast<std::uint64_t>(i));
    sum += u;
    sq += u * u;
  }
  const double mean = sum / m;
  const double var = sq / m - mean * mean;
  // standard error of the mean is sqrt(1/12/m) ~ 6.5e-4
  CHECK(std::fabs(mean - 0.5) < 4 * 6.5e-4);
  CHECK(std::fabs(var - 1.0 / 12.0) < 1e-3);
}

TEST_CASE("mix_seed separates purposes") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t p = 0; p < 16; ++p) seen.insert(hetmed::mix_seed(7, p));
  CHECK(seen.size() == 16);
  CHECK(hetmed::mix_seed(7, 1) == hetmed::mix_seed(7, 1));
}

TEST_CASE("stream cursor integers cover the closed range") {
  const hetmed::CounterStream s(1);
  hetmed::StreamCursor cur(s, 0);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto k = cur.integer(4, 9);
    REQUIRE(k >= 4);
    REQUIRE(k <= 9);
    seen.insert(k);
  }
  CHECK(seen.size() == 6);

  hetmed::StreamCursor again(s, 0);
  hetmed::StreamCursor other(s, 0);
  CHECK(again.uniform(-2.0, 2.0) == other.uniform(-2.0, 2.0));
}
