#include <doctest.h>

#include <random>

#include "mvqc/error.hpp"
#include "mvqc/moments.hpp"
#include "oracles.hpp"

using namespace mvqc;

namespace {
BinaryImage block2x2() {
  BinaryImage t(4, 4);
  t(0, 0) = t(1, 0) = t(0, 1) = t(1, 1) = 1;
  return t;
}
}  // namespace

TEST_CASE("raw moments use 1-based row/column") {
  BinaryImage t(8, 8);
  t(3, 2) = 1;  // column 3, row 2 (0-based) -> i = 3, j = 4
  CHECK(raw_moment(t, 0, 0) == 1);
  CHECK(raw_moment(t, 1, 0) == 3);
  CHECK(raw_moment(t, 0, 1) == 4);
  CHECK(raw_moment(t, 1, 1) == 12);
  CHECK(raw_moment(t, 2, 2) == 144);

  const BinaryImage empty(8, 8);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) CHECK(raw_moment(empty, p, q) == 0);
  CHECK_FALSE(central_moment(empty, 2, 0).has_value());
  CHECK_FALSE(moment_set(empty).has_value());
  for (MomentKind k : {MomentKind::A, MomentKind::B, MomentKind::C}) CHECK(moment_value(empty, k) == 0);
}

TEST_CASE("2x2 block") {
  const BinaryImage t = block2x2();
  CHECK(*central_moment(t, 1, 0) == 0);
  CHECK(*central_moment(t, 0, 1) == 0);
  CHECK(*central_moment(t, 2, 0) == 1.0);
  CHECK(*central_moment(t, 0, 2) == 1.0);
  CHECK(*central_moment(t, 1, 1) == 0);
  CHECK(moment_value(t, MomentKind::A) == 0.125);
  CHECK(moment_value(t, MomentKind::B) == 0);
  CHECK(moment_value(t, MomentKind::C) == 1.0 / 256);

  const MomentSet s = *moment_set(t);
  CHECK(s.m00 == 4);
  CHECK(s.a == 1.5);
  CHECK(s.b == 1.5);
}

TEST_CASE("moments match the direct-summation oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const BinaryImage t = oracle::random_mask(rng, 8 + trial % 9, 8 + trial % 5);
    for (int p = 0; p <= 2; ++p)
      for (int q = 0; q <= 2; ++q) CHECK(raw_moment(t, p, q) == oracle::raw_moment(t, p, q));
    if (oracle::raw_moment(t, 0, 0) == 0) continue;
    for (int k = 0; k < 3; ++k)
      CHECK(oracle::relative_error(moment_value(t, static_cast<MomentKind>(k)), oracle::moment_value(t, k)) <=
            1e-9);
  }
}

TEST_CASE("translation and rotation leave moments unchanged") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const BinaryImage t = oracle::random_mask(rng, 16, 16, 0.3);
    const BinaryImage shifted = oracle::embed(t, 40, 40, 7 + trial % 11, 19 - trial % 13);
    BinaryImage r = t;
    for (int k = 0; k < 3; ++k) {
      r = oracle::rotate90(r);
      for (MomentKind kind : {MomentKind::A, MomentKind::B, MomentKind::C})
        CHECK(moment_value(r, kind) == moment_value(t, kind));
    }
    for (MomentKind kind : {MomentKind::A, MomentKind::B, MomentKind::C})
      CHECK(moment_value(shifted, kind) == moment_value(t, kind));
  }
}

TEST_CASE("tile-local raw moments") {
  std::mt19937_64 rng(29);
  const BinaryImage img = oracle::random_mask(rng, 64, 64);
  BinaryImage sub(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) sub(x, y) = img(32 + x, 16 + y);
  CHECK(raw_moments(img, 16, 32, 16) == raw_moments(sub));
}

TEST_CASE("normalized mode only changes Moment_B") {
  std::mt19937_64 rng(31);
  const BinaryImage t = oracle::random_mask(rng, 16, 16);
  const RawMoments raw = raw_moments(t);
  CHECK(moment_value(raw, MomentKind::A, MomentNormalization::ScaleNormalized) ==
        moment_value(raw, MomentKind::A));
  CHECK(moment_value(raw, MomentKind::C, MomentNormalization::ScaleNormalized) ==
        moment_value(raw, MomentKind::C));
  const double m00 = static_cast<double>(raw.m00());
  CHECK(moment_value(raw, MomentKind::B, MomentNormalization::ScaleNormalized) ==
        doctest::Approx(moment_value(raw, MomentKind::B) / (m00 * m00)));
}

TEST_CASE("moment names") {
  CHECK(to_string(MomentKind::C) == "Moment_C");
  CHECK(parse_moment_kind("Moment_B") == MomentKind::B);
  CHECK(parse_moment_kind("a") == MomentKind::A);
  CHECK_THROWS_AS(parse_moment_kind("D"), Error);
}
