#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "seeflow/change_detection.hpp"

using namespace seeflow;

TEST(DiffRegion, IdenticalFramesHaveNoRegion) {
  EXPECT_FALSE(diff_region(Frame(0, 64, 48), Frame(1, 64, 48)).has_value());
}

TEST(DiffRegion, SinglePixel) {
  Frame a(0, 64, 48), b(1, 64, 48);
  b.at(10, 20) = Rgb{0, 0, 0};
  const auto r = diff_region(a, b);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->box, (Rect{10, 20, 11, 21}));
  EXPECT_EQ(r->frame_a_index, 0u);
  EXPECT_EQ(r->frame_b_index, 1u);
}

TEST(DiffRegion, TwoPixelsSpanTheirBoundingBox) {
  Frame a(0, 64, 48), b(1, 64, 48);
  b.at(2, 3) = Rgb{1, 2, 3};
  b.at(50, 40) = Rgb{1, 2, 3};
  const auto r = diff_region(a, b, 0);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->box, (Rect{2, 3, 51, 41}));
  EXPECT_EQ(r->box, *oracle::diff_box(a, b, 0));
}

TEST(DiffRegion, DimensionMismatchAndNegativeTolerance) {
  try {
    diff_region(Frame(0, 4, 4), Frame(1, 5, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
  EXPECT_THROW(diff_region(Frame(0, 4, 4), Frame(1, 4, 4), -1), Error);
}

TEST(DiffRegion, ToleranceAbsorbsSmallDifferences) {
  Frame a(0, 8, 8), b(1, 8, 8);
  b.at(3, 3) = Rgb{250, 255, 255};
  EXPECT_TRUE(diff_region(a, b, 4));
  EXPECT_FALSE(diff_region(a, b, 5));
}

// Random sparse differences on small frames: oracle agreement, symmetry, tightness, and
// monotonicity in tolerance.
TEST(DiffRegion, PropertiesOnRandomFrames) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 12), h = 1 + static_cast<int>(rng() % 12);
    Frame a(0, w, h), b(1, w, h);
    for (auto& p : a.pixels()) p = Rgb{std::uint8_t(rng() % 256), std::uint8_t(rng() % 256), std::uint8_t(rng() % 256)};
    for (int k = 0; k < w * h; ++k) b.pixels()[static_cast<std::size_t>(k)] = a.pixels()[static_cast<std::size_t>(k)];
    const int changes = static_cast<int>(rng() % 4);
    for (int k = 0; k < changes; ++k) {
      auto& p = b.at(static_cast<int>(rng() % w), static_cast<int>(rng() % h));
      p.g = static_cast<std::uint8_t>(p.g + 1 + rng() % 40);
    }
    const int tol = static_cast<int>(rng() % 20);
    const auto r = diff_region(a, b, tol);
    const auto expected = oracle::diff_box(a, b, tol);
    ASSERT_EQ(r.has_value(), expected.has_value());
    const auto rev = diff_region(b, a, tol);
    ASSERT_EQ(rev.has_value(), r.has_value());
    if (!r) continue;
    EXPECT_EQ(r->box, *expected);
    EXPECT_EQ(rev->box, r->box);

    // Each side of the box holds a differing pixel.
    auto differs = [&](int x, int y) { return pixels_differ(a.at(x, y), b.at(x, y), tol); };
    bool top = false, bottom = false, left = false, right = false;
    for (int x = r->box.x1; x < r->box.x2; ++x) top |= differs(x, r->box.y1), bottom |= differs(x, r->box.y2 - 1);
    for (int y = r->box.y1; y < r->box.y2; ++y) left |= differs(r->box.x1, y), right |= differs(r->box.x2 - 1, y);
    EXPECT_TRUE(top && bottom && left && right);

    const auto looser = diff_region(a, b, tol + 5);
    if (looser) { EXPECT_TRUE(r->box.contains(looser->box)); }
  }
}
