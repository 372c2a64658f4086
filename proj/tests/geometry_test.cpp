// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/geometry.hpp"

#include <gtest/gtest.h>

#include <deque>

#include "ndiscan/counter_rng.hpp"
#include "ndiscan/errors.hpp"
#include "ndiscan/instance_label.hpp"

namespace ndi {
namespace {

// Flood fill from (r, c) over pixels equal to `value`, 8- or 4-connected.
std::vector<int> flood(const Mask& m, int r0, int c0, bool value, bool eight) {
  std::vector<int> cells;
  std::vector<std::uint8_t> seen(m.bits.size(), 0);
  std::deque<std::pair<int, int>> q{{r0, c0}};
  seen[r0 * m.width + c0] = 1;
  while (!q.empty()) {
    auto [r, c] = q.front();
    q.pop_front();
    cells.push_back(r * m.width + c);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if ((dr == 0 && dc == 0) || (!eight && dr != 0 && dc != 0)) continue;
        const int rr = r + dr, cc = c + dc;
        if (rr < 0 || cc < 0 || rr >= m.height || cc >= m.width) continue;
        if (seen[rr * m.width + cc] || m.at(rr, cc) != value) continue;
        seen[rr * m.width + cc] = 1;
        q.push_back({rr, cc});
      }
    }
  }
  return cells;
}

// Every 8-connected component with its enclosed holes filled.
std::vector<Mask> filled_components(const Mask& m) {
  std::vector<Mask> out;
  std::vector<std::uint8_t> done(m.bits.size(), 0);
  for (int r = 0; r < m.height; ++r) {
    for (int c = 0; c < m.width; ++c) {
      if (!m.at(r, c) || done[r * m.width + c]) continue;
      Mask padded(m.height + 2, m.width + 2);
      for (int i : flood(m, r, c, true, true)) {
        done[i] = 1;
        padded.set(i / m.width + 1, i % m.width + 1);
      }
      // background reachable from outside the image stays background
      std::vector<std::uint8_t> outside(padded.bits.size(), 0);
      for (int i : flood(padded, 0, 0, false, false)) outside[i] = 1;
      Mask filled(m.height, m.width);
      for (int rr = 0; rr < m.height; ++rr) {
        for (int cc = 0; cc < m.width; ++cc) filled.set(rr, cc, !outside[(rr + 1) * padded.width + cc + 1]);
      }
      out.push_back(std::move(filled));
    }
  }
  return out;
}

TEST(Geometry, BoxMaskIsHalfOpenOnPixelCentres) {
  const Mask m = box_mask({1.0, 1.0, 2.0, 3.0}, 6, 6);
  EXPECT_EQ(mask_area(m), 6u);
  EXPECT_TRUE(m.at(1, 1));
  EXPECT_TRUE(m.at(3, 2));
  EXPECT_FALSE(m.at(4, 1));
  EXPECT_FALSE(m.at(1, 3));
  // a box that covers no pixel centre
  EXPECT_EQ(mask_area(box_mask({0.6, 0.6, 0.3, 0.3}, 4, 4)), 0u);
  EXPECT_EQ(mask_area(box_mask({0.4, 0.4, 0.2, 0.2}, 4, 4)), 1u);
}

TEST(Geometry, MaskBounds) {
  Mask m(5, 7);
  EXPECT_FALSE(mask_bounds(m).has_value());
  m.set(1, 2);
  m.set(3, 5);
  EXPECT_EQ(*mask_bounds(m), (Box{2, 1, 4, 3}));
}

TEST(Geometry, PolygonAreaAndBounds) {
  const Polygon sq{{0, 0}, {4, 0}, {4, 3}, {0, 3}};
  EXPECT_DOUBLE_EQ(polygon_area(sq), 12.0);
  EXPECT_EQ(*polygon_bounds(sq), (Box{0, 0, 4, 3}));
  EXPECT_EQ(mask_area(rasterize(sq, 5, 5)), 12u);
  EXPECT_FALSE(polygon_bounds({}).has_value());
}

TEST(Geometry, RasterizeTriangleCentres) {
  const Polygon tri{{0, 0}, {4, 0}, {0, 4}};
  const Mask m = rasterize(tri, 4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) EXPECT_EQ(m.at(r, c), (c + 0.5) + (r + 0.5) < 4) << r << "," << c;
  }
}

TEST(Geometry, RasterizeUnionOfRings) {
  const std::vector<Polygon> rings{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}, {{1, 1}, {3, 1}, {3, 3}, {1, 3}}};
  EXPECT_EQ(mask_area(rasterize(rings, 4, 4)), 7u);
}

TEST(Geometry, TraceOutlineRectangle) {
  const Mask m = box_mask({2, 1, 3, 2}, 5, 6);
  const Polygon p = trace_outline(m);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_DOUBLE_EQ(std::abs(polygon_area(p)), 6.0);
  EXPECT_EQ(*polygon_bounds(p), (Box{2, 1, 3, 2}));
  EXPECT_EQ(rasterize(p, 5, 6), m);
}

TEST(Geometry, TraceOutlineDiagonalPinch) {
  Mask m(4, 4);
  m.set(0, 0);
  m.set(1, 1);
  m.set(2, 2);
  const Polygon p = trace_outline(m);
  EXPECT_EQ(rasterize(p, 4, 4), m);
}

TEST(Geometry, TraceOutlineEmpty) { EXPECT_TRUE(trace_outline(Mask(3, 3)).empty()); }

TEST(Geometry, TraceOutlineMatchesFilledComponentOracle) {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const int h = 1 + static_cast<int>(rng.below(20));
    const int w = 1 + static_cast<int>(rng.below(20));
    const double density = rng.uniform(0.2, 0.8);
    Mask m(h, w);
    for (auto& b : m.bits) b = rng.uniform() < density;
    if (mask_area(m) == 0) continue;
    const auto candidates = filled_components(m);
    std::size_t best = 0;
    for (const auto& f : candidates) best = std::max(best, mask_area(f));
    const Mask got = rasterize(trace_outline(m), h, w);
    bool found = false;
    for (const auto& f : candidates) found = found || (mask_area(f) == best && f == got);
    ASSERT_TRUE(found) << "trial " << trial;
  }
}

TEST(Geometry, LabelMaskPrefersPolygon) {
  InstanceLabel l{1, {0, 0, 4, 4}, {{0, 0}, {4, 0}, {0, 4}}};
  EXPECT_EQ(mask_area(label_mask(l, 4, 4)), 6u);
  l.polygon.clear();
  EXPECT_EQ(mask_area(label_mask(l, 4, 4)), 16u);
}

TEST(Geometry, ValidateLabel) {
  EXPECT_NO_THROW(validate_label({1, {0, 0, 10, 10}, {}}, 10, 10));
  EXPECT_THROW(validate_label({1, {0, 0, 0, 10}, {}}, 10, 10), ValidationError);
  EXPECT_THROW(validate_label({1, {5, 0, 6, 10}, {}}, 10, 10), ValidationError);
  EXPECT_THROW(validate_label({1, {-1, 0, 4, 4}, {}}, 10, 10), ValidationError);
  // polygon bounds must sit within 1 px of the box
  EXPECT_NO_THROW(validate_label({1, {1, 1, 4, 4}, {{1, 1}, {5, 1}, {5, 5}, {1.5, 5}}}, 10, 10));
  EXPECT_THROW(validate_label({1, {1, 1, 4, 4}, {{1, 1}, {7, 1}, {7, 5}}}, 10, 10), ValidationError);
  EXPECT_THROW(validate_label({1, {1, 1, 4, 4}, {{1, 1}, {5, 5}}}, 10, 10), ValidationError);
}

}  // namespace
}  // namespace ndi
