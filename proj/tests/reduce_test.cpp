// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/reduce.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ndiscan/counter_rng.hpp"
#include "ndiscan/errors.hpp"

namespace ndi {
namespace {

// Naive two-pass population variance.
double two_pass(std::span<const float> s) {
  double mean = 0;
  for (float v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double acc = 0;
  for (float v : s) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(s.size());
}

TEST(Reduce, MatchesTwoPassOracle) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    ScanVolume v(5, 7, 1024, 2.5);
    const double offset = rng.uniform(-1000, 1000);
    for (float& a : v.amplitudes()) a = static_cast<float>(offset + rng.uniform(-1, 1));
    const VarianceMap m = variance_reduce(v);
    ASSERT_EQ(m.height, 5);
    ASSERT_EQ(m.width, 7);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 7; ++c) {
        const double want = two_pass(v.ascan(r, c));
        ASSERT_NEAR(m.at(r, c), want, 1e-9 * want) << r << "," << c;
      }
    }
  }
}

TEST(Reduce, ConstantSignalGivesExactZero) {
  ScanVolume v(3, 3, 512, 2.5);
  for (float& a : v.amplitudes()) a = 123.456f;
  for (double x : variance_reduce(v).values) EXPECT_EQ(x, 0.0);
}

TEST(Reduce, AlternatingZeroTwoGivesOne) {
  ScanVolume v(1, 1, 512, 2.5);
  auto s = v.ascan(0, 0);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = (i % 2) ? 2.0f : 0.0f;
  EXPECT_EQ(variance_reduce(v).values[0], 1.0);
}

TEST(Reduce, FullGridShape) {
  const ScanVolume v(258, 368, 512, 5.0);
  const VarianceMap m = variance_reduce(v);
  EXPECT_EQ(m.height, 258);
  EXPECT_EQ(m.width, 368);
  EXPECT_EQ(m.values.size(), 258u * 368);
}

TEST(Reduce, NormalizeEndpointsAndRounding) {
  const VarianceMap m{1, 3, {0.0, 5.0, 10.0}};
  EXPECT_EQ(normalize_to_gray(m).pixels, (std::vector<std::uint8_t>{0, 128, 255}));
  const VarianceMap shifted{1, 3, {7.0, 2.0, 12.0}};
  EXPECT_EQ(normalize_to_gray(shifted).pixels, (std::vector<std::uint8_t>{128, 0, 255}));
}

TEST(Reduce, ConstantMapIsBlack) {
  const VarianceMap m{2, 2, {3.0, 3.0, 3.0, 3.0}};
  const GrayImage g = normalize_to_gray(m);
  EXPECT_TRUE(std::all_of(g.pixels.begin(), g.pixels.end(), [](auto p) { return p == 0; }));
}

TEST(Reduce, NormalizeIsMonotone) {
  SplitMix64 rng(5);
  VarianceMap m{16, 16, std::vector<double>(256)};
  for (double& x : m.values) x = rng.uniform(0, 1e-3) * (rng.uniform() < 0.5 ? 1 : 1000);
  const GrayImage g = normalize_to_gray(m);
  std::vector<std::size_t> order(256);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return m.values[a] < m.values[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    ASSERT_LE(g.pixels[order[i - 1]], g.pixels[order[i]]);
  }
  EXPECT_EQ(g.pixels[order.front()], 0);
  EXPECT_EQ(g.pixels[order.back()], 255);
}

TEST(Reduce, ResizeIdentity) {
  GrayImage g(9, 13);
  SplitMix64 rng(1);
  for (auto& p : g.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  EXPECT_EQ(resize(g, 9, 13), g);
}

TEST(Reduce, ResizeDimensionsAndCorners) {
  GrayImage g(258, 368);
  SplitMix64 rng(2);
  for (auto& p : g.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  for (int n : {512, 640}) {
    const GrayImage r = resize(g, n, n);
    EXPECT_EQ(r.height, n);
    EXPECT_EQ(r.width, n);
    // corner-aligned mapping keeps the four corners
    EXPECT_EQ(r.at(0, 0), g.at(0, 0));
    EXPECT_EQ(r.at(0, n - 1), g.at(0, 367));
    EXPECT_EQ(r.at(n - 1, 0), g.at(257, 0));
    EXPECT_EQ(r.at(n - 1, n - 1), g.at(257, 367));
  }
  EXPECT_THROW(resize(g, 0, 4), ValidationError);
}

TEST(Reduce, ResizeBilinearHandValues) {
  GrayImage g(2, 2);
  g.pixels = {0, 100, 200, 50};
  const GrayImage r = resize(g, 3, 3);
  // midpoint of the edges and the centre
  EXPECT_EQ(r.at(0, 1), 50);
  EXPECT_EQ(r.at(1, 0), 100);
  EXPECT_EQ(r.at(1, 1), 88);  // (0+100+200+50)/4 = 87.5
  EXPECT_EQ(r.at(2, 1), 125);
}

TEST(Reduce, ResizeSinglePixelSource) {
  GrayImage g(1, 1, 77);
  const GrayImage r = resize(g, 4, 3);
  for (auto p : r.pixels) EXPECT_EQ(p, 77);
}

TEST(Reduce, ScaleLabelsDoubling) {
  const InstanceLabel l{1, {10, 10, 20, 20}, {{10, 10}, {30, 10}, {30, 30}, {10, 30}}};
  const auto out = scale_labels({l}, {258, 368}, {516, 736});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].bbox, (Box{20, 20, 40, 40}));
  EXPECT_EQ(out[0].polygon[2], (Point{60, 60}));
  EXPECT_EQ(scale_labels({l}, {258, 368}, {258, 368}), std::vector<InstanceLabel>{l});
}

TEST(Reduce, ScaleLabelsRoundTrip) {
  SplitMix64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0, 300), y = rng.uniform(0, 200);
    const InstanceLabel l{1, {x, y, rng.uniform(1, 368 - x), rng.uniform(1, 258 - y)}, {}};
    const auto there = scale_labels({l}, {258, 368}, {640, 640});
    const auto back = scale_labels(there, {640, 640}, {258, 368});
    EXPECT_NEAR(back[0].bbox.x, l.bbox.x, 1.0);
    EXPECT_NEAR(back[0].bbox.y, l.bbox.y, 1.0);
    EXPECT_NEAR(back[0].bbox.w, l.bbox.w, 1.0);
    EXPECT_NEAR(back[0].bbox.h, l.bbox.h, 1.0);
  }
}

TEST(Reduce, ScaleLabelsRejectsOutOfFrame) {
  const InstanceLabel l{1, {360, 10, 20, 20}, {}};
  EXPECT_THROW(scale_labels({l}, {258, 368}, {512, 512}), ValidationError);
}

}  // namespace
}  // namespace ndi
