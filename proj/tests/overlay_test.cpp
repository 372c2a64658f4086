// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/overlay.hpp"

#include <gtest/gtest.h>

#include "ndiscan/counter_rng.hpp"
#include "ndiscan/png_io.hpp"
#include "test_util.hpp"

namespace ndi {
namespace {

GrayImage noise_image(int h, int w) {
  GrayImage g(h, w);
  SplitMix64 rng(9);
  for (auto& p : g.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  return g;
}

bool is(const RgbImage& img, int r, int c, const Rgb& color) {
  const auto* px = img.at(r, c);
  return px[0] == color[0] && px[1] == color[1] && px[2] == color[2];
}

int count_color(const RgbImage& img, const Rgb& color) {
  int n = 0;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) n += is(img, r, c, color);
  }
  return n;
}

TEST(Overlay, NothingToDrawIsGrayExpanded) {
  testing::TempDir dir("ov");
  const GrayImage g = noise_image(20, 30);
  render_overlay(g, {}, {}, dir / "o.png");
  const RgbImage img = read_png_rgb(dir / "o.png");
  ASSERT_EQ(img.height, 20);
  ASSERT_EQ(img.width, 30);
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 30; ++c) {
      for (int k = 0; k < 3; ++k) ASSERT_EQ(img.at(r, c)[k], g.at(r, c));
    }
  }
}

TEST(Overlay, GroundTruthRectangle) {
  testing::TempDir dir("ov");
  const GrayImage g = noise_image(20, 30);
  const std::vector<InstanceLabel> gts{{1, {4, 3, 10, 6}, {}}};
  render_overlay(g, gts, {}, dir / "o.png");
  const RgbImage img = read_png_rgb(dir / "o.png");
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 30; ++c) {
      const bool inside = c >= 4 && c <= 13 && r >= 3 && r <= 8;
      const bool edge = inside && (c == 4 || c == 13 || r == 3 || r == 8);
      if (edge) {
        ASSERT_TRUE(is(img, r, c, kGroundTruthColor)) << r << "," << c;
      } else {
        for (int k = 0; k < 3; ++k) ASSERT_EQ(img.at(r, c)[k], g.at(r, c)) << r << "," << c;
      }
    }
  }
  EXPECT_EQ(count_color(img, kGroundTruthColor), 2 * 10 + 2 * 4);
}

TEST(Overlay, GroundTruthAndPredictionColorsDiffer) {
  const GrayImage g(40, 40, 128);
  const std::vector<InstanceLabel> gts{{1, {10, 12, 12, 12}, {}}};
  const std::vector<Prediction> preds{{1, {11, 13, 12, 12}, {}, {}, 0.87}};
  const RgbImage img = compose_overlay(g, gts, preds);
  EXPECT_GT(count_color(img, kGroundTruthColor), 0);
  EXPECT_GT(count_color(img, kPredictionColor), 40);  // outline plus caption
  EXPECT_NE(kGroundTruthColor, kPredictionColor);
  // the caption sits above the box
  int caption = 0;
  for (int r = 0; r < 13; ++r) {
    for (int c = 0; c < 40; ++c) caption += is(img, r, c, kPredictionColor);
  }
  EXPECT_GT(caption, 0);
}

TEST(Overlay, Deterministic) {
  testing::TempDir dir("ov");
  const GrayImage g = noise_image(25, 25);
  const std::vector<Prediction> preds{{1, {0, 0, 5, 5}, {}, {}, 0.5}, {1, {20, 20, 5, 5}, {}, {}, 0.25}};
  render_overlay(g, {}, preds, dir / "a.png");
  render_overlay(g, {}, preds, dir / "b.png");
  EXPECT_EQ(testing::read_bytes(dir / "a.png"), testing::read_bytes(dir / "b.png"));
}

}  // namespace
}  // namespace ndi
