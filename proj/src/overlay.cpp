// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace ndi {
namespace {

// 3x5 glyphs, one row per entry, bit 2 is the leftmost column.
constexpr std::array<std::array<std::uint8_t, 5>, 11> kGlyphs = {{
    {7, 5, 5, 5, 7},  // 0
    {2, 6, 2, 2, 7},  // 1
    {7, 1, 7, 4, 7},  // 2
    {7, 1, 7, 1, 7},  // 3
    {5, 5, 7, 1, 1},  // 4
    {7, 4, 7, 1, 7},  // 5
    {7, 4, 7, 5, 7},  // 6
    {7, 1, 1, 1, 1},  // 7
    {7, 5, 7, 5, 7},  // 8
    {7, 5, 7, 1, 7},  // 9
    {0, 0, 0, 0, 2},  // .
}};
constexpr int kGlyphW = 3;
constexpr int kGlyphH = 5;

void put(RgbImage& img, int r, int c, const Rgb& color) {
  if (r < 0 || r >= img.height || c < 0 || c >= img.width) return;
  std::copy(color.begin(), color.end(), img.at(r, c));
}

struct PixelRect {
  int x0, y0, x1, y1;  // inclusive
};

PixelRect pixel_rect(const Box& b) {
  const int x0 = static_cast<int>(std::lround(b.x));
  const int y0 = static_cast<int>(std::lround(b.y));
  const int x1 = std::max(x0, static_cast<int>(std::lround(b.right())) - 1);
  const int y1 = std::max(y0, static_cast<int>(std::lround(b.bottom())) - 1);
  return {x0, y0, x1, y1};
}

void draw_rect(RgbImage& img, const Box& box, const Rgb& color) {
  const PixelRect r = pixel_rect(box);
  for (int x = r.x0; x <= r.x1; ++x) {
    put(img, r.y0, x, color);
    put(img, r.y1, x, color);
  }
  for (int y = r.y0; y <= r.y1; ++y) {
    put(img, y, r.x0, color);
    put(img, y, r.x1, color);
  }
}

void draw_text(RgbImage& img, int top, int left, const std::string& text, const Rgb& color) {
  int x = left;
  for (const char ch : text) {
    const int g = ch == '.' ? 10 : ch - '0';
    if (g < 0 || g > 10) continue;
    for (int row = 0; row < kGlyphH; ++row) {
      for (int col = 0; col < kGlyphW; ++col) {
        if (kGlyphs[g][row] & (4 >> col)) put(img, top + row, x + col, color);
      }
    }
    x += kGlyphW + 1;
  }
}

}  // namespace

RgbImage compose_overlay(const GrayImage& image, std::span<const InstanceLabel> ground_truths,
                         std::span<const Prediction> predictions) {
  RgbImage out(image.height, image.width);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    std::fill_n(&out.pixels[i * 3], 3, image.pixels[i]);
  }
  for (const auto& gt : ground_truths) draw_rect(out, gt.bbox, kGroundTruthColor);
  for (const auto& p : predictions) {
    draw_rect(out, p.bbox, kPredictionColor);
    char caption[16];
    std::snprintf(caption, sizeof caption, "%.2f", std::clamp(p.score, 0.0, 1.0));
    const PixelRect r = pixel_rect(p.bbox);
    const int top = r.y0 - kGlyphH - 1 >= 0 ? r.y0 - kGlyphH - 1 : r.y0 + 2;
    draw_text(out, top, r.x0, caption, kPredictionColor);
  }
  return out;
}

void render_overlay(const GrayImage& image, std::span<const InstanceLabel> ground_truths,
                    std::span<const Prediction> predictions, const std::filesystem::path& path) {
  write_png_rgb(compose_overlay(image, ground_truths, predictions), path);
}

}  // namespace ndi
