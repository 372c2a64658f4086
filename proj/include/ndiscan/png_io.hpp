// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ndiscan/scan_volume.hpp"

namespace ndi {

// Interleaved 8-bit RGB, row-major.
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int h, int w) : height(h), width(w), pixels(static_cast<std::size_t>(h) * w * 3, 0) {}

  std::uint8_t* at(int row, int col) { return &pixels[(static_cast<std::size_t>(row) * width + col) * 3]; }
  const std::uint8_t* at(int row, int col) const {
    return &pixels[(static_cast<std::size_t>(row) * width + col) * 3];
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

// 8-bit single-channel PNG without alpha. Output bytes depend only on the
// pixels. Failures throw IoError naming the path.
void export_png(const GrayImage& image, const std::filesystem::path& path);
GrayImage read_png_gray(const std::filesystem::path& path);

void write_png_rgb(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_png_rgb(const std::filesystem::path& path);

}  // namespace ndi
