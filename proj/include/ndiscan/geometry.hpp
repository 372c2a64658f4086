// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pixel-frame geometry. Coordinates are in pixels with the origin at the
// top-left corner of the image; x grows along columns, y along rows. Pixel
// (row r, col c) covers [c, c+1) x [r, r+1) and is considered inside a shape
// when its centre (c + 0.5, r + 0.5) is.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace ndi {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

using Polygon = std::vector<Point>;

// Axis-aligned box, COCO convention: top-left corner plus extent.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  friend bool operator==(const Box&, const Box&) = default;
};

// Binary raster, one byte per pixel (0 or 1), row-major.
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int h, int w) : height(h), width(w), bits(static_cast<std::size_t>(h) * w, 0) {}

  bool at(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool v = true) {
    bits[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0;
  }
  friend bool operator==(const Mask&, const Mask&) = default;
};

std::size_t mask_area(const Mask& mask);

// Tight bounding box of the set pixels; nullopt for an empty mask.
std::optional<Box> mask_bounds(const Mask& mask);

Mask box_mask(const Box& box, int height, int width);

// Even-odd fill of each ring, unioned across rings.
Mask rasterize(const std::vector<Polygon>& rings, int height, int width);
Mask rasterize(const Polygon& ring, int height, int width);

// Bounding rectangle of the vertices; nullopt for an empty polygon.
std::optional<Box> polygon_bounds(const Polygon& ring);

// Absolute shoelace area.
double polygon_area(const Polygon& ring);

// Outer boundary of an 8-connected pixel region as a rectilinear polygon on
// pixel corners, clockwise on screen, with collinear vertices removed.
// Rasterizing the result reproduces the region with interior holes filled.
// If the mask has several 8-connected regions, the largest outline wins.
// Empty masks yield an empty polygon.
Polygon trace_outline(const Mask& mask);

}  // namespace ndi
