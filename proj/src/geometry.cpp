// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace ndi {
namespace {

// First column whose centre is >= x.
int first_center_at_or_after(double x) { return static_cast<int>(std::ceil(x - 0.5)); }

void fill_ring(const Polygon& ring, Mask& mask) {
  if (ring.size() < 3) return;
  std::vector<double> xs;
  for (int r = 0; r < mask.height; ++r) {
    const double y = r + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point& a = ring[i];
      const Point& b = ring[(i + 1) % ring.size()];
      if ((a.y <= y) != (b.y <= y)) {
        xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int c0 = std::max(0, first_center_at_or_after(xs[k]));
      const int c1 = std::min(mask.width, first_center_at_or_after(xs[k + 1]));
      for (int c = c0; c < c1; ++c) mask.set(r, c);
    }
  }
}

// Directions on the corner lattice: east, south, west, north (screen frame).
constexpr std::array<int, 4> kDx = {1, 0, -1, 0};
constexpr std::array<int, 4> kDy = {0, 1, 0, -1};

}  // namespace

std::size_t mask_area(const Mask& mask) {
  return static_cast<std::size_t>(std::count(mask.bits.begin(), mask.bits.end(), std::uint8_t{1}));
}

std::optional<Box> mask_bounds(const Mask& mask) {
  int rmin = mask.height, rmax = -1, cmin = mask.width, cmax = -1;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c)) continue;
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
  }
  if (rmax < 0) return std::nullopt;
  return Box{static_cast<double>(cmin), static_cast<double>(rmin),
             static_cast<double>(cmax - cmin + 1), static_cast<double>(rmax - rmin + 1)};
}

Mask box_mask(const Box& box, int height, int width) {
  Mask mask(height, width);
  const int c0 = std::max(0, first_center_at_or_after(box.x));
  const int c1 = std::min(width, first_center_at_or_after(box.right()));
  const int r0 = std::max(0, first_center_at_or_after(box.y));
  const int r1 = std::min(height, first_center_at_or_after(box.bottom()));
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) mask.set(r, c);
  }
  return mask;
}

Mask rasterize(const std::vector<Polygon>& rings, int height, int width) {
  Mask mask(height, width);
  for (const auto& ring : rings) {
    Mask part(height, width);
    fill_ring(ring, part);
    for (std::size_t i = 0; i < part.bits.size(); ++i) mask.bits[i] |= part.bits[i];
  }
  return mask;
}

Mask rasterize(const Polygon& ring, int height, int width) {
  Mask mask(height, width);
  fill_ring(ring, mask);
  return mask;
}

std::optional<Box> polygon_bounds(const Polygon& ring) {
  if (ring.empty()) return std::nullopt;
  double x0 = ring.front().x, x1 = x0, y0 = ring.front().y, y1 = y0;
  for (const auto& p : ring) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return Box{x0, y0, x1 - x0, y1 - y0};
}

double polygon_area(const Polygon& ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % ring.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

Polygon trace_outline(const Mask& mask) {
  const int w = mask.width;
  const int h = mask.height;
  const int stride = w + 1;
  auto inside = [&](int r, int c) { return r >= 0 && r < h && c >= 0 && c < w && mask.at(r, c); };

  // Boundary cracks, directed so the region lies on the right-hand side.
  // A corner carries at most two outgoing cracks (the diagonal pinch case).
  std::vector<std::array<std::int8_t, 2>> out(static_cast<std::size_t>(stride) * (h + 1),
                                              {std::int8_t{-1}, std::int8_t{-1}});
  auto add = [&](int x, int y, int dir) {
    auto& slots = out[static_cast<std::size_t>(y) * stride + x];
    slots[slots[0] < 0 ? 0 : 1] = static_cast<std::int8_t>(dir);
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      if (!inside(r - 1, c)) add(c, r, 0);
      if (!inside(r, c + 1)) add(c + 1, r, 1);
      if (!inside(r + 1, c)) add(c + 1, r + 1, 2);
      if (!inside(r, c - 1)) add(c, r + 1, 3);
    }
  }

  std::vector<std::array<bool, 2>> used(out.size(), {false, false});
  auto slot_of = [&](std::size_t v, int dir) { return out[v][0] == dir ? 0 : 1; };

  Polygon best;
  double best_area = 0.0;
  for (int y = 0; y <= h; ++y) {
    for (int x = 0; x <= w; ++x) {
      const std::size_t start_v = static_cast<std::size_t>(y) * stride + x;
      for (int slot = 0; slot < 2; ++slot) {
        const int start_dir = out[start_v][slot];
        if (start_dir < 0 || used[start_v][slot]) continue;

        Polygon loop;
        double twice_area = 0.0;
        int cx = x, cy = y, dir = start_dir, prev_dir = -1;
        for (;;) {
          const std::size_t v = static_cast<std::size_t>(cy) * stride + cx;
          const int s = slot_of(v, dir);
          if (used[v][s]) break;  // closed
          used[v][s] = true;
          if (dir != prev_dir) loop.push_back({static_cast<double>(cx), static_cast<double>(cy)});
          const int nx = cx + kDx[dir];
          const int ny = cy + kDy[dir];
          twice_area += static_cast<double>(cx) * ny - static_cast<double>(nx) * cy;
          prev_dir = dir;
          cx = nx;
          cy = ny;
          const auto& next = out[static_cast<std::size_t>(cy) * stride + cx];
          const int left = (dir + 3) % 4;
          if (next[1] >= 0) {
            // Pinch: turning left keeps diagonal neighbours in one outline.
            dir = (next[0] == left || next[1] == left) ? left : next[0];
          } else {
            dir = next[0];
          }
        }
        // The start vertex is redundant when the loop closes on a straight run.
        if (loop.size() > 1 && prev_dir == start_dir) loop.erase(loop.begin());
        if (twice_area / 2.0 > best_area) {
          best_area = twice_area / 2.0;
          best = std::move(loop);
        }
      }
    }
  }
  return best;
}

}  // namespace ndi
