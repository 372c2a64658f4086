// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/reduce.hpp"

#include <algorithm>
#include <cmath>

#include "ndiscan/errors.hpp"
#include "ndiscan/parallel.hpp"

namespace ndi {

VarianceMap variance_reduce(const ScanVolume& volume) {
  VarianceMap map{volume.height(), volume.width(),
                  std::vector<double>(static_cast<std::size_t>(volume.height()) * volume.width())};
  const double n = volume.samples();
  parallel_for(volume.height(), [&](int row) {
    for (int col = 0; col < volume.width(); ++col) {
      const auto samples = volume.ascan(row, col);
      const double shift = samples[0];
      double sum = 0.0;
      double sum_sq = 0.0;
      for (const float s : samples) {
        const double d = static_cast<double>(s) - shift;
        sum += d;
        sum_sq += d * d;
      }
      const double var = (sum_sq - sum * sum / n) / n;
      map.values[static_cast<std::size_t>(row) * volume.width() + col] = std::max(0.0, var);
    }
  });
  return map;
}

GrayImage normalize_to_gray(const VarianceMap& map) {
  GrayImage image(map.height, map.width);
  if (map.values.empty()) return image;
  const auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) return image;
  const double scale = 255.0 / (hi - lo);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const long v = std::lround((map.values[i] - lo) * scale);
    image.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
  }
  return image;
}

GrayImage resize(const GrayImage& image, int target_height, int target_width) {
  if (target_height < 1 || target_width < 1) {
    throw ValidationError("resize target must be at least 1x1");
  }
  GrayImage out(target_height, target_width);
  auto source_coord = [](int i, int src, int dst) {
    return dst == 1 ? 0.0 : static_cast<double>(i) * (src - 1) / (dst - 1);
  };
  for (int r = 0; r < target_height; ++r) {
    const double sy = source_coord(r, image.height, target_height);
    const int y0 = std::min(static_cast<int>(sy), image.height - 1);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double fy = sy - y0;
    for (int c = 0; c < target_width; ++c) {
      const double sx = source_coord(c, image.width, target_width);
      const int x0 = std::min(static_cast<int>(sx), image.width - 1);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double fx = sx - x0;
      const double top = image.at(y0, x0) * (1.0 - fx) + image.at(y0, x1) * fx;
      const double bottom = image.at(y1, x0) * (1.0 - fx) + image.at(y1, x1) * fx;
      const long v = std::lround(top * (1.0 - fy) + bottom * fy);
      out.at(r, c) = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
    }
  }
  return out;
}

std::vector<InstanceLabel> scale_labels(const std::vector<InstanceLabel>& labels, ImageSize from,
                                        ImageSize to) {
  if (from.height < 1 || from.width < 1 || to.height < 1 || to.width < 1) {
    throw ValidationError("label frames must be at least 1x1");
  }
  const double sx = static_cast<double>(to.width) / from.width;
  const double sy = static_cast<double>(to.height) / from.height;
  std::vector<InstanceLabel> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    validate_label(label, from.width, from.height);
    InstanceLabel scaled = label;
    scaled.bbox = Box{label.bbox.x * sx, label.bbox.y * sy, label.bbox.w * sx, label.bbox.h * sy};
    for (auto& p : scaled.polygon) p = Point{p.x * sx, p.y * sy};
    out.push_back(std::move(scaled));
  }
  return out;
}

}  // namespace ndi
