// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "ndiscan/errors.hpp"

namespace ndi {
namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dy, dx);
    }
  }
  return offsets;
}

// erode: all in-image neighbours set; dilate: any in-image neighbour set.
Mask morph(const Mask& mask, int radius, bool erosion) {
  if (radius <= 0) return mask;
  const auto offsets = disk_offsets(radius);
  Mask out(mask.height, mask.width);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      bool v = erosion;
      for (const auto& [dy, dx] : offsets) {
        const int rr = r + dy;
        const int cc = c + dx;
        if (rr < 0 || rr >= mask.height || cc < 0 || cc >= mask.width) continue;
        if (mask.at(rr, cc) != erosion) {
          v = !erosion;
          break;
        }
      }
      out.set(r, c, v);
    }
  }
  return out;
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

void validate_params(const DetectorParams& params) {
  if (params.min_area < 1) throw ValidationError("min_area must be >= 1");
  if (params.morphology_radius < 0) throw ValidationError("morphology_radius must be >= 0");
  if (params.threshold_mode == ThresholdMode::kPercentile &&
      !(params.percentile > 0.0 && params.percentile < 100.0)) {
    throw ValidationError("percentile must be in (0, 100)");
  }
}

int otsu_threshold(const GrayImage& image) {
  std::array<double, 256> hist{};
  for (const auto p : image.pixels) hist[p] += 1.0;
  const double total = static_cast<double>(image.pixels.size());
  double sum_all = 0.0;
  for (int v = 0; v < 256; ++v) sum_all += v * hist[v];

  double w0 = 0.0;
  double sum0 = 0.0;
  double best = -1.0;
  int best_t = 0;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[t];
    sum0 += t * hist[t];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

int percentile_threshold(const GrayImage& image, double percentile) {
  std::array<std::size_t, 256> hist{};
  for (const auto p : image.pixels) ++hist[p];
  const auto rank = static_cast<std::size_t>(
      std::floor(percentile / 100.0 * static_cast<double>(image.pixels.size() - 1)));
  std::size_t seen = 0;
  for (int v = 0; v < 256; ++v) {
    seen += hist[v];
    if (seen > rank) return v;
  }
  return 255;
}

Mask erode(const Mask& mask, int radius) { return morph(mask, radius, true); }
Mask dilate(const Mask& mask, int radius) { return morph(mask, radius, false); }

Components label_components(const Mask& mask) {
  const int h = mask.height;
  const int w = mask.width;
  std::vector<int> provisional(static_cast<std::size_t>(h) * w, 0);
  std::vector<int> parent{0};

  // First pass: provisional labels from the four already-visited neighbours.
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      int label = 0;
      constexpr std::array<std::pair<int, int>, 4> kPrior = {{{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}}};
      for (const auto& [dy, dx] : kPrior) {
        const int rr = r + dy;
        const int cc = c + dx;
        if (rr < 0 || cc < 0 || cc >= w) continue;
        const int other = provisional[static_cast<std::size_t>(rr) * w + cc];
        if (other == 0) continue;
        if (label == 0) {
          label = other;
        } else {
          const int a = find_root(parent, label);
          const int b = find_root(parent, other);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
      if (label == 0) {
        label = static_cast<int>(parent.size());
        parent.push_back(label);
      }
      provisional[static_cast<std::size_t>(r) * w + c] = label;
    }
  }

  // Second pass: resolve to dense labels in raster order of first pixel.
  Components out;
  out.labels.assign(provisional.size(), 0);
  std::vector<int> dense(parent.size(), 0);
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    if (provisional[i] == 0) continue;
    const int root = find_root(parent, provisional[i]);
    if (dense[root] == 0) dense[root] = ++out.count;
    out.labels[i] = dense[root];
  }
  return out;
}

std::vector<Prediction> detect(const GrayImage& image, const DetectorParams& params) {
  validate_params(params);
  if (image.pixels.empty()) return {};
  const auto [lo, hi] = std::minmax_element(image.pixels.begin(), image.pixels.end());
  if (*lo == *hi) return {};

  const int threshold = params.threshold_mode == ThresholdMode::kOtsu
                            ? otsu_threshold(image)
                            : percentile_threshold(image, params.percentile);
  Mask fg(image.height, image.width);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const bool dark = image.pixels[i] <= threshold;
    fg.bits[i] = (params.polarity == Polarity::kDark ? dark : !dark) ? 1 : 0;
  }
  const int r = params.morphology_radius;
  fg = erode(dilate(dilate(erode(fg, r), r), r), r);  // open, then close

  const Components comps = label_components(fg);
  if (comps.count == 0) return {};

  std::vector<double> sum(comps.count + 1, 0.0);
  std::vector<std::size_t> area(comps.count + 1, 0);
  for (std::size_t i = 0; i < comps.labels.size(); ++i) {
    sum[comps.labels[i]] += image.pixels[i];
    ++area[comps.labels[i]];
  }
  const double background = area[0] > 0 ? sum[0] / static_cast<double>(area[0]) : 0.0;

  std::vector<Prediction> predictions;
  for (int label = 1; label <= comps.count; ++label) {
    if (area[label] < static_cast<std::size_t>(params.min_area)) continue;
    Mask m(image.height, image.width);
    for (std::size_t i = 0; i < comps.labels.size(); ++i) {
      if (comps.labels[i] == label) m.bits[i] = 1;
    }
    Prediction p;
    p.bbox = *mask_bounds(m);
    p.segmentation.push_back(trace_outline(m));
    const double mean = sum[label] / static_cast<double>(area[label]);
    p.score = area[0] > 0 ? std::clamp(std::abs(mean - background) / 255.0, 0.0, 1.0) : 0.0;
    p.mask = std::move(m);
    predictions.push_back(std::move(p));
  }
  std::stable_sort(predictions.begin(), predictions.end(),
                   [](const Prediction& a, const Prediction& b) { return a.score > b.score; });
  return predictions;
}

}  // namespace ndi
