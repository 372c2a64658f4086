// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0
//
// 3D scan to 2D training image: per-point variance over the sample axis,
// min-max normalization to 8 bits, bilinear resizing, and label rescaling.

#pragma once

#include <vector>

#include "ndiscan/instance_label.hpp"
#include "ndiscan/scan_volume.hpp"

namespace ndi {

struct ImageSize {
  int height = 0;
  int width = 0;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// Population variance (divide by S) of every point's A-scan, accumulated in
// double precision around the point's first sample.
VarianceMap variance_reduce(const ScanVolume& volume);

// Linear min-max scaling to [0, 255], rounded half away from zero. A constant
// map becomes all zeros.
GrayImage normalize_to_gray(const VarianceMap& map);

// Bilinear resize with corner-aligned sampling: destination pixel i reads
// source coordinate i * (src - 1) / (dst - 1) on each axis, so the four corner
// pixels map onto each other exactly.
GrayImage resize(const GrayImage& image, int target_height, int target_width);

// Scales boxes and polygon vertices by (to.width / from.width,
// to.height / from.height). Throws ValidationError if a label is outside the
// source frame or a target dimension is < 1.
std::vector<InstanceLabel> scale_labels(const std::vector<InstanceLabel>& labels, ImageSize from,
                                        ImageSize to);

}  // namespace ndi
