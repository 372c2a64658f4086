// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "ndiscan/geometry.hpp"

namespace ndi {

inline constexpr int kDefectCategoryId = 1;
inline constexpr std::string_view kDefectCategoryName = "defect";

// One ground-truth defect instance. Coordinates are in the pixel frame of the
// image identified by `image_id`; every label has the single "defect"
// category. An empty polygon means the instance carries only a box.
struct InstanceLabel {
  int image_id = 0;
  Box bbox;
  Polygon polygon;

  friend bool operator==(const InstanceLabel&, const InstanceLabel&) = default;
};

// Pixel mask of the instance: the polygon fill, or the box when there is no
// polygon.
Mask label_mask(const InstanceLabel& label, int height, int width);

// Throws ValidationError if the box is empty or leaves the image, or if the
// polygon's bounding rectangle strays more than 1 px from the box.
void validate_label(const InstanceLabel& label, int image_width, int image_height);

}  // namespace ndi
