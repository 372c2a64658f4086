// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/instance_label.hpp"

#include <cmath>
#include <string>

#include "ndiscan/errors.hpp"

namespace ndi {
namespace {

// Slack for boxes that went through floating-point rescaling.
constexpr double kEdgeEpsilon = 1e-6;

std::string box_text(const Box& b) {
  return "[" + std::to_string(b.x) + ", " + std::to_string(b.y) + ", " + std::to_string(b.w) +
         ", " + std::to_string(b.h) + "]";
}

}  // namespace

Mask label_mask(const InstanceLabel& label, int height, int width) {
  if (label.polygon.empty()) return box_mask(label.bbox, height, width);
  return rasterize(label.polygon, height, width);
}

void validate_label(const InstanceLabel& label, int image_width, int image_height) {
  const Box& b = label.bbox;
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h)) {
    throw ValidationError("bbox has non-finite coordinates");
  }
  if (!(b.w > 0.0) || !(b.h > 0.0)) throw ValidationError("bbox " + box_text(b) + " is empty");
  if (b.x < -kEdgeEpsilon || b.y < -kEdgeEpsilon || b.right() > image_width + kEdgeEpsilon ||
      b.bottom() > image_height + kEdgeEpsilon) {
    throw ValidationError("bbox " + box_text(b) + " leaves the " + std::to_string(image_width) +
                          "x" + std::to_string(image_height) + " image");
  }
  if (label.polygon.empty()) return;
  if (label.polygon.size() < 3) throw ValidationError("polygon needs at least 3 vertices");
  const Box p = *polygon_bounds(label.polygon);
  if (std::abs(p.x - b.x) > 1.0 || std::abs(p.y - b.y) > 1.0 ||
      std::abs(p.right() - b.right()) > 1.0 || std::abs(p.bottom() - b.bottom()) > 1.0) {
    throw ValidationError("polygon bounds " + box_text(p) + " disagree with bbox " + box_text(b));
  }
}

}  // namespace ndi
