// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Classical baseline detector for variance images: global threshold,
// morphological open/close, 8-connected component labeling.

#pragma once

#include <optional>
#include <vector>

#include "ndiscan/geometry.hpp"
#include "ndiscan/scan_volume.hpp"

namespace ndi {

struct Prediction {
  int image_id = 0;
  Box bbox;
  std::optional<Mask> mask;
  std::vector<Polygon> segmentation;
  double score = 0.0;
};

enum class ThresholdMode { kOtsu, kPercentile };

// Which side of the threshold is foreground. Inserts shadow the back wall and
// lower the variance, so defects are dark by default.
enum class Polarity { kDark, kBright };

struct DetectorParams {
  ThresholdMode threshold_mode = ThresholdMode::kOtsu;
  double percentile = 10.0;  // used in kPercentile mode, 0 < p < 100
  int min_area = 16;
  int morphology_radius = 1;
  Polarity polarity = Polarity::kDark;
};

void validate_params(const DetectorParams& params);

// Otsu's threshold: the t maximizing between-class variance of {<= t} and
// {> t}; the smallest such t on ties. Returns 0 for a constant image.
int otsu_threshold(const GrayImage& image);

// Value at rank floor(p / 100 * (N - 1)) of the sorted pixels.
int percentile_threshold(const GrayImage& image, double percentile);

// Disk structuring element of the given radius; out-of-image neighbours are
// ignored. Radius 0 is the identity.
Mask erode(const Mask& mask, int radius);
Mask dilate(const Mask& mask, int radius);

struct Components {
  int count = 0;
  std::vector<int> labels;  // 0 = background, components numbered 1..count in raster order
};

Components label_components(const Mask& mask);

// Throws ValidationError on invalid params. Predictions come back sorted by
// descending score (ties keep raster order); image_id is left at 0.
std::vector<Prediction> detect(const GrayImage& image, const DetectorParams& params);

}  // namespace ndi
