// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset assembly: train/val/test splitting, COCO JSON emission and parsing,
// and COCO to YOLO segmentation-label conversion. All labels live in the
// original (unresized) image frame.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ndiscan/instance_label.hpp"

namespace ndi {

struct ImageRecord {
  int image_id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  std::string panel_id;
  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct DatasetManifest {
  std::vector<ImageRecord> images;
  std::map<std::string, std::vector<int>> splits;  // split name -> image ids
  std::uint64_t seed = 0;

  const ImageRecord* find(int image_id) const;
  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

inline constexpr std::array<const char*, 3> kSplitNames = {"train", "val", "test"};

struct SplitRatios {
  double train = 56.0 / 72.0;
  double val = 8.0 / 72.0;
  double test = 8.0 / 72.0;
};

// Seeded Fisher-Yates shuffle, then contiguous train/val/test partition.
// Train and val sizes are round(ratio * n); test takes the remainder. Throws
// ValidationError on an empty list, ratios not summing to 1, or any split
// with a positive ratio ending up empty.
std::map<std::string, std::vector<int>> split_dataset(const std::vector<int>& image_ids,
                                                      const SplitRatios& ratios,
                                                      std::uint64_t seed);

// Throws ValidationError if splits overlap, miss an image, or reference an
// unknown id.
void validate_manifest(const DatasetManifest& manifest);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

struct CocoDataset {
  std::vector<ImageRecord> images;
  std::vector<InstanceLabel> labels;
  friend bool operator==(const CocoDataset&, const CocoDataset&) = default;
};

// Writes the COCO subset for the images of one split. Annotation ids run
// 1..n in (image order, label order). Throws ValidationError when a label's
// image_id is not in the manifest; labels of images outside the split are
// skipped.
void write_coco(const DatasetManifest& manifest, const std::vector<InstanceLabel>& labels,
                const std::string& split, const std::filesystem::path& path);

// Image records get their panel_id from the file-name stem. Throws
// ValidationError naming the annotation id for unknown categories, dangling
// image ids, or boxes outside their image.
CocoDataset read_coco(const std::filesystem::path& path);

// One "<file stem>.txt" per image in `out_dir`. Each instance becomes
// "0 x1 y1 x2 y2 ..." with vertices normalized by the image size, clamped to
// [0, 1] and printed with 6 decimals; box-only instances use their four
// corners. Images without instances get an empty file.
void coco_to_yolo(const std::filesystem::path& coco_path, const std::filesystem::path& out_dir);

// Parses a YOLO segmentation label file back into pixel-frame polygons.
std::vector<Polygon> read_yolo_labels(const std::filesystem::path& path, int width, int height);

}  // namespace ndi
