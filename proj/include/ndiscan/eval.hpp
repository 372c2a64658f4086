// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Instance-detection evaluation in the COCO style:
//   * greedy matching in descending score order, each prediction taking the
//     unmatched ground truth of highest IoU >= threshold (lower index on ties),
//   * a global precision/recall sweep over all images, ties in score broken by
//     (image_id, prediction input index),
//   * 101-point interpolated AP: the mean over r in {0, 0.01, ..., 1} of the
//     best precision reached at recall >= r (0 if never reached). Recall
//     comparisons are done in integers (100 * tp >= k * num_gt) and the 101
//     values are summed in ascending r before dividing by 101.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ndiscan/annotate.hpp"
#include "ndiscan/detect.hpp"
#include "ndiscan/geometry.hpp"
#include "ndiscan/instance_label.hpp"
#include "ndiscan/reduce.hpp"

namespace ndi {

enum class IouMode { kBox, kMask };

inline constexpr std::array<double, 2> kReportThresholds = {0.50, 0.75};
inline constexpr int kRecallBins = 101;

// Throws ValidationError when either box has non-positive area.
double iou_box(const Box& a, const Box& b);

// Throws ValidationError on mismatched dimensions or when both masks are empty.
double iou_mask(const Mask& a, const Mask& b);

// Mask of a prediction: its raster, else its polygons, else its box.
Mask prediction_mask(const Prediction& p, int height, int width);

// ious[p][g] for every prediction/ground-truth pair of one image.
std::vector<std::vector<double>> iou_matrix(std::span<const Prediction> predictions,
                                            std::span<const InstanceLabel> ground_truths,
                                            IouMode mode, ImageSize size);

struct PredictionMatch {
  int prediction_index = 0;         // index in the image's input order
  std::optional<int> ground_truth;  // matched ground-truth index
  double iou = 0.0;                 // IoU with the match, or best IoU if unmatched
  double score = 0.0;
};

struct MatchResult {
  int image_id = 0;
  std::vector<PredictionMatch> matches;  // in matching (score) order
  int num_ground_truths = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

// Greedy matching on a precomputed IoU matrix. `scores` and `ious` rows are
// in prediction input order. Throws ValidationError unless 0 < threshold <= 1.
MatchResult match_with_ious(int image_id, std::span<const double> scores,
                            const std::vector<std::vector<double>>& ious, int num_ground_truths,
                            double threshold);

MatchResult match_predictions(std::span<const Prediction> predictions,
                              std::span<const InstanceLabel> ground_truths, double threshold,
                              IouMode mode, ImageSize size);

struct PrPoint {
  double score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct ApResult {
  double ap = 0.0;
  std::vector<PrPoint> curve;  // one point per prediction in sweep order
  std::vector<double> interpolated;  // kRecallBins values
  int num_ground_truths = 0;
  int tp = 0;
  int fp = 0;
};

// Throws UndefinedMetricError when there are no ground truths.
ApResult average_precision_curve(std::span<const MatchResult> per_image);
double average_precision(std::span<const MatchResult> per_image);

struct ThresholdReport {
  double threshold = 0.0;
  ApResult ap;
  std::vector<MatchResult> per_image;
  double recall() const;
  double precision() const;
};

struct RecallAtScore {
  double min_score = 0.0;
  double recall = 0.0;  // at IoU 0.5
};

struct EvalReport {
  std::string dataset;
  std::string results;
  IouMode mode = IouMode::kBox;
  std::vector<ThresholdReport> thresholds;  // 0.50 then 0.75
  std::vector<RecallAtScore> recall_at_score;
  int num_images = 0;
  int num_predictions = 0;

  const ThresholdReport& at(double threshold) const;
};

// Throws ValidationError when a prediction names an image not in the dataset
// or its box leaves the image.
EvalReport evaluate_dataset(const CocoDataset& dataset, const std::vector<Prediction>& predictions,
                            IouMode mode);

EvalReport evaluate(const std::filesystem::path& coco_path,
                    const std::filesystem::path& results_path, IouMode mode);

// Results file: JSON array of {image_id, category_id, bbox, score,
// segmentation?} in COCO results convention.
void write_results(const std::vector<Prediction>& predictions, const std::filesystem::path& path);
// Throws ValidationError naming the offending record index.
std::vector<Prediction> read_results(const std::filesystem::path& path);

nlohmann::ordered_json report_to_json(const EvalReport& report);
void write_report(const EvalReport& report, const std::filesystem::path& path);

struct SummaryRow {
  std::string name;
  double map50 = 0.0;
  double map75 = 0.0;
  double wall_seconds = 0.0;
};

// Fixed-width table: Name, mAP50, mAP75, Time (s). mAP values in percent.
std::string format_summary_table(std::span<const SummaryRow> rows);

}  // namespace ndi
