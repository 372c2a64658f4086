// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ndiscan/errors.hpp"
#include "ndiscan/json_io.hpp"

namespace ndi {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kEdgeEpsilon = 1e-6;
constexpr std::array<double, 4> kRecallScoreCutoffs = {0.0, 0.25, 0.5, 0.75};

void require_positive_area(const Box& b) {
  if (!(b.w > 0.0) || !(b.h > 0.0) || !std::isfinite(b.x) || !std::isfinite(b.y) ||
      !std::isfinite(b.w) || !std::isfinite(b.h)) {
    throw ValidationError("IoU needs boxes with positive area");
  }
}

std::size_t count_set(const Mask& m) {
  return static_cast<std::size_t>(std::count(m.bits.begin(), m.bits.end(), std::uint8_t{1}));
}

double mask_iou_or_zero(const Mask& a, const Mask& b) {
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    inter += a.bits[i] & b.bits[i];
    uni += a.bits[i] | b.bits[i];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::string threshold_key(double t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", t);
  return buf;
}

}  // namespace

double iou_box(const Box& a, const Box& b) {
  require_positive_area(a);
  require_positive_area(b);
  // Areas from corner differences so containment yields exactly 1.
  const double aw = a.right() - a.x, ah = a.bottom() - a.y;
  const double bw = b.right() - b.x, bh = b.bottom() - b.y;
  const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = iw * ih;
  const double uni = aw * ah + bw * bh - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_mask(const Mask& a, const Mask& b) {
  if (a.height != b.height || a.width != b.width) {
    throw ValidationError("mask IoU needs equal dimensions");
  }
  if (count_set(a) == 0 && count_set(b) == 0) {
    throw ValidationError("mask IoU is undefined for two empty masks");
  }
  return mask_iou_or_zero(a, b);
}

Mask prediction_mask(const Prediction& p, int height, int width) {
  if (p.mask && p.mask->height == height && p.mask->width == width) return *p.mask;
  if (!p.segmentation.empty()) return rasterize(p.segmentation, height, width);
  return box_mask(p.bbox, height, width);
}

std::vector<std::vector<double>> iou_matrix(std::span<const Prediction> predictions,
                                            std::span<const InstanceLabel> ground_truths,
                                            IouMode mode, ImageSize size) {
  std::vector<std::vector<double>> ious(predictions.size(),
                                        std::vector<double>(ground_truths.size(), 0.0));
  if (mode == IouMode::kBox) {
    for (std::size_t p = 0; p < predictions.size(); ++p) {
      for (std::size_t g = 0; g < ground_truths.size(); ++g) {
        ious[p][g] = iou_box(predictions[p].bbox, ground_truths[g].bbox);
      }
    }
    return ious;
  }
  std::vector<Mask> gt_masks;
  gt_masks.reserve(ground_truths.size());
  for (const auto& g : ground_truths) gt_masks.push_back(label_mask(g, size.height, size.width));
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    const Mask pm = prediction_mask(predictions[p], size.height, size.width);
    for (std::size_t g = 0; g < ground_truths.size(); ++g) {
      ious[p][g] = mask_iou_or_zero(pm, gt_masks[g]);
    }
  }
  return ious;
}

MatchResult match_with_ious(int image_id, std::span<const double> scores,
                            const std::vector<std::vector<double>>& ious, int num_ground_truths,
                            double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ValidationError("IoU threshold must be in (0, 1]");
  }
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });

  MatchResult result;
  result.image_id = image_id;
  result.num_ground_truths = num_ground_truths;
  std::vector<bool> taken(num_ground_truths, false);
  for (const int p : order) {
    PredictionMatch m{p, std::nullopt, 0.0, scores[p]};
    double best = -1.0;
    for (int g = 0; g < num_ground_truths; ++g) {
      const double iou = ious[p][g];
      m.iou = std::max(m.iou, iou);
      if (taken[g] || iou < threshold || iou <= best) continue;
      best = iou;
      m.ground_truth = g;
    }
    if (m.ground_truth) {
      taken[*m.ground_truth] = true;
      m.iou = best;
      ++result.tp;
    } else {
      ++result.fp;
    }
    result.matches.push_back(m);
  }
  result.fn = num_ground_truths - result.tp;
  return result;
}

MatchResult match_predictions(std::span<const Prediction> predictions,
                              std::span<const InstanceLabel> ground_truths, double threshold,
                              IouMode mode, ImageSize size) {
  std::vector<double> scores;
  scores.reserve(predictions.size());
  for (const auto& p : predictions) scores.push_back(p.score);
  const int image_id = predictions.empty()
                           ? (ground_truths.empty() ? 0 : ground_truths.front().image_id)
                           : predictions.front().image_id;
  return match_with_ious(image_id, scores, iou_matrix(predictions, ground_truths, mode, size),
                         static_cast<int>(ground_truths.size()), threshold);
}

ApResult average_precision_curve(std::span<const MatchResult> per_image) {
  struct Entry {
    double score;
    int image_id;
    int prediction_index;
    bool tp;
  };
  std::vector<Entry> entries;
  ApResult out;
  for (const auto& image : per_image) {
    out.num_ground_truths += image.num_ground_truths;
    for (const auto& m : image.matches) {
      entries.push_back({m.score, image.image_id, m.prediction_index, m.ground_truth.has_value()});
    }
  }
  if (out.num_ground_truths == 0) {
    throw UndefinedMetricError("average precision is undefined without ground truths");
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.image_id != b.image_id) return a.image_id < b.image_id;
    return a.prediction_index < b.prediction_index;
  });

  const long long npos = out.num_ground_truths;
  std::vector<long long> cum_tp(entries.size());
  std::vector<double> envelope(entries.size());
  long long tp = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].tp) ++tp;
    cum_tp[i] = tp;
    const double precision = static_cast<double>(tp) / static_cast<double>(i + 1);
    envelope[i] = precision;
    out.curve.push_back({entries[i].score, precision, static_cast<double>(tp) / static_cast<double>(npos)});
  }
  out.tp = static_cast<int>(tp);
  out.fp = static_cast<int>(entries.size()) - out.tp;
  for (std::size_t i = entries.size(); i-- > 1;) envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);

  out.interpolated.assign(kRecallBins, 0.0);
  double sum = 0.0;
  std::size_t i = 0;
  for (int k = 0; k < kRecallBins; ++k) {
    // First sweep position whose recall reaches k / 100.
    while (i < entries.size() && 100 * cum_tp[i] < k * npos) ++i;
    out.interpolated[k] = i < entries.size() ? envelope[i] : 0.0;
    sum += out.interpolated[k];
  }
  out.ap = sum / kRecallBins;
  return out;
}

double average_precision(std::span<const MatchResult> per_image) {
  return average_precision_curve(per_image).ap;
}

double ThresholdReport::recall() const {
  return ap.num_ground_truths == 0 ? 0.0 : static_cast<double>(ap.tp) / ap.num_ground_truths;
}

double ThresholdReport::precision() const {
  const int n = ap.tp + ap.fp;
  return n == 0 ? 0.0 : static_cast<double>(ap.tp) / n;
}

const ThresholdReport& EvalReport::at(double threshold) const {
  for (const auto& t : thresholds) {
    if (t.threshold == threshold) return t;
  }
  throw ValidationError("report has no IoU threshold " + threshold_key(threshold));
}

EvalReport evaluate_dataset(const CocoDataset& dataset, const std::vector<Prediction>& predictions,
                            IouMode mode) {
  std::map<int, std::vector<Prediction>> preds_by_image;
  std::map<int, std::vector<InstanceLabel>> gts_by_image;
  std::map<int, const ImageRecord*> images;
  for (const auto& im : dataset.images) images[im.image_id] = &im;
  for (const auto& l : dataset.labels) gts_by_image[l.image_id].push_back(l);

  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Prediction& p = predictions[i];
    const auto it = images.find(p.image_id);
    const std::string where = "prediction " + std::to_string(i);
    if (it == images.end()) {
      throw ValidationError(where + " references image " + std::to_string(p.image_id) +
                            " which is not in the dataset");
    }
    const Box& b = p.bbox;
    if (!(b.w > 0.0) || !(b.h > 0.0) || b.x < -kEdgeEpsilon || b.y < -kEdgeEpsilon ||
        b.right() > it->second->width + kEdgeEpsilon || b.bottom() > it->second->height + kEdgeEpsilon) {
      throw ValidationError(where + " (image " + std::to_string(p.image_id) +
                            ") has a box outside the image");
    }
    if (!(p.score >= 0.0 && p.score <= 1.0)) {
      throw ValidationError(where + " has a score outside [0, 1]");
    }
    preds_by_image[p.image_id].push_back(p);
  }

  EvalReport report;
  report.mode = mode;
  report.num_images = static_cast<int>(dataset.images.size());
  report.num_predictions = static_cast<int>(predictions.size());
  for (const double t : kReportThresholds) report.thresholds.push_back(ThresholdReport{t, {}, {}});

  for (const auto& im : dataset.images) {
    const auto& preds = preds_by_image[im.image_id];
    const auto& gts = gts_by_image[im.image_id];
    const auto ious = iou_matrix(preds, gts, mode, ImageSize{im.height, im.width});
    std::vector<double> scores;
    for (const auto& p : preds) scores.push_back(p.score);
    for (auto& t : report.thresholds) {
      t.per_image.push_back(
          match_with_ious(im.image_id, scores, ious, static_cast<int>(gts.size()), t.threshold));
    }
  }
  for (auto& t : report.thresholds) t.ap = average_precision_curve(t.per_image);

  const ThresholdReport& loose = report.at(0.50);
  for (const double cutoff : kRecallScoreCutoffs) {
    int hits = 0;
    for (const auto& image : loose.per_image) {
      for (const auto& m : image.matches) {
        if (m.ground_truth && m.score >= cutoff) ++hits;
      }
    }
    report.recall_at_score.push_back(
        {cutoff, static_cast<double>(hits) / loose.ap.num_ground_truths});
  }
  return report;
}

EvalReport evaluate(const std::filesystem::path& coco_path,
                    const std::filesystem::path& results_path, IouMode mode) {
  const CocoDataset dataset = read_coco(coco_path);
  const std::vector<Prediction> predictions = read_results(results_path);
  EvalReport report = evaluate_dataset(dataset, predictions, mode);
  report.dataset = coco_path.string();
  report.results = results_path.string();
  return report;
}

void write_results(const std::vector<Prediction>& predictions, const std::filesystem::path& path) {
  ordered_json doc = ordered_json::array();
  for (const auto& p : predictions) {
    ordered_json rec{{"image_id", p.image_id},
                     {"category_id", kDefectCategoryId},
                     {"bbox", {p.bbox.x, p.bbox.y, p.bbox.w, p.bbox.h}},
                     {"score", p.score}};
    if (!p.segmentation.empty()) {
      ordered_json rings = ordered_json::array();
      for (const auto& ring : p.segmentation) {
        ordered_json flat = ordered_json::array();
        for (const auto& v : ring) {
          flat.push_back(v.x);
          flat.push_back(v.y);
        }
        rings.push_back(std::move(flat));
      }
      rec["segmentation"] = std::move(rings);
    }
    doc.push_back(std::move(rec));
  }
  write_json_file(path, doc);
}

std::vector<Prediction> read_results(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (!doc.is_array()) throw ValidationError(path.string() + ": results must be a JSON array");
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& rec = doc[i];
    const std::string where = path.string() + ": result " + std::to_string(i);
    try {
      Prediction p;
      p.image_id = rec.at("image_id").get<int>();
      const int category = rec.value("category_id", kDefectCategoryId);
      if (category != kDefectCategoryId) {
        throw ValidationError(where + " has unknown category id " + std::to_string(category));
      }
      const auto& b = rec.at("bbox");
      if (!b.is_array() || b.size() != 4) throw ValidationError(where + " bbox must have 4 numbers");
      p.bbox = Box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
      if (!(p.bbox.w > 0.0) || !(p.bbox.h > 0.0)) throw ValidationError(where + " has an empty bbox");
      p.score = rec.at("score").get<double>();
      if (!std::isfinite(p.score) || p.score < 0.0 || p.score > 1.0) {
        throw ValidationError(where + " score must be in [0, 1]");
      }
      if (rec.contains("segmentation")) {
        const auto& seg = rec["segmentation"];
        if (!seg.is_array()) throw ValidationError(where + " segmentation must be a list of polygons");
        for (const auto& ring : seg) {
          if (!ring.is_array() || ring.size() < 6 || ring.size() % 2 != 0) {
            throw ValidationError(where + " polygon needs an even number (>= 6) of coordinates");
          }
          Polygon poly;
          for (std::size_t k = 0; k < ring.size(); k += 2) {
            poly.push_back({ring[k].get<double>(), ring[k + 1].get<double>()});
          }
          p.segmentation.push_back(std::move(poly));
        }
      }
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return out;
}

ordered_json report_to_json(const EvalReport& report) {
  ordered_json doc;
  doc["dataset"] = report.dataset;
  doc["results"] = report.results;
  doc["mode"] = report.mode == IouMode::kBox ? "box" : "mask";
  doc["num_images"] = report.num_images;
  doc["num_predictions"] = report.num_predictions;
  doc["metrics"] = ordered_json{{"mAP50", report.at(0.50).ap.ap}, {"mAP75", report.at(0.75).ap.ap}};

  doc["thresholds"] = ordered_json::array();
  for (const auto& t : report.thresholds) {
    ordered_json curve = ordered_json::array();
    for (const auto& p : t.ap.curve) {
      curve.push_back(ordered_json{{"score", p.score}, {"precision", p.precision}, {"recall", p.recall}});
    }
    int fn = 0;
    for (const auto& im : t.per_image) fn += im.fn;
    doc["thresholds"].push_back(ordered_json{{"iou", t.threshold},
                                             {"ap", t.ap.ap},
                                             {"tp", t.ap.tp},
                                             {"fp", t.ap.fp},
                                             {"fn", fn},
                                             {"precision", t.precision()},
                                             {"recall", t.recall()},
                                             {"interpolated_precision", t.ap.interpolated},
                                             {"pr_curve", std::move(curve)}});
  }

  doc["recall_at_score"] = ordered_json::array();
  for (const auto& r : report.recall_at_score) {
    doc["recall_at_score"].push_back(ordered_json{{"min_score", r.min_score}, {"recall", r.recall}});
  }

  doc["per_image"] = ordered_json::array();
  for (std::size_t i = 0; i < static_cast<std::size_t>(report.num_images) && !report.thresholds.empty();
       ++i) {
    ordered_json entry;
    entry["image_id"] = report.thresholds.front().per_image[i].image_id;
    entry["num_ground_truths"] = report.thresholds.front().per_image[i].num_ground_truths;
    ordered_json by_threshold;
    for (const auto& t : report.thresholds) {
      ordered_json matches = ordered_json::array();
      for (const auto& m : t.per_image[i].matches) {
        matches.push_back(ordered_json{
            {"prediction", m.prediction_index},
            {"ground_truth", m.ground_truth ? ordered_json(*m.ground_truth) : ordered_json(nullptr)},
            {"iou", m.iou},
            {"score", m.score}});
      }
      by_threshold[threshold_key(t.threshold)] = std::move(matches);
    }
    entry["matches"] = std::move(by_threshold);
    doc["per_image"].push_back(std::move(entry));
  }
  return doc;
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  write_json_file(path, report_to_json(report));
}

std::string format_summary_table(std::span<const SummaryRow> rows) {
  std::size_t name_width = 4;
  for (const auto& r : rows) name_width = std::max(name_width, r.name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %8s  %8s  %9s\n", static_cast<int>(name_width), "Name",
                "mAP50", "mAP75", "Time (s)");
  out += buf;
  out += std::string(name_width + 2 + 8 + 2 + 8 + 2 + 9, '-') + "\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %7.2f%%  %7.2f%%  %9.2f\n", static_cast<int>(name_width),
                  r.name.c_str(), 100.0 * r.map50, 100.0 * r.map75, r.wall_seconds);
    out += buf;
  }
  return out;
}

}  // namespace ndi
