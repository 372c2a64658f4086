// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ndiscan/counter_rng.hpp"
#include "ndiscan/errors.hpp"
#include "ndiscan/json_io.hpp"

namespace ndi {

using nlohmann::json;
using nlohmann::ordered_json;

const ImageRecord* DatasetManifest::find(int image_id) const {
  for (const auto& image : images) {
    if (image.image_id == image_id) return &image;
  }
  return nullptr;
}

std::map<std::string, std::vector<int>> split_dataset(const std::vector<int>& image_ids,
                                                      const SplitRatios& ratios,
                                                      std::uint64_t seed) {
  if (image_ids.empty()) throw ValidationError("cannot split an empty image list");
  const std::array<double, 3> r = {ratios.train, ratios.val, ratios.test};
  for (const double v : r) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("split ratios must be >= 0");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1");
  }

  std::vector<int> order = image_ids;
  SplitMix64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }

  // Cumulative rounding keeps the three counts summing to n.
  const double n = static_cast<double>(order.size());
  const std::size_t b1 = static_cast<std::size_t>(std::llround(r[0] * n));
  const std::size_t b2 = std::max(b1, static_cast<std::size_t>(std::llround((r[0] + r[1]) * n)));
  const std::array<std::size_t, 4> bounds = {0, b1, std::min(b2, order.size()), order.size()};

  std::map<std::string, std::vector<int>> splits;
  for (std::size_t s = 0; s < kSplitNames.size(); ++s) {
    std::vector<int> ids(order.begin() + static_cast<std::ptrdiff_t>(bounds[s]),
                         order.begin() + static_cast<std::ptrdiff_t>(bounds[s + 1]));
    if (r[s] > 0.0 && ids.empty()) {
      throw ValidationError(std::string("split '") + kSplitNames[s] + "' rounds to 0 of " +
                            std::to_string(order.size()) + " images");
    }
    splits[kSplitNames[s]] = std::move(ids);
  }
  return splits;
}

void validate_manifest(const DatasetManifest& manifest) {
  std::set<int> ids;
  for (const auto& image : manifest.images) {
    if (!ids.insert(image.image_id).second) {
      throw ValidationError("duplicate image id " + std::to_string(image.image_id));
    }
  }
  std::set<int> seen;
  for (const auto& [name, members] : manifest.splits) {
    for (const int id : members) {
      if (!ids.count(id)) {
        throw ValidationError("split '" + name + "' references unknown image " + std::to_string(id));
      }
      if (!seen.insert(id).second) {
        throw ValidationError("image " + std::to_string(id) + " appears in more than one split");
      }
    }
  }
  if (seen.size() != ids.size()) throw ValidationError("splits do not cover every image");
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  validate_manifest(manifest);
  ordered_json doc;
  doc["seed"] = manifest.seed;
  doc["images"] = ordered_json::array();
  for (const auto& im : manifest.images) {
    doc["images"].push_back(ordered_json{{"id", im.image_id},
                                         {"file_name", im.file_name},
                                         {"width", im.width},
                                         {"height", im.height},
                                         {"panel_id", im.panel_id}});
  }
  doc["splits"] = ordered_json::object();
  doc["split_sizes"] = ordered_json::object();
  for (const char* name : kSplitNames) {
    const auto it = manifest.splits.find(name);
    const std::vector<int> ids = it == manifest.splits.end() ? std::vector<int>{} : it->second;
    doc["splits"][name] = ids;
    doc["split_sizes"][name] = ids.size();
  }
  write_json_file(path, doc);
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  DatasetManifest manifest;
  try {
    manifest.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& im : doc.at("images")) {
      manifest.images.push_back(ImageRecord{im.at("id").get<int>(),
                                            im.at("file_name").get<std::string>(),
                                            im.at("width").get<int>(), im.at("height").get<int>(),
                                            im.at("panel_id").get<std::string>()});
    }
    for (const auto& [name, ids] : doc.at("splits").items()) {
      manifest.splits[name] = ids.get<std::vector<int>>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  validate_manifest(manifest);
  return manifest;
}

void write_coco(const DatasetManifest& manifest, const std::vector<InstanceLabel>& labels,
                const std::string& split, const std::filesystem::path& path) {
  const auto split_it = manifest.splits.find(split);
  if (split_it == manifest.splits.end()) {
    throw ValidationError("manifest has no split named '" + split + "'");
  }
  for (const auto& label : labels) {
    if (manifest.find(label.image_id) == nullptr) {
      throw ValidationError("label references image " + std::to_string(label.image_id) +
                            " which is not in the manifest");
    }
  }

  ordered_json doc;
  doc["images"] = ordered_json::array();
  doc["annotations"] = ordered_json::array();
  int next_id = 1;
  for (const int image_id : split_it->second) {
    const ImageRecord& im = *manifest.find(image_id);
    doc["images"].push_back(ordered_json{
        {"id", im.image_id}, {"file_name", im.file_name}, {"width", im.width}, {"height", im.height}});
    for (const auto& label : labels) {
      if (label.image_id != image_id) continue;
      validate_label(label, im.width, im.height);
      ordered_json seg = ordered_json::array();
      if (!label.polygon.empty()) {
        ordered_json ring = ordered_json::array();
        for (const auto& p : label.polygon) {
          ring.push_back(p.x);
          ring.push_back(p.y);
        }
        seg.push_back(std::move(ring));
      }
      const double area =
          label.polygon.empty() ? label.bbox.w * label.bbox.h : polygon_area(label.polygon);
      doc["annotations"].push_back(ordered_json{
          {"id", next_id++},
          {"image_id", image_id},
          {"category_id", kDefectCategoryId},
          {"bbox", {label.bbox.x, label.bbox.y, label.bbox.w, label.bbox.h}},
          {"segmentation", std::move(seg)},
          {"area", area},
          {"iscrowd", 0}});
    }
  }
  doc["categories"] = ordered_json::array(
      {ordered_json{{"id", kDefectCategoryId}, {"name", std::string(kDefectCategoryName)}}});
  write_json_file(path, doc);
}

CocoDataset read_coco(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  const std::string ctx = path.string();
  CocoDataset out;
  try {
    std::set<int> categories;
    for (const auto& c : doc.at("categories")) categories.insert(c.at("id").get<int>());

    std::map<int, std::size_t> index;
    for (const auto& im : doc.at("images")) {
      ImageRecord rec;
      rec.image_id = im.at("id").get<int>();
      rec.file_name = im.at("file_name").get<std::string>();
      rec.width = im.at("width").get<int>();
      rec.height = im.at("height").get<int>();
      rec.panel_id = std::filesystem::path(rec.file_name).stem().string();
      if (rec.width < 1 || rec.height < 1) {
        throw ValidationError(ctx + ": image " + std::to_string(rec.image_id) + " has no pixels");
      }
      if (!index.emplace(rec.image_id, out.images.size()).second) {
        throw ValidationError(ctx + ": duplicate image id " + std::to_string(rec.image_id));
      }
      out.images.push_back(std::move(rec));
    }

    std::set<int> annotation_ids;
    for (const auto& a : doc.at("annotations")) {
      const int ann_id = a.at("id").get<int>();
      const std::string where = ctx + ": annotation " + std::to_string(ann_id);
      if (!annotation_ids.insert(ann_id).second) throw ValidationError(where + " is duplicated");
      const int category = a.at("category_id").get<int>();
      if (!categories.count(category) || category != kDefectCategoryId) {
        throw ValidationError(where + " has unknown category id " + std::to_string(category));
      }
      if (a.value("iscrowd", 0) != 0) throw ValidationError(where + " is a crowd annotation");

      InstanceLabel label;
      label.image_id = a.at("image_id").get<int>();
      const auto it = index.find(label.image_id);
      if (it == index.end()) {
        throw ValidationError(where + " references unknown image " + std::to_string(label.image_id));
      }
      const auto& b = a.at("bbox");
      if (b.size() != 4) throw ValidationError(where + " bbox must have 4 numbers");
      label.bbox = Box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
      const auto seg = a.value("segmentation", json::array());
      if (seg.size() > 1) throw ValidationError(where + " has more than one polygon");
      if (seg.size() == 1) {
        const auto& ring = seg[0];
        if (ring.size() % 2 != 0) throw ValidationError(where + " polygon has odd length");
        for (std::size_t i = 0; i < ring.size(); i += 2) {
          label.polygon.push_back({ring[i].get<double>(), ring[i + 1].get<double>()});
        }
      }
      const ImageRecord& im = out.images[it->second];
      try {
        validate_label(label, im.width, im.height);
      } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
      }
      out.labels.push_back(std::move(label));
    }
  } catch (const json::exception& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
  return out;
}

void coco_to_yolo(const std::filesystem::path& coco_path, const std::filesystem::path& out_dir) {
  const CocoDataset coco = read_coco(coco_path);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  for (const auto& im : coco.images) {
    std::string text;
    char buf[32];
    auto put = [&](double v) {
      std::snprintf(buf, sizeof buf, " %.6f", std::clamp(v, 0.0, 1.0));
      text += buf;
    };
    for (const auto& label : coco.labels) {
      if (label.image_id != im.image_id) continue;
      Polygon ring = label.polygon;
      if (ring.empty()) {
        const Box& b = label.bbox;
        ring = {{b.x, b.y}, {b.right(), b.y}, {b.right(), b.bottom()}, {b.x, b.bottom()}};
      }
      text += "0";
      for (const auto& p : ring) {
        put(p.x / im.width);
        put(p.y / im.height);
      }
      text += '\n';
    }
    const auto path = out_dir / (std::filesystem::path(im.file_name).stem().string() + ".txt");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
  }
}

std::vector<Polygon> read_yolo_labels(const std::filesystem::path& path, int width, int height) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Polygon> polygons;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    int cls = -1;
    fields >> cls;
    if (cls != 0) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": class must be 0");
    }
    std::vector<double> coords;
    double v;
    while (fields >> v) coords.push_back(v);
    if (coords.size() < 6 || coords.size() % 2 != 0) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected an even number (>= 6) of coordinates");
    }
    Polygon ring;
    for (std::size_t i = 0; i < coords.size(); i += 2) {
      ring.push_back({coords[i] * width, coords[i + 1] * height});
    }
    polygons.push_back(std::move(ring));
  }
  return polygons;
}

}  // namespace ndi
