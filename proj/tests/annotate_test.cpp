// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/annotate.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <numeric>
#include <set>

#include "ndiscan/counter_rng.hpp"
#include "ndiscan/errors.hpp"
#include "ndiscan/json_io.hpp"
#include "test_util.hpp"

namespace ndi {
namespace {

std::vector<int> iota_ids(int n) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  return ids;
}

DatasetManifest small_manifest() {
  DatasetManifest m;
  m.seed = 3;
  for (int i = 1; i <= 4; ++i) {
    m.images.push_back({i, "panel_00" + std::to_string(i) + ".png", 40, 30, "panel_00" + std::to_string(i)});
  }
  m.splits = {{"train", {1, 3}}, {"val", {2}}, {"test", {4}}};
  return m;
}

std::vector<InstanceLabel> small_labels() {
  return {{1, {2, 3, 5, 4}, {{2, 3}, {7, 3}, {7, 7}, {2, 7}}},
          {1, {10, 10, 8, 8}, {}},
          {3, {0, 0, 40, 30}, {}},
          {2, {1.5, 2.25, 3, 3}, {{1.5, 2.25}, {4.5, 2.25}, {3, 5.25}}}};
}

TEST(Split, PaperCounts) {
  const auto s = split_dataset(iota_ids(72), {}, 7);
  EXPECT_EQ(s.at("train").size(), 56u);
  EXPECT_EQ(s.at("val").size(), 8u);
  EXPECT_EQ(s.at("test").size(), 8u);
}

TEST(Split, SingleImage) {
  const auto s = split_dataset({42}, {1.0, 0.0, 0.0}, 1);
  EXPECT_EQ(s.at("train"), std::vector<int>{42});
  EXPECT_TRUE(s.at("val").empty());
  EXPECT_TRUE(s.at("test").empty());
}

TEST(Split, DeterministicAndSeedSensitive) {
  EXPECT_EQ(split_dataset(iota_ids(72), {}, 7), split_dataset(iota_ids(72), {}, 7));
  EXPECT_NE(split_dataset(iota_ids(72), {}, 7), split_dataset(iota_ids(72), {}, 8));
}

TEST(Split, DisjointCoverProperty) {
  SplitMix64 rng(99);
  for (int n = 1; n <= 500; ++n) {
    const double a = rng.uniform(), b = rng.uniform() * (1 - a);
    const SplitRatios r{a, b, 1.0 - a - b};
    std::map<std::string, std::vector<int>> s;
    try {
      s = split_dataset(iota_ids(n), r, rng.next());
    } catch (const ValidationError&) {
      // only allowed when some positive ratio rounds to an empty split
      const int b1 = static_cast<int>(std::lround(r.train * n));
      const int b2 = static_cast<int>(std::lround((r.train + r.val) * n));
      EXPECT_TRUE((r.train > 0 && b1 == 0) || (r.val > 0 && b2 == b1) || (r.test > 0 && b2 == n)) << n;
      continue;
    }
    std::multiset<int> all;
    for (const auto& [name, ids] : s) all.insert(ids.begin(), ids.end());
    ASSERT_EQ(all.size(), static_cast<std::size_t>(n));
    ASSERT_EQ(std::set<int>(all.begin(), all.end()).size(), static_cast<std::size_t>(n));
    ASSERT_EQ(*all.begin(), 1);
    ASSERT_EQ(*all.rbegin(), n);
  }
}

TEST(Split, Errors) {
  EXPECT_THROW(split_dataset({}, {}, 1), ValidationError);
  EXPECT_THROW(split_dataset(iota_ids(2), {}, 1), ValidationError);  // val rounds to 0
  EXPECT_THROW(split_dataset(iota_ids(10), {0.5, 0.5, 0.5}, 1), ValidationError);
  EXPECT_THROW(split_dataset(iota_ids(10), {1.2, -0.2, 0.0}, 1), ValidationError);
}

TEST(Manifest, RoundTripAndValidation) {
  testing::TempDir dir("manifest");
  const DatasetManifest m = small_manifest();
  write_manifest(m, dir / "m.json");
  EXPECT_EQ(read_manifest(dir / "m.json"), m);
  const auto doc = read_json_file(dir / "m.json");
  EXPECT_EQ(doc["split_sizes"]["train"], 2);

  DatasetManifest bad = m;
  bad.splits["val"].push_back(1);
  EXPECT_THROW(validate_manifest(bad), ValidationError);
  bad = m;
  bad.splits["test"].clear();
  EXPECT_THROW(validate_manifest(bad), ValidationError);
}

TEST(Coco, RoundTrip) {
  testing::TempDir dir("coco");
  const DatasetManifest m = small_manifest();
  const auto labels = small_labels();
  write_coco(m, labels, "train", dir / "train.json");
  const CocoDataset back = read_coco(dir / "train.json");
  ASSERT_EQ(back.images.size(), 2u);
  EXPECT_EQ(back.images[0], m.images[0]);
  EXPECT_EQ(back.images[1], m.images[2]);
  const std::vector<InstanceLabel> want{labels[0], labels[1], labels[2]};
  EXPECT_EQ(back.labels, want);

  const auto doc = read_json_file(dir / "train.json");
  ASSERT_EQ(doc["annotations"].size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(doc["annotations"][i]["id"], i + 1);
    EXPECT_EQ(doc["annotations"][i]["iscrowd"], 0);
    EXPECT_EQ(doc["annotations"][i]["category_id"], 1);
  }
  EXPECT_EQ(doc["annotations"][1]["segmentation"], nlohmann::json::array());
  EXPECT_EQ(doc["annotations"][1]["area"], 64.0);
  EXPECT_EQ(doc["annotations"][0]["area"], 20.0);
  EXPECT_EQ(doc["categories"], nlohmann::json::parse(R"([{"id":1,"name":"defect"}])"));

  // writing the re-read data reproduces the bytes
  DatasetManifest again = m;
  write_coco(again, back.labels, "train", dir / "again.json");
  EXPECT_EQ(testing::read_bytes(dir / "train.json"), testing::read_bytes(dir / "again.json"));
}

TEST(Coco, EmptyLabels) {
  testing::TempDir dir("coco");
  write_coco(small_manifest(), {}, "val", dir / "val.json");
  const auto doc = read_json_file(dir / "val.json");
  EXPECT_TRUE(doc["annotations"].is_array());
  EXPECT_TRUE(doc["annotations"].empty());
  EXPECT_EQ(doc["images"].size(), 1u);
}

TEST(Coco, DanglingImageId) {
  testing::TempDir dir("coco");
  auto labels = small_labels();
  labels.push_back({9, {1, 1, 2, 2}, {}});
  EXPECT_THROW(write_coco(small_manifest(), labels, "train", dir / "x.json"), ValidationError);
  EXPECT_THROW(write_coco(small_manifest(), {}, "nope", dir / "x.json"), ValidationError);
}

void expect_error_naming(const std::filesystem::path& p, const std::string& needle) {
  try {
    read_coco(p);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(Coco, ReadErrorsNameTheAnnotation) {
  testing::TempDir dir("coco");
  write_coco(small_manifest(), small_labels(), "train", dir / "train.json");
  auto doc = read_json_file(dir / "train.json");

  auto bad_cat = doc;
  bad_cat["annotations"][1]["category_id"] = 2;
  write_json_file(dir / "cat.json", bad_cat);
  expect_error_naming(dir / "cat.json", "annotation 2");

  auto bad_box = doc;
  bad_box["annotations"][2]["bbox"] = {30, 0, 20, 10};
  write_json_file(dir / "box.json", bad_box);
  expect_error_naming(dir / "box.json", "annotation 3");

  auto bad_img = doc;
  bad_img["annotations"][0]["image_id"] = 77;
  write_json_file(dir / "img.json", bad_img);
  expect_error_naming(dir / "img.json", "annotation 1");

  testing::write_bytes(dir / "junk.json", "{ not json");
  EXPECT_THROW(read_coco(dir / "junk.json"), ValidationError);
  EXPECT_THROW(read_coco(dir / "missing.json"), IoError);
}

TEST(Yolo, EmptyImageGetsEmptyFile) {
  testing::TempDir dir("yolo");
  write_coco(small_manifest(), {}, "train", dir / "train.json");
  coco_to_yolo(dir / "train.json", dir / "labels");
  for (const char* f : {"panel_001.txt", "panel_003.txt"}) {
    ASSERT_TRUE(std::filesystem::exists(dir / "labels" / f));
    EXPECT_EQ(std::filesystem::file_size(dir / "labels" / f), 0u);
  }
}

TEST(Yolo, FullImageBox) {
  testing::TempDir dir("yolo");
  write_coco(small_manifest(), small_labels(), "train", dir / "train.json");
  coco_to_yolo(dir / "train.json", dir / "labels");
  EXPECT_EQ(testing::read_bytes(dir / "labels" / "panel_003.txt"),
            "0 0.000000 0.000000 1.000000 0.000000 1.000000 1.000000 0.000000 1.000000\n");
  EXPECT_EQ(testing::read_bytes(dir / "labels" / "panel_001.txt"),
            "0 0.050000 0.100000 0.175000 0.100000 0.175000 0.233333 0.050000 0.233333\n"
            "0 0.250000 0.333333 0.450000 0.333333 0.450000 0.600000 0.250000 0.600000\n");
}

TEST(Yolo, RoundTripWithinOnePixel) {
  testing::TempDir dir("yolo");
  SplitMix64 rng(12);
  DatasetManifest m;
  m.images = {{1, "a.png", 368, 258, "a"}};
  m.splits = {{"train", {1}}, {"val", {}}, {"test", {}}};
  std::vector<InstanceLabel> labels;
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform(0, 300), y = rng.uniform(0, 200);
    const double w = rng.uniform(1, 368 - x), h = rng.uniform(1, 258 - y);
    labels.push_back({1, {x, y, w, h}, {{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}});
    labels.push_back({1, {x, y, w, h}, {}});
  }
  write_coco(m, labels, "train", dir / "train.json");
  coco_to_yolo(dir / "train.json", dir / "labels");
  const auto polys = read_yolo_labels(dir / "labels" / "a.txt", 368, 258);
  ASSERT_EQ(polys.size(), labels.size());
  for (std::size_t i = 0; i < polys.size(); ++i) {
    const Box b = *polygon_bounds(polys[i]);
    EXPECT_NEAR(b.x, labels[i].bbox.x, 1.0);
    EXPECT_NEAR(b.y, labels[i].bbox.y, 1.0);
    EXPECT_NEAR(b.right(), labels[i].bbox.right(), 1.0);
    EXPECT_NEAR(b.bottom(), labels[i].bbox.bottom(), 1.0);
  }
}

TEST(Yolo, ParseErrors) {
  testing::TempDir dir("yolo");
  testing::write_bytes(dir / "a.txt", "1 0.1 0.1 0.2 0.1 0.2 0.2\n");
  EXPECT_THROW(read_yolo_labels(dir / "a.txt", 10, 10), ValidationError);
  testing::write_bytes(dir / "b.txt", "0 0.1 0.1 0.2\n");
  EXPECT_THROW(read_yolo_labels(dir / "b.txt", 10, 10), ValidationError);
}

}  // namespace
}  // namespace ndi
