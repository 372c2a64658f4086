// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>

#include "ndiscan/counter_rng.hpp"
#include "ndiscan/errors.hpp"
#include "ndiscan/json_io.hpp"
#include "ndiscan/synth.hpp"

namespace ndi {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json label_to_json(const InstanceLabel& label) {
  ordered_json flat = ordered_json::array();
  for (const auto& p : label.polygon) {
    flat.push_back(p.x);
    flat.push_back(p.y);
  }
  return ordered_json{{"bbox", {label.bbox.x, label.bbox.y, label.bbox.w, label.bbox.h}},
                      {"polygon", flat}};
}

InstanceLabel label_from_json(const json& j) {
  InstanceLabel label;
  const auto& b = j.at("bbox");
  label.bbox = Box{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                   b.at(3).get<double>()};
  const auto& flat = j.at("polygon");
  if (flat.size() % 2 != 0) throw ValidationError("polygon has an odd number of coordinates");
  for (std::size_t i = 0; i < flat.size(); i += 2) {
    label.polygon.push_back({flat[i].get<double>(), flat[i + 1].get<double>()});
  }
  return label;
}

std::string shape_name(DefectShape s) { return s == DefectShape::kEllipse ? "ellipse" : "rectangle"; }

DefectShape parse_shape(const std::string& s) {
  if (s == "ellipse") return DefectShape::kEllipse;
  if (s == "rectangle") return DefectShape::kRectangle;
  throw ValidationError("unknown defect shape '" + s + "'");
}

}  // namespace

void to_json(json& j, const PanelSpec& p) {
  ordered_json o;
  o["panel_id"] = p.panel_id;
  o["grid"] = {p.height, p.width};
  o["samples"] = p.samples;
  o["frequency_mhz"] = p.frequency_mhz;
  o["thickness_regions"] = ordered_json::array();
  for (const auto& r : p.thickness_regions) {
    o["thickness_regions"].push_back(
        ordered_json{{"cols", {r.col_begin, r.col_end}}, {"back_wall_sample", r.back_wall_sample}});
  }
  o["defects"] = ordered_json::array();
  for (const auto& d : p.defects) {
    o["defects"].push_back(ordered_json{{"center", {d.center_row, d.center_col}},
                                        {"shape", shape_name(d.shape)},
                                        {"extent", {d.extent_rows, d.extent_cols}},
                                        {"depth_fraction", d.depth_fraction},
                                        {"attenuation", d.attenuation}});
  }
  o["noise_sigma"] = p.noise_sigma;
  o["pulse_width_samples"] = p.pulse_width_samples;
  o["pulse_amplitude"] = p.pulse_amplitude;
  o["seed"] = p.seed;
  j = json::parse(o.dump());
}

void from_json(const json& j, PanelSpec& p) {
  try {
    p = PanelSpec{};
    p.panel_id = j.value("panel_id", std::string{});
    p.height = j.at("grid").at(0).get<int>();
    p.width = j.at("grid").at(1).get<int>();
    p.samples = j.at("samples").get<int>();
    p.frequency_mhz = j.at("frequency_mhz").get<double>();
    for (const auto& r : j.at("thickness_regions")) {
      p.thickness_regions.push_back(ThicknessRegion{r.at("cols").at(0).get<int>(),
                                                    r.at("cols").at(1).get<int>(),
                                                    r.at("back_wall_sample").get<int>()});
    }
    for (const auto& d : j.value("defects", json::array())) {
      DefectSpec spec;
      spec.center_row = d.at("center").at(0).get<int>();
      spec.center_col = d.at("center").at(1).get<int>();
      spec.shape = parse_shape(d.value("shape", std::string("rectangle")));
      spec.extent_rows = d.at("extent").at(0).get<int>();
      spec.extent_cols = d.at("extent").at(1).get<int>();
      spec.depth_fraction = d.at("depth_fraction").get<double>();
      spec.attenuation = d.at("attenuation").get<double>();
      p.defects.push_back(spec);
    }
    p.noise_sigma = j.value("noise_sigma", 0.0);
    p.pulse_width_samples = j.value("pulse_width_samples", p.samples / 4);
    p.pulse_amplitude = j.value("pulse_amplitude", 1.0);
    p.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed panel spec: ") + e.what());
  }
}

std::vector<PanelSpec> panels_from_json(const json& doc) {
  if (!doc.contains("panels") || !doc["panels"].is_array()) {
    throw ValidationError("corpus description needs a \"panels\" array");
  }
  std::vector<PanelSpec> panels;
  for (const auto& entry : doc["panels"]) panels.push_back(entry.get<PanelSpec>());
  return panels;
}

json panels_to_json(const std::vector<PanelSpec>& panels) {
  json doc;
  doc["panels"] = panels;
  return doc;
}

std::vector<PanelSpec> default_preset(int count, std::uint64_t seed) {
  constexpr int kHeight = 258;
  constexpr int kWidth = 368;
  constexpr int kSamples = 512;
  constexpr int kBorder = 3;
  constexpr int kGap = 4;
  constexpr std::array<int, 3> kBackWalls = {384, 416, 440};

  std::vector<PanelSpec> panels;
  panels.reserve(count);
  for (int i = 0; i < count; ++i) {
    SplitMix64 rng(hash_key(seed, static_cast<std::uint64_t>(i)));
    PanelSpec p;
    char id[32];
    std::snprintf(id, sizeof id, "panel_%03d", i);
    p.panel_id = id;
    p.height = kHeight;
    p.width = kWidth;
    p.samples = kSamples;
    p.frequency_mhz = i % 2 == 0 ? 2.5 : 5.0;
    p.noise_sigma = 0.02;
    p.pulse_width_samples = kSamples / 4;
    p.pulse_amplitude = 1.0;
    p.seed = hash_key(seed, static_cast<std::uint64_t>(i), 1);

    const int cut1 = rng.range(80, 160);
    const int cut2 = rng.range(200, 290);
    const std::array<int, 4> cuts = {0, cut1, cut2, kWidth};
    for (int r = 0; r < 3; ++r) {
      p.thickness_regions.push_back({cuts[r], cuts[r + 1], kBackWalls[rng.below(kBackWalls.size())]});
    }

    const int wanted = rng.range(3, 6);
    std::vector<Box> taken;
    for (int attempt = 0; attempt < 500 && static_cast<int>(p.defects.size()) < wanted; ++attempt) {
      DefectSpec d;
      d.shape = rng.below(2) == 0 ? DefectShape::kRectangle : DefectShape::kEllipse;
      d.extent_rows = rng.range(8, 32);
      d.extent_cols = rng.range(10, 48);
      const int top = rng.range(kBorder, kHeight - kBorder - d.extent_rows);
      const int left = rng.range(kBorder, kWidth - kBorder - d.extent_cols);
      d.center_row = top + d.extent_rows / 2;
      d.center_col = left + d.extent_cols / 2;
      const Box grown{static_cast<double>(left - kGap), static_cast<double>(top - kGap),
                      static_cast<double>(d.extent_cols + 2 * kGap),
                      static_cast<double>(d.extent_rows + 2 * kGap)};
      const bool clash = std::any_of(taken.begin(), taken.end(), [&](const Box& b) {
        return grown.x < b.right() && b.x < grown.right() && grown.y < b.bottom() &&
               b.y < grown.bottom();
      });
      if (clash) continue;
      d.depth_fraction = rng.uniform(0.4, 0.6);
      d.attenuation = rng.uniform(0.5, 1.0);
      taken.push_back(Box{static_cast<double>(left), static_cast<double>(top),
                          static_cast<double>(d.extent_cols), static_cast<double>(d.extent_rows)});
      p.defects.push_back(d);
    }
    panels.push_back(std::move(p));
  }
  return panels;
}

CorpusManifest generate_corpus(const std::vector<PanelSpec>& specs,
                               const std::filesystem::path& out_dir) {
  if (specs.empty()) throw ValidationError("corpus needs at least one panel spec");
  std::set<std::string> ids;
  std::set<std::uint64_t> seeds;
  for (const auto& spec : specs) {
    if (spec.panel_id.empty()) throw ValidationError("panel spec without panel_id");
    if (spec.panel_id.find_first_of("/\\") != std::string::npos) {
      throw ValidationError("panel_id '" + spec.panel_id + "' contains a path separator");
    }
    if (!ids.insert(spec.panel_id).second) {
      throw ValidationError("duplicate panel_id '" + spec.panel_id + "'");
    }
    if (!seeds.insert(spec.seed).second) {
      throw ValidationError("duplicate seed " + std::to_string(spec.seed) + " (panel '" +
                            spec.panel_id + "')");
    }
    validate_panel(spec);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  CorpusManifest manifest;
  ordered_json doc;
  doc["panels"] = ordered_json::array();
  for (const auto& spec : specs) {
    const GeneratedPanel generated = generate_volume(spec);
    CorpusEntry entry{spec.panel_id, spec.panel_id + ".usv", spec.panel_id + ".gt.json",
                      generated.labels.size(), spec.seed};
    write_volume(generated.volume, out_dir / entry.volume_file);

    ordered_json gt;
    gt["panel_id"] = spec.panel_id;
    gt["height"] = spec.height;
    gt["width"] = spec.width;
    gt["labels"] = ordered_json::array();
    for (const auto& label : generated.labels) gt["labels"].push_back(label_to_json(label));
    gt["spec"] = ordered_json::parse(json(spec).dump());
    write_json_file(out_dir / entry.ground_truth_file, gt);

    doc["panels"].push_back(ordered_json{{"panel_id", entry.panel_id},
                                         {"volume", entry.volume_file},
                                         {"ground_truth", entry.ground_truth_file},
                                         {"labels", entry.label_count},
                                         {"seed", entry.seed}});
    manifest.entries.push_back(std::move(entry));
  }
  write_json_file(out_dir / kCorpusManifestName, doc);
  return manifest;
}

CorpusManifest read_corpus_manifest(const std::filesystem::path& corpus_dir) {
  const json doc = read_json_file(corpus_dir / kCorpusManifestName);
  CorpusManifest manifest;
  try {
    for (const auto& p : doc.at("panels")) {
      manifest.entries.push_back(CorpusEntry{p.at("panel_id").get<std::string>(),
                                             p.at("volume").get<std::string>(),
                                             p.at("ground_truth").get<std::string>(),
                                             p.at("labels").get<std::size_t>(),
                                             p.at("seed").get<std::uint64_t>()});
    }
  } catch (const json::exception& e) {
    throw ValidationError((corpus_dir / kCorpusManifestName).string() + ": " + e.what());
  }
  return manifest;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  GroundTruth gt;
  try {
    gt.panel_id = doc.at("panel_id").get<std::string>();
    gt.height = doc.at("height").get<int>();
    gt.width = doc.at("width").get<int>();
    for (const auto& l : doc.at("labels")) gt.labels.push_back(label_from_json(l));
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  for (const auto& label : gt.labels) validate_label(label, gt.width, gt.height);
  return gt;
}

}  // namespace ndi
