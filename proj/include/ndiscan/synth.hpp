// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded generator of synthetic composite-panel scans with embedded insert
// defects.
//
// Each A-scan is a sum of truncated Gaussian-windowed cosine pulses:
//   * a front-wall echo at sample pulse_width/2 with amplitude
//     kFrontWallGain * pulse_amplitude,
//   * a back-wall echo at the thickness region's back-wall sample with
//     amplitude pulse_amplitude, scaled by (1 - attenuation) over a defect,
//   * over a defect, an insert echo at
//     round(front + depth_fraction * (back - front)) with amplitude
//     kDefectEchoGain * attenuation * pulse_amplitude,
//   * i.i.d. N(0, noise_sigma^2) noise keyed by (seed, row, col, sample).
// A pulse centred at t0 is nonzero only for |t - t0| <= pulse_width/2, with
// Gaussian sigma pulse_width/4 and a carrier of 0.8 * frequency_mhz cycles
// per pulse width.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ndiscan/geometry.hpp"
#include "ndiscan/instance_label.hpp"
#include "ndiscan/scan_volume.hpp"

namespace ndi {

inline constexpr double kFrontWallGain = 0.1;
inline constexpr double kDefectEchoGain = 0.2;

enum class DefectShape { kRectangle, kEllipse };

struct DefectSpec {
  int center_row = 0;
  int center_col = 0;
  DefectShape shape = DefectShape::kRectangle;
  int extent_rows = 2;
  int extent_cols = 2;
  double depth_fraction = 0.5;
  double attenuation = 1.0;

  int top() const { return center_row - extent_rows / 2; }
  int left() const { return center_col - extent_cols / 2; }
  friend bool operator==(const DefectSpec&, const DefectSpec&) = default;
};

// Columns [col_begin, col_end) share one panel thickness.
struct ThicknessRegion {
  int col_begin = 0;
  int col_end = 0;
  int back_wall_sample = 0;
  friend bool operator==(const ThicknessRegion&, const ThicknessRegion&) = default;
};

struct PanelSpec {
  std::string panel_id;
  int height = 258;
  int width = 368;
  int samples = 512;
  double frequency_mhz = 2.5;
  std::vector<ThicknessRegion> thickness_regions;
  std::vector<DefectSpec> defects;
  double noise_sigma = 0.0;
  int pulse_width_samples = 128;
  double pulse_amplitude = 1.0;
  std::uint64_t seed = 0;

  int front_wall_sample() const { return pulse_width_samples / 2; }
  int back_wall_sample(int col) const;
  friend bool operator==(const PanelSpec&, const PanelSpec&) = default;
};

// Throws ValidationError naming the first broken invariant, including
// overlapping defect footprints.
void validate_panel(const PanelSpec& panel);

// Sample index of the insert echo for a defect over column `col`.
int defect_echo_sample(const PanelSpec& panel, const DefectSpec& defect, int col);

Mask footprint_mask(const DefectSpec& defect, int height, int width);

// Throws ValidationError when (row, col) is outside the grid.
std::vector<double> generate_ascan(const PanelSpec& panel, int row, int col);

struct GeneratedPanel {
  ScanVolume volume;
  std::vector<InstanceLabel> labels;  // image_id 0, one per defect, in spec order
};

GeneratedPanel generate_volume(const PanelSpec& panel);

struct CorpusEntry {
  std::string panel_id;
  std::string volume_file;        // relative to the corpus directory
  std::string ground_truth_file;  // relative to the corpus directory
  std::size_t label_count = 0;
  std::uint64_t seed = 0;
};

struct CorpusManifest {
  std::vector<CorpusEntry> entries;
};

inline constexpr const char* kCorpusManifestName = "manifest.json";

// Writes <panel_id>.usv and <panel_id>.gt.json per spec plus manifest.json.
CorpusManifest generate_corpus(const std::vector<PanelSpec>& specs,
                               const std::filesystem::path& out_dir);

CorpusManifest read_corpus_manifest(const std::filesystem::path& corpus_dir);

struct GroundTruth {
  std::string panel_id;
  int height = 0;
  int width = 0;
  std::vector<InstanceLabel> labels;
};

GroundTruth read_ground_truth(const std::filesystem::path& path);

// Default corpus preset: `count` panels of 258x368x512, noise 0.02,
// attenuation in [0.5, 1], three to six non-overlapping inserts each.
std::vector<PanelSpec> default_preset(int count = 72, std::uint64_t seed = 0x5EED2025ull);

// Declarative corpus description: {"panels": [ {...PanelSpec...}, ... ]}.
std::vector<PanelSpec> panels_from_json(const nlohmann::json& doc);
nlohmann::json panels_to_json(const std::vector<PanelSpec>& panels);

void to_json(nlohmann::json& j, const PanelSpec& p);
void from_json(const nlohmann::json& j, PanelSpec& p);

}  // namespace ndi
