// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Core value types shared by every stage: the raw ultrasonic volume, the
// per-point variance map and the 8-bit image exported for training, plus the
// ".usv" volume container.
//
// Volume file layout (all integers u32 little-endian):
//   0..3   magic "USVF"
//   4..7   version (1)
//   8..11  height (rows)
//   12..15 width (columns)
//   16..19 samples per point
//   20..23 frequency code (0 = 2.5 MHz, 1 = 5.0 MHz)
//   24..   height*width*samples float32 LE, row-major, sample axis innermost

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ndi {

inline constexpr std::size_t kVolumeHeaderBytes = 24;
inline constexpr std::uint32_t kVolumeVersion = 1;

bool is_supported_sample_count(int samples);
bool is_supported_frequency(double frequency_mhz);

class ScanVolume {
 public:
  ScanVolume() = default;
  // Zero-filled volume. Throws InvariantError on unsupported geometry.
  ScanVolume(int height, int width, int samples, double frequency_mhz,
             std::string panel_id = {});

  int height() const { return height_; }
  int width() const { return width_; }
  int samples() const { return samples_; }
  double frequency_mhz() const { return frequency_mhz_; }
  const std::string& panel_id() const { return panel_id_; }
  void set_panel_id(std::string id) { panel_id_ = std::move(id); }

  std::span<const float> amplitudes() const { return amplitudes_; }
  std::span<float> amplitudes() { return amplitudes_; }

  // The A-scan at (row, col): `samples()` contiguous values.
  std::span<const float> ascan(int row, int col) const;
  std::span<float> ascan(int row, int col);

  // Throws InvariantError if any invariant is broken (e.g. non-finite data).
  void validate() const;

  friend bool operator==(const ScanVolume&, const ScanVolume&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int samples_ = 0;
  double frequency_mhz_ = 2.5;
  std::string panel_id_;
  std::vector<float> amplitudes_;
};

struct VarianceMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;  // row-major

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
  friend bool operator==(const VarianceMap&, const VarianceMap&) = default;
};

struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  GrayImage() = default;
  GrayImage(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, fill) {}

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

void write_volume(const ScanVolume& volume, std::ostream& out);
// Writes to `path`; throws IoError naming the path on failure.
void write_volume(const ScanVolume& volume, const std::filesystem::path& path);

// Throws FormatError (magic/version), TruncatedError (short payload) or
// InvariantError (bad geometry, non-finite amplitudes).
ScanVolume read_volume(std::istream& in, std::string panel_id = {});
// The panel id is taken from the file stem.
ScanVolume read_volume(const std::filesystem::path& path);

}  // namespace ndi
