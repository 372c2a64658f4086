// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/scan_volume.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ndiscan/errors.hpp"

namespace ndi {
namespace {

constexpr std::array<char, 4> kMagic = {'U', 'S', 'V', 'F'};

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

void put_u32(char* dst, std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) v = byteswap32(v);
  std::memcpy(dst, &v, 4);
}

std::uint32_t get_u32(const char* src) {
  std::uint32_t v;
  std::memcpy(&v, src, 4);
  if constexpr (std::endian::native == std::endian::big) v = byteswap32(v);
  return v;
}

std::uint32_t frequency_code(double mhz) { return mhz == 2.5 ? 0u : 1u; }

std::size_t point_count(int h, int w) { return static_cast<std::size_t>(h) * static_cast<std::size_t>(w); }

}  // namespace

bool is_supported_sample_count(int samples) {
  return samples == 512 || samples == 1024 || samples == 2048;
}

bool is_supported_frequency(double frequency_mhz) {
  return frequency_mhz == 2.5 || frequency_mhz == 5.0;
}

ScanVolume::ScanVolume(int height, int width, int samples, double frequency_mhz,
                       std::string panel_id)
    : height_(height), width_(width), samples_(samples), frequency_mhz_(frequency_mhz),
      panel_id_(std::move(panel_id)) {
  if (height < 1 || width < 1) {
    throw InvariantError("volume dimensions must be >= 1, got " + std::to_string(height) + "x" +
                         std::to_string(width));
  }
  if (!is_supported_sample_count(samples)) {
    throw InvariantError("samples per point must be 512, 1024 or 2048, got " +
                         std::to_string(samples));
  }
  if (!is_supported_frequency(frequency_mhz)) {
    throw InvariantError("frequency must be 2.5 or 5.0 MHz");
  }
  amplitudes_.assign(point_count(height, width) * static_cast<std::size_t>(samples), 0.0f);
}

std::span<const float> ScanVolume::ascan(int row, int col) const {
  const std::size_t offset = (static_cast<std::size_t>(row) * width_ + col) * samples_;
  return std::span<const float>(amplitudes_).subspan(offset, samples_);
}

std::span<float> ScanVolume::ascan(int row, int col) {
  const std::size_t offset = (static_cast<std::size_t>(row) * width_ + col) * samples_;
  return std::span<float>(amplitudes_).subspan(offset, samples_);
}

void ScanVolume::validate() const {
  if (height_ < 1 || width_ < 1 || !is_supported_sample_count(samples_) ||
      !is_supported_frequency(frequency_mhz_)) {
    throw InvariantError("volume geometry is invalid");
  }
  if (amplitudes_.size() != point_count(height_, width_) * static_cast<std::size_t>(samples_)) {
    throw InvariantError("amplitude buffer size does not match geometry");
  }
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    if (!std::isfinite(amplitudes_[i])) {
      throw InvariantError("non-finite amplitude at flat index " + std::to_string(i));
    }
  }
}

void write_volume(const ScanVolume& volume, std::ostream& out) {
  volume.validate();
  std::array<char, kVolumeHeaderBytes> header{};
  std::memcpy(header.data(), kMagic.data(), 4);
  put_u32(header.data() + 4, kVolumeVersion);
  put_u32(header.data() + 8, static_cast<std::uint32_t>(volume.height()));
  put_u32(header.data() + 12, static_cast<std::uint32_t>(volume.width()));
  put_u32(header.data() + 16, static_cast<std::uint32_t>(volume.samples()));
  put_u32(header.data() + 20, frequency_code(volume.frequency_mhz()));
  out.write(header.data(), header.size());

  const auto data = volume.amplitudes();
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size_bytes()));
  } else {
    std::vector<std::uint32_t> swapped(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      swapped[i] = byteswap32(std::bit_cast<std::uint32_t>(data[i]));
    }
    out.write(reinterpret_cast<const char*>(swapped.data()),
              static_cast<std::streamsize>(swapped.size() * 4));
  }
  if (!out) throw IoError("failed writing volume stream");
}

void write_volume(const ScanVolume& volume, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  try {
    write_volume(volume, out);
    out.flush();
    if (!out) throw IoError("flush failed");
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

ScanVolume read_volume(std::istream& in, std::string panel_id) {
  std::array<char, kVolumeHeaderBytes> header{};
  in.read(header.data(), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    throw TruncatedError("volume header is shorter than 24 bytes");
  }
  if (std::memcmp(header.data(), kMagic.data(), 4) != 0) {
    throw FormatError("bad magic, expected \"USVF\"");
  }
  const std::uint32_t version = get_u32(header.data() + 4);
  if (version != kVolumeVersion) {
    throw FormatError("unsupported volume version " + std::to_string(version));
  }
  const std::uint32_t h = get_u32(header.data() + 8);
  const std::uint32_t w = get_u32(header.data() + 12);
  const std::uint32_t s = get_u32(header.data() + 16);
  const std::uint32_t code = get_u32(header.data() + 20);
  if (code > 1) throw InvariantError("unknown frequency code " + std::to_string(code));
  if (h == 0 || w == 0 || h > (1u << 20) || w > (1u << 20)) {
    throw InvariantError("implausible volume dimensions " + std::to_string(h) + "x" +
                         std::to_string(w));
  }
  if (!is_supported_sample_count(static_cast<int>(s))) {
    throw InvariantError("samples per point must be 512, 1024 or 2048, got " + std::to_string(s));
  }

  ScanVolume volume(static_cast<int>(h), static_cast<int>(w), static_cast<int>(s),
                    code == 0 ? 2.5 : 5.0, std::move(panel_id));
  auto data = volume.amplitudes();
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
  if (in.gcount() != static_cast<std::streamsize>(data.size_bytes())) {
    throw TruncatedError("payload truncated: expected " + std::to_string(data.size_bytes()) +
                         " bytes, got " + std::to_string(in.gcount()));
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& v : data) v = std::bit_cast<float>(byteswap32(std::bit_cast<std::uint32_t>(v)));
  }
  volume.validate();
  return volume;
}

ScanVolume read_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_volume(in, path.stem().string());
  } catch (const ValidationError& e) {
    // Preserve the concrete error type while adding path context.
    const std::string msg = path.string() + ": " + e.what();
    if (dynamic_cast<const FormatError*>(&e)) throw FormatError(msg);
    if (dynamic_cast<const TruncatedError*>(&e)) throw TruncatedError(msg);
    throw InvariantError(msg);
  }
}

}  // namespace ndi
