// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "ndiscan/counter_rng.hpp"
#include "ndiscan/errors.hpp"
#include "ndiscan/parallel.hpp"

namespace ndi {
namespace {

// Samples of one unit-amplitude pulse at offsets -half..half.
std::vector<double> pulse_shape(const PanelSpec& panel) {
  const int half = panel.pulse_width_samples / 2;
  const double width = panel.pulse_width_samples;
  const double sigma = width / 4.0;
  const double cycles = 0.8 * panel.frequency_mhz;
  std::vector<double> shape(2 * half + 1);
  for (int d = -half; d <= half; ++d) {
    const double t = d;
    shape[d + half] = std::exp(-0.5 * (t / sigma) * (t / sigma)) *
                      std::cos(2.0 * std::numbers::pi * cycles * t / width);
  }
  return shape;
}

template <typename Out>
void add_pulse(std::span<Out> signal, const std::vector<double>& shape, int center, double amp) {
  if (amp == 0.0) return;
  const int half = static_cast<int>(shape.size() / 2);
  const int n = static_cast<int>(signal.size());
  const int lo = std::max(0, center - half);
  const int hi = std::min(n - 1, center + half);
  for (int t = lo; t <= hi; ++t) signal[t] += static_cast<Out>(amp * shape[t - center + half]);
}

// Fills one A-scan in double precision.
void synthesize(const PanelSpec& panel, const std::vector<double>& shape, const DefectSpec* defect,
                int row, int col, std::span<double> signal) {
  std::fill(signal.begin(), signal.end(), 0.0);
  const int front = panel.front_wall_sample();
  const int back = panel.back_wall_sample(col);
  const double amp = panel.pulse_amplitude;

  add_pulse(signal, shape, front, kFrontWallGain * amp);
  if (defect != nullptr) {
    add_pulse(signal, shape, back, (1.0 - defect->attenuation) * amp);
    add_pulse(signal, shape, defect_echo_sample(panel, *defect, col),
              kDefectEchoGain * defect->attenuation * amp);
  } else {
    add_pulse(signal, shape, back, amp);
  }

  if (panel.noise_sigma > 0.0) {
    const int pairs = static_cast<int>(signal.size()) / 2;
    for (int k = 0; k < pairs; ++k) {
      const auto [a, b] = normal_pair(hash_key(panel.seed, static_cast<std::uint64_t>(row),
                                               static_cast<std::uint64_t>(col),
                                               static_cast<std::uint64_t>(k)));
      signal[2 * k] += panel.noise_sigma * a;
      signal[2 * k + 1] += panel.noise_sigma * b;
    }
  }
}

std::string where(const PanelSpec& panel) {
  return panel.panel_id.empty() ? std::string("panel") : "panel '" + panel.panel_id + "'";
}

// Index of the defect covering each point, or -1.
std::vector<int> coverage(const PanelSpec& panel) {
  std::vector<int> owner(static_cast<std::size_t>(panel.height) * panel.width, -1);
  for (std::size_t d = 0; d < panel.defects.size(); ++d) {
    const Mask m = footprint_mask(panel.defects[d], panel.height, panel.width);
    for (std::size_t i = 0; i < m.bits.size(); ++i) {
      if (!m.bits[i]) continue;
      if (owner[i] >= 0) {
        throw ValidationError(where(panel) + ": defects " + std::to_string(owner[i]) + " and " +
                              std::to_string(d) + " overlap");
      }
      owner[i] = static_cast<int>(d);
    }
  }
  return owner;
}

}  // namespace

int PanelSpec::back_wall_sample(int col) const {
  for (const auto& region : thickness_regions) {
    if (col >= region.col_begin && col < region.col_end) return region.back_wall_sample;
  }
  throw ValidationError("column " + std::to_string(col) + " is not covered by a thickness region");
}

int defect_echo_sample(const PanelSpec& panel, const DefectSpec& defect, int col) {
  const int front = panel.front_wall_sample();
  const int back = panel.back_wall_sample(col);
  return static_cast<int>(std::lround(front + defect.depth_fraction * (back - front)));
}

Mask footprint_mask(const DefectSpec& defect, int height, int width) {
  Mask mask(height, width);
  const int top = defect.top();
  const int left = defect.left();
  const double cy = top + defect.extent_rows / 2.0;
  const double cx = left + defect.extent_cols / 2.0;
  const double ry = defect.extent_rows / 2.0;
  const double rx = defect.extent_cols / 2.0;
  for (int r = std::max(0, top); r < std::min(height, top + defect.extent_rows); ++r) {
    for (int c = std::max(0, left); c < std::min(width, left + defect.extent_cols); ++c) {
      if (defect.shape == DefectShape::kEllipse) {
        const double dy = (r + 0.5 - cy) / ry;
        const double dx = (c + 0.5 - cx) / rx;
        if (dy * dy + dx * dx > 1.0) continue;
      }
      mask.set(r, c);
    }
  }
  return mask;
}

void validate_panel(const PanelSpec& panel) {
  const std::string ctx = where(panel);
  if (panel.height < 1 || panel.width < 1) throw ValidationError(ctx + ": grid must be >= 1x1");
  if (!is_supported_sample_count(panel.samples)) {
    throw ValidationError(ctx + ": samples must be 512, 1024 or 2048");
  }
  if (!is_supported_frequency(panel.frequency_mhz)) {
    throw ValidationError(ctx + ": frequency must be 2.5 or 5.0 MHz");
  }
  if (!(panel.noise_sigma >= 0.0) || !std::isfinite(panel.noise_sigma)) {
    throw ValidationError(ctx + ": noise_sigma must be finite and >= 0");
  }
  if (panel.pulse_width_samples < 1) throw ValidationError(ctx + ": pulse width must be >= 1");
  if (!(panel.pulse_amplitude > 0.0) || !std::isfinite(panel.pulse_amplitude)) {
    throw ValidationError(ctx + ": pulse amplitude must be finite and > 0");
  }

  auto regions = panel.thickness_regions;
  if (regions.empty()) throw ValidationError(ctx + ": no thickness regions");
  std::sort(regions.begin(), regions.end(),
            [](const auto& a, const auto& b) { return a.col_begin < b.col_begin; });
  int expect = 0;
  for (const auto& region : regions) {
    if (region.col_begin != expect || region.col_end <= region.col_begin) {
      throw ValidationError(ctx + ": thickness regions must partition columns [0, width)");
    }
    if (region.back_wall_sample <= panel.pulse_width_samples ||
        region.back_wall_sample >= panel.samples) {
      throw ValidationError(ctx + ": back-wall sample " + std::to_string(region.back_wall_sample) +
                            " must lie in (pulse width, samples)");
    }
    expect = region.col_end;
  }
  if (expect != panel.width) {
    throw ValidationError(ctx + ": thickness regions must partition columns [0, width)");
  }

  for (std::size_t i = 0; i < panel.defects.size(); ++i) {
    const DefectSpec& d = panel.defects[i];
    const std::string dctx = ctx + ", defect " + std::to_string(i);
    if (d.extent_rows < 2 || d.extent_cols < 2) throw ValidationError(dctx + ": extents must be >= 2");
    if (d.top() < 0 || d.left() < 0 || d.top() + d.extent_rows > panel.height ||
        d.left() + d.extent_cols > panel.width) {
      throw ValidationError(dctx + ": footprint leaves the panel grid");
    }
    if (!(d.depth_fraction > 0.0 && d.depth_fraction < 1.0)) {
      throw ValidationError(dctx + ": depth_fraction must be in (0, 1)");
    }
    if (!(d.attenuation > 0.0 && d.attenuation <= 1.0)) {
      throw ValidationError(dctx + ": attenuation must be in (0, 1]");
    }
    for (int c = d.left(); c < d.left() + d.extent_cols; ++c) {
      const int echo = defect_echo_sample(panel, d, c);
      if (echo <= panel.front_wall_sample() || echo >= panel.back_wall_sample(c)) {
        throw ValidationError(dctx + ": insert echo does not fall between front and back wall");
      }
    }
    if (mask_area(footprint_mask(d, panel.height, panel.width)) == 0) {
      throw ValidationError(dctx + ": footprint is empty");
    }
  }
  coverage(panel);  // overlap check
}

std::vector<double> generate_ascan(const PanelSpec& panel, int row, int col) {
  if (row < 0 || row >= panel.height || col < 0 || col >= panel.width) {
    throw ValidationError("point (" + std::to_string(row) + ", " + std::to_string(col) +
                          ") is outside the " + std::to_string(panel.height) + "x" +
                          std::to_string(panel.width) + " grid");
  }
  const DefectSpec* covering = nullptr;
  for (const auto& d : panel.defects) {
    const int top = d.top();
    const int left = d.left();
    if (row < top || row >= top + d.extent_rows || col < left || col >= left + d.extent_cols) continue;
    if (footprint_mask(d, panel.height, panel.width).at(row, col)) {
      covering = &d;
      break;
    }
  }
  std::vector<double> signal(panel.samples);
  synthesize(panel, pulse_shape(panel), covering, row, col, signal);
  return signal;
}

GeneratedPanel generate_volume(const PanelSpec& panel) {
  validate_panel(panel);
  const std::vector<int> owner = coverage(panel);
  const std::vector<double> shape = pulse_shape(panel);

  GeneratedPanel out{ScanVolume(panel.height, panel.width, panel.samples, panel.frequency_mhz,
                                panel.panel_id),
                     {}};
  ScanVolume& volume = out.volume;
  parallel_for(panel.height, [&](int row) {
    std::vector<double> signal(panel.samples);
    for (int col = 0; col < panel.width; ++col) {
      const int d = owner[static_cast<std::size_t>(row) * panel.width + col];
      synthesize(panel, shape, d >= 0 ? &panel.defects[d] : nullptr, row, col, signal);
      auto dst = volume.ascan(row, col);
      std::transform(signal.begin(), signal.end(), dst.begin(),
                     [](double v) { return static_cast<float>(v); });
    }
  });

  for (const auto& d : panel.defects) {
    const Mask m = footprint_mask(d, panel.height, panel.width);
    out.labels.push_back(InstanceLabel{0, *mask_bounds(m), trace_outline(m)});
  }
  return out;
}

}  // namespace ndi
