// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>

#include "ndiscan/detect.hpp"
#include "ndiscan/instance_label.hpp"
#include "ndiscan/png_io.hpp"

namespace ndi {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kGroundTruthColor = {255, 140, 0};  // orange
inline constexpr Rgb kPredictionColor = {0, 220, 0};     // green

// Grayscale source expanded to RGB with 1 px box outlines: ground truth in
// orange, predictions in green with a two-decimal score caption above the box
// (inside it when there is no room). Box edges cover the pixels
// [round(x), round(x + w) - 1] x [round(y), round(y + h) - 1].
// Predictions are drawn after ground truth.
RgbImage compose_overlay(const GrayImage& image, std::span<const InstanceLabel> ground_truths,
                         std::span<const Prediction> predictions);

void render_overlay(const GrayImage& image, std::span<const InstanceLabel> ground_truths,
                    std::span<const Prediction> predictions, const std::filesystem::path& path);

}  // namespace ndi
