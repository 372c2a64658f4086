// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pipeline stages behind the `ndiscan` command. Each stage reads and writes
// files only, so stages can be rerun independently.
//
// Dataset directory layout written by build_dataset:
//   manifest.json                  images, splits, split seed
//   images/<split>/<panel>.png     8-bit variance images, original size
//   annotations/<split>.json       COCO subset, original coordinates
//   labels/<split>/<panel>.txt     YOLO segmentation labels
//   data.yaml                      YOLO dataset description
//   resized_<H>x<W>/...            same images/annotations, resized (optional)

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ndiscan/annotate.hpp"
#include "ndiscan/detect.hpp"
#include "ndiscan/eval.hpp"
#include "ndiscan/reduce.hpp"
#include "ndiscan/synth.hpp"

namespace ndi {

struct PipelineConfig {
  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path dataset_dir = "dataset";
  std::filesystem::path results_dir = "results";
  std::string preset = "default";
  int count = 72;
  std::uint64_t corpus_seed = 0x5EED2025ull;
  std::optional<std::filesystem::path> panels_file;  // declarative corpus, overrides preset
  DetectorParams detector;
  SplitRatios ratios;
  std::uint64_t split_seed = 7;
  std::optional<ImageSize> resize;
};

// Throws ValidationError for colliding paths or invalid ratios/params.
void validate_config(const PipelineConfig& config);

// Applies the keys present in `doc` on top of `config`.
void apply_config_json(const nlohmann::json& doc, PipelineConfig& config);

std::vector<PanelSpec> corpus_specs(const PipelineConfig& config);

CorpusManifest cmd_synth(const PipelineConfig& config, std::ostream& log);

// Reduces every corpus volume and writes the dataset layout. Output is first
// staged next to the dataset directory and moved into place only on success.
DatasetManifest cmd_build_dataset(const PipelineConfig& config, std::ostream& log);

// Runs the baseline detector over one split; returns the results file path.
std::filesystem::path cmd_detect(const PipelineConfig& config, const std::string& split,
                                 const std::optional<std::filesystem::path>& out_path,
                                 std::ostream& log);

struct EvalOutputs {
  EvalReport report;
  std::filesystem::path report_path;
  std::filesystem::path summary_path;
};

EvalOutputs cmd_eval(const PipelineConfig& config, const std::string& split,
                     const std::filesystem::path& results_path, IouMode mode,
                     const std::string& name, std::optional<double> wall_seconds,
                     std::ostream& out);

std::vector<std::filesystem::path> cmd_overlay(const PipelineConfig& config,
                                               const std::string& split,
                                               const std::filesystem::path& results_path,
                                               const std::filesystem::path& out_dir,
                                               std::ostream& log);

std::filesystem::path split_annotations(const PipelineConfig& config, const std::string& split);
std::filesystem::path split_images(const PipelineConfig& config, const std::string& split);

// Entry point; returns the process exit code (0 ok, 2 validation, 3 I/O).
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ndi
