// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "ndiscan/errors.hpp"
#include "ndiscan/json_io.hpp"
#include "ndiscan/overlay.hpp"
#include "ndiscan/png_io.hpp"

namespace ndi {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void require_split(const DatasetManifest& manifest, const std::string& split) {
  if (!manifest.splits.count(split)) throw ValidationError("unknown split '" + split + "'");
}

ThresholdMode parse_threshold_mode(const std::string& s) {
  if (s == "otsu") return ThresholdMode::kOtsu;
  if (s == "percentile") return ThresholdMode::kPercentile;
  throw ValidationError("threshold mode must be 'otsu' or 'percentile', got '" + s + "'");
}

Polarity parse_polarity(const std::string& s) {
  if (s == "dark") return Polarity::kDark;
  if (s == "bright") return Polarity::kBright;
  throw ValidationError("polarity must be 'dark' or 'bright', got '" + s + "'");
}

IouMode parse_mode(const std::string& s) {
  if (s == "box") return IouMode::kBox;
  if (s == "mask") return IouMode::kMask;
  throw ValidationError("mode must be 'box' or 'mask', got '" + s + "'");
}

ImageSize parse_size(const std::string& s) {
  int h = 0, w = 0;
  char x = 0;
  std::istringstream in(s);
  if (!(in >> h >> x >> w) || (x != 'x' && x != 'X') || h < 1 || w < 1 || !in.eof()) {
    throw ValidationError("size must look like 512x512, got '" + s + "'");
  }
  return {h, w};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

// Writes images, COCO annotations and YOLO labels for one frame size.
void write_frame(const fs::path& root, const DatasetManifest& manifest,
                 const std::map<int, GrayImage>& images, const std::vector<InstanceLabel>& labels) {
  for (const auto& [split, ids] : manifest.splits) {
    ensure_dir(root / "images" / split);
    for (const int id : ids) {
      export_png(images.at(id), root / "images" / split / manifest.find(id)->file_name);
    }
  }
  ensure_dir(root / "annotations");
  for (const char* split : kSplitNames) {
    const fs::path coco = root / "annotations" / (std::string(split) + ".json");
    write_coco(manifest, labels, split, coco);
    coco_to_yolo(coco, root / "labels" / split);
  }
}

std::string data_yaml(const fs::path& root) {
  return "path: " + fs::absolute(root).lexically_normal().string() +
         "\ntrain: images/train\nval: images/val\ntest: images/test\nnames:\n  0: defect\n";
}

}  // namespace

void validate_config(const PipelineConfig& config) {
  const auto a = fs::absolute(config.corpus_dir).lexically_normal();
  const auto b = fs::absolute(config.dataset_dir).lexically_normal();
  const auto c = fs::absolute(config.results_dir).lexically_normal();
  if (a == b || a == c || b == c) {
    throw ValidationError("corpus, dataset and results directories must be distinct");
  }
  if (config.count < 1) throw ValidationError("panel count must be >= 1");
  const double sum = config.ratios.train + config.ratios.val + config.ratios.test;
  if (config.ratios.train < 0 || config.ratios.val < 0 || config.ratios.test < 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("split ratios must be >= 0 and sum to 1");
  }
  validate_params(config.detector);
  if (config.resize && (config.resize->height < 1 || config.resize->width < 1)) {
    throw ValidationError("resize target must be at least 1x1");
  }
}

void apply_config_json(const json& doc, PipelineConfig& config) {
  try {
    if (doc.contains("corpus_dir")) config.corpus_dir = doc["corpus_dir"].get<std::string>();
    if (doc.contains("dataset_dir")) config.dataset_dir = doc["dataset_dir"].get<std::string>();
    if (doc.contains("results_dir")) config.results_dir = doc["results_dir"].get<std::string>();
    if (doc.contains("preset")) config.preset = doc["preset"].get<std::string>();
    if (doc.contains("count")) config.count = doc["count"].get<int>();
    if (doc.contains("seed")) config.corpus_seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("panels")) config.panels_file = doc["panels"].get<std::string>();
    if (doc.contains("detector")) {
      const auto& d = doc["detector"];
      if (d.contains("threshold")) {
        config.detector.threshold_mode = parse_threshold_mode(d["threshold"].get<std::string>());
      }
      if (d.contains("percentile")) config.detector.percentile = d["percentile"].get<double>();
      if (d.contains("min_area")) config.detector.min_area = d["min_area"].get<int>();
      if (d.contains("morphology_radius")) {
        config.detector.morphology_radius = d["morphology_radius"].get<int>();
      }
      if (d.contains("polarity")) config.detector.polarity = parse_polarity(d["polarity"].get<std::string>());
    }
    if (doc.contains("split")) {
      const auto& s = doc["split"];
      if (s.contains("ratios")) {
        const auto r = s["ratios"].get<std::vector<double>>();
        if (r.size() != 3) throw ValidationError("split.ratios needs three numbers");
        config.ratios = SplitRatios{r[0], r[1], r[2]};
      }
      if (s.contains("seed")) config.split_seed = s["seed"].get<std::uint64_t>();
    }
    if (doc.contains("resize")) {
      const auto r = doc["resize"].get<std::vector<int>>();
      if (r.size() != 2) throw ValidationError("resize needs [height, width]");
      config.resize = ImageSize{r[0], r[1]};
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config: ") + e.what());
  }
}

std::vector<PanelSpec> corpus_specs(const PipelineConfig& config) {
  if (config.panels_file) return panels_from_json(read_json_file(*config.panels_file));
  if (config.preset != "default") throw ValidationError("unknown preset '" + config.preset + "'");
  return default_preset(config.count, config.corpus_seed);
}

CorpusManifest cmd_synth(const PipelineConfig& config, std::ostream& log) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  const CorpusManifest manifest = generate_corpus(corpus_specs(config), config.corpus_dir);
  std::size_t labels = 0;
  for (const auto& e : manifest.entries) labels += e.label_count;
  log << "synth: " << manifest.entries.size() << " volumes, " << labels << " defects -> "
      << config.corpus_dir.string() << " (" << seconds_since(start) << " s)\n";
  return manifest;
}

DatasetManifest cmd_build_dataset(const PipelineConfig& config, std::ostream& log) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  if (!fs::is_directory(config.corpus_dir)) {
    throw ValidationError("corpus directory " + config.corpus_dir.string() + " does not exist");
  }
  if (!fs::exists(config.corpus_dir / kCorpusManifestName)) {
    throw ValidationError("corpus directory " + config.corpus_dir.string() + " has no " +
                          kCorpusManifestName);
  }
  const CorpusManifest corpus = read_corpus_manifest(config.corpus_dir);
  if (corpus.entries.empty()) throw ValidationError("corpus is empty");

  DatasetManifest manifest;
  manifest.seed = config.split_seed;
  std::vector<int> ids;
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    manifest.images.push_back(ImageRecord{id, corpus.entries[i].panel_id + ".png", 0, 0,
                                          corpus.entries[i].panel_id});
    ids.push_back(id);
  }
  manifest.splits = split_dataset(ids, config.ratios, config.split_seed);

  const fs::path staging = config.dataset_dir.string() + ".partial";
  std::error_code ec;
  fs::remove_all(staging, ec);
  try {
    std::map<int, GrayImage> images;
    std::vector<InstanceLabel> labels;
    for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
      const CorpusEntry& entry = corpus.entries[i];
      ImageRecord& record = manifest.images[i];
      const ScanVolume volume = read_volume(config.corpus_dir / entry.volume_file);
      GrayImage image = normalize_to_gray(variance_reduce(volume));
      record.width = image.width;
      record.height = image.height;

      const GroundTruth gt = read_ground_truth(config.corpus_dir / entry.ground_truth_file);
      if (gt.width != image.width || gt.height != image.height) {
        throw ValidationError("ground truth for '" + entry.panel_id + "' does not match its volume");
      }
      for (InstanceLabel label : gt.labels) {
        label.image_id = record.image_id;
        labels.push_back(std::move(label));
      }
      images.emplace(record.image_id, std::move(image));
    }

    ensure_dir(staging);
    write_manifest(manifest, staging / "manifest.json");
    write_frame(staging, manifest, images, labels);
    write_text(staging / "data.yaml", data_yaml(config.dataset_dir));

    if (config.resize) {
      const ImageSize to = *config.resize;
      DatasetManifest resized = manifest;
      std::map<int, GrayImage> resized_images;
      std::vector<InstanceLabel> resized_labels;
      for (auto& record : resized.images) {
        const ImageSize from{record.height, record.width};
        resized_images.emplace(record.image_id, resize(images.at(record.image_id), to.height, to.width));
        std::vector<InstanceLabel> mine;
        for (const auto& l : labels) {
          if (l.image_id == record.image_id) mine.push_back(l);
        }
        for (auto& l : scale_labels(mine, from, to)) resized_labels.push_back(std::move(l));
        record.width = to.width;
        record.height = to.height;
      }
      const fs::path root = staging / ("resized_" + std::to_string(to.height) + "x" +
                                       std::to_string(to.width));
      ensure_dir(root);
      write_frame(root, resized, resized_images, resized_labels);
    }

    fs::remove_all(config.dataset_dir, ec);
    fs::rename(staging, config.dataset_dir, ec);
    if (ec) throw IoError("cannot move dataset into " + config.dataset_dir.string() + ": " + ec.message());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }

  log << "build-dataset: " << manifest.images.size() << " images";
  for (const char* split : kSplitNames) log << ", " << split << "=" << manifest.splits[split].size();
  log << " -> " << config.dataset_dir.string() << " (" << seconds_since(start) << " s)\n";
  return manifest;
}

fs::path split_annotations(const PipelineConfig& config, const std::string& split) {
  return config.dataset_dir / "annotations" / (split + ".json");
}

fs::path split_images(const PipelineConfig& config, const std::string& split) {
  return config.dataset_dir / "images" / split;
}

fs::path cmd_detect(const PipelineConfig& config, const std::string& split,
                    const std::optional<fs::path>& out_path, std::ostream& log) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  const DatasetManifest manifest = read_manifest(config.dataset_dir / "manifest.json");
  require_split(manifest, split);

  std::vector<Prediction> all;
  for (const int id : manifest.splits.at(split)) {
    const ImageRecord& record = *manifest.find(id);
    const GrayImage image = read_png_gray(split_images(config, split) / record.file_name);
    for (auto& p : detect(image, config.detector)) {
      p.image_id = id;
      all.push_back(std::move(p));
    }
  }
  const fs::path path = out_path ? *out_path : config.results_dir / ("baseline_" + split + ".json");
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  write_results(all, path);
  log << "detect: " << manifest.splits.at(split).size() << " images, " << all.size()
      << " predictions -> " << path.string() << " (" << seconds_since(start) << " s)\n";
  return path;
}

EvalOutputs cmd_eval(const PipelineConfig& config, const std::string& split,
                     const fs::path& results_path, IouMode mode, const std::string& name,
                     std::optional<double> wall_seconds, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path coco = split_annotations(config, split);
  if (!fs::exists(coco)) throw ValidationError("no annotations for split '" + split + "' at " + coco.string());
  if (!fs::exists(results_path)) throw ValidationError("results file " + results_path.string() + " does not exist");

  EvalOutputs outputs;
  outputs.report = evaluate(coco, results_path, mode);
  const std::string label = name.empty() ? results_path.stem().string() : name;
  const SummaryRow row{label, outputs.report.at(0.50).ap.ap, outputs.report.at(0.75).ap.ap,
                       wall_seconds.value_or(seconds_since(start))};
  const std::string table = format_summary_table(std::span<const SummaryRow>(&row, 1));

  ensure_dir(config.results_dir);
  outputs.report_path = config.results_dir / (label + ".report.json");
  outputs.summary_path = config.results_dir / (label + ".summary.txt");
  write_report(outputs.report, outputs.report_path);
  write_text(outputs.summary_path, table);
  out << table;
  return outputs;
}

std::vector<fs::path> cmd_overlay(const PipelineConfig& config, const std::string& split,
                                  const fs::path& results_path, const fs::path& out_dir,
                                  std::ostream& log) {
  const DatasetManifest manifest = read_manifest(config.dataset_dir / "manifest.json");
  require_split(manifest, split);
  const CocoDataset coco = read_coco(split_annotations(config, split));
  const std::vector<Prediction> predictions = read_results(results_path);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (coco.images.end() == std::find_if(coco.images.begin(), coco.images.end(), [&](const auto& im) {
          return im.image_id == predictions[i].image_id;
        })) {
      throw ValidationError("prediction " + std::to_string(i) + " references image " +
                            std::to_string(predictions[i].image_id) + " outside split '" + split + "'");
    }
  }

  ensure_dir(out_dir);
  std::vector<fs::path> written;
  for (const auto& im : coco.images) {
    const GrayImage image = read_png_gray(split_images(config, split) / im.file_name);
    std::vector<InstanceLabel> gts;
    for (const auto& l : coco.labels) {
      if (l.image_id == im.image_id) gts.push_back(l);
    }
    std::vector<Prediction> preds;
    for (const auto& p : predictions) {
      if (p.image_id == im.image_id) preds.push_back(p);
    }
    const fs::path path = out_dir / im.file_name;
    render_overlay(image, gts, preds, path);
    written.push_back(path);
  }
  log << "overlay: " << written.size() << " images -> " << out_dir.string() << "\n";
  return written;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic ultrasonic scan toolkit: synth, build-dataset, detect, eval, overlay"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its keys");

  std::optional<std::string> corpus, dataset, results_dir, preset, panels, ratios, resize_arg;
  std::optional<std::string> threshold, polarity;
  std::optional<int> count, min_area, radius;
  std::optional<double> percentile;
  std::optional<std::uint64_t> seed, split_seed;
  std::string split = "test";
  std::string results_file;
  std::string mode = "box";
  std::string name;
  std::optional<double> wall_seconds;
  std::optional<std::string> out_file;
  std::string out_dir = "overlays";

  auto add_detector_flags = [&](CLI::App* sub) {
    sub->add_option("--threshold", threshold, "otsu or percentile");
    sub->add_option("--percentile", percentile, "percentile for --threshold percentile");
    sub->add_option("--min-area", min_area, "drop components smaller than this (px)");
    sub->add_option("--radius", radius, "morphology radius (px)");
    sub->add_option("--polarity", polarity, "dark or bright foreground");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scan corpus");
  synth->add_option("--corpus", corpus, "output corpus directory");
  synth->add_option("--count", count, "number of panels for the preset");
  synth->add_option("--preset", preset, "generator preset (default)");
  synth->add_option("--seed", seed, "corpus seed");
  synth->add_option("--panels", panels, "declarative corpus description (JSON)");

  CLI::App* build = app.add_subcommand("build-dataset", "reduce volumes and export the dataset");
  build->add_option("--corpus", corpus, "corpus directory");
  build->add_option("--dataset", dataset, "dataset directory");
  build->add_option("--split-seed", split_seed, "split shuffle seed");
  build->add_option("--ratios", ratios, "train,val,test ratios");
  build->add_option("--resize", resize_arg, "also export resized copies, e.g. 512x512");

  CLI::App* det = app.add_subcommand("detect", "run the baseline detector on a split");
  det->add_option("--dataset", dataset, "dataset directory");
  det->add_option("--results-dir", results_dir, "where results go");
  det->add_option("--split", split, "split name");
  det->add_option("--out", out_file, "results file path");
  add_detector_flags(det);

  CLI::App* ev = app.add_subcommand("eval", "score a results file against a split");
  ev->add_option("--dataset", dataset, "dataset directory");
  ev->add_option("--results-dir", results_dir, "where report files go");
  ev->add_option("--split", split, "split name");
  ev->add_option("--results", results_file, "results JSON")->required();
  ev->add_option("--mode", mode, "box or mask IoU");
  ev->add_option("--name", name, "row name in the summary table");
  ev->add_option("--wall-seconds", wall_seconds, "time column value (defaults to eval time)");

  CLI::App* ov = app.add_subcommand("overlay", "draw ground truth and predictions");
  ov->add_option("--dataset", dataset, "dataset directory");
  ov->add_option("--split", split, "split name");
  ov->add_option("--results", results_file, "results JSON")->required();
  ov->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    PipelineConfig config;
    if (config_path) apply_config_json(read_json_file(*config_path), config);
    if (corpus) config.corpus_dir = *corpus;
    if (dataset) config.dataset_dir = *dataset;
    if (results_dir) config.results_dir = *results_dir;
    if (preset) config.preset = *preset;
    if (panels) config.panels_file = *panels;
    if (count) config.count = *count;
    if (seed) config.corpus_seed = *seed;
    if (split_seed) config.split_seed = *split_seed;
    if (ratios) {
      std::vector<double> r;
      std::stringstream ss(*ratios);
      std::string part;
      while (std::getline(ss, part, ',')) {
        try {
          r.push_back(std::stod(part));
        } catch (const std::exception&) {
          throw ValidationError("bad ratio '" + part + "'");
        }
      }
      if (r.size() != 3) throw ValidationError("--ratios needs three comma-separated numbers");
      config.ratios = SplitRatios{r[0], r[1], r[2]};
    }
    if (resize_arg) config.resize = parse_size(*resize_arg);
    if (threshold) config.detector.threshold_mode = parse_threshold_mode(*threshold);
    if (percentile) config.detector.percentile = *percentile;
    if (min_area) config.detector.min_area = *min_area;
    if (radius) config.detector.morphology_radius = *radius;
    if (polarity) config.detector.polarity = parse_polarity(*polarity);
    validate_config(config);

    if (synth->parsed()) {
      cmd_synth(config, out);
    } else if (build->parsed()) {
      cmd_build_dataset(config, out);
    } else if (det->parsed()) {
      cmd_detect(config, split, out_file ? std::optional<fs::path>(*out_file) : std::nullopt, out);
    } else if (ev->parsed()) {
      cmd_eval(config, split, results_file, parse_mode(mode), name, wall_seconds, out);
    } else if (ov->parsed()) {
      cmd_overlay(config, split, results_file, out_dir, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace ndi
