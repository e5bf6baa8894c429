// Copyright 2026 The pedsynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pedsynth: deterministic copy-paste augmentation for occluded-pedestrian
// detection datasets.
//
// Subcommands: prepare-masks, gen, split, stats, eval.
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 generation
// produced zero records.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pedsynth/annotate.hpp"
#include "pedsynth/errors.hpp"
#include "pedsynth/evalkit.hpp"
#include "pedsynth/fileio.hpp"
#include "pedsynth/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoRecords = 4;

// Environment overrides; a flag given on the command line always wins.
std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("PEDSYNTH_SEED");
  if (raw == nullptr || *raw == '\0') {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const std::string text(raw);
    const std::uint64_t value = std::stoull(text, &used);
    if (used != text.size()) {
      throw std::invalid_argument(text);
    }
    return value;
  } catch (const std::exception&) {
    throw pedsynth::ValidationError(
        "PEDSYNTH_SEED must be an unsigned integer");
  }
}

std::optional<int> env_workers() {
  const char* raw = std::getenv("PEDSYNTH_WORKERS");
  if (raw == nullptr || *raw == '\0') {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const std::string text(raw);
    const int value = std::stoi(text, &used);
    if (used != text.size() || value < 1) {
      throw std::invalid_argument(text);
    }
    return value;
  } catch (const std::exception&) {
    throw pedsynth::ValidationError(
        "PEDSYNTH_WORKERS must be a positive integer");
  }
}

void require_file(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw pedsynth::ValidationError(std::string(what) +
                                    " not found: " + path.string());
  }
}

int run(int argc, char** argv) {
  CLI::App app{
      "pedsynth: occlusion-aware (ODA) and posture (PDA) copy-paste "
      "augmentation with pseudo-labels, dataset split, stats and strict-IoU "
      "evaluation"};
  app.require_subcommand(1);

  // --- prepare-masks ---
  auto* prepare = app.add_subcommand(
      "prepare-masks", "Clean raw cut-out masks with OPEN then ERODE");
  std::string prepare_in;
  std::string prepare_out;
  int element_side = 3;
  prepare->add_option("--in", prepare_in, "Directory of raw PNG assets")
      ->required();
  prepare->add_option("--out", prepare_out, "Directory for cleaned assets")
      ->required();
  prepare->add_option("--element", element_side,
                      "Structuring element side (odd)");

  // --- gen ---
  auto* gen = app.add_subcommand(
      "gen", "Generate synthetic records from a corpus manifest");
  std::string gen_manifest;
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  std::int64_t gen_count = 0;
  std::string gen_mode = "mixed";
  double gen_mix_ratio = 0.5;
  int gen_workers = 1;
  int gen_retry = 16;
  int gen_max_occluders = 3;
  int gen_pedestrians = 1;
  double gen_scale_lo = 0.8;
  double gen_scale_hi = 1.2;
  gen->add_option("--manifest", gen_manifest, "Corpus manifest JSON")
      ->required();
  gen->add_option("--out", gen_out, "Output dataset directory")->required();
  auto* gen_seed_opt = gen->add_option(
      "--seed", gen_seed, "Master seed (default: manifest master_seed)");
  gen->add_option("--count", gen_count, "Number of records to generate")
      ->required();
  gen->add_option("--mode", gen_mode, "oda, pda or mixed (default mixed)");
  gen->add_option("--mix-ratio", gen_mix_ratio,
                  "Fraction of ODA records in mixed mode (default 0.5)");
  auto* gen_workers_opt =
      gen->add_option("--workers", gen_workers, "Worker threads (default 1)");
  gen->add_option("--retry-budget", gen_retry,
                  "Placement attempts per slot (default 16)");
  gen->add_option("--max-occluders", gen_max_occluders,
                  "ODA: occluders used per record at most (default 3)");
  gen->add_option("--pedestrians", gen_pedestrians,
                  "PDA: pedestrians pasted per record (default 1)");
  gen->add_option("--scale-lo", gen_scale_lo,
                  "PDA: lower rescale multiplier (default 0.8)");
  gen->add_option("--scale-hi", gen_scale_hi,
                  "PDA: upper rescale multiplier (default 1.2)");

  // --- split ---
  auto* split = app.add_subcommand(
      "split", "Assign labeled images to train/val/test at 5:3:2");
  std::string split_labels;
  std::uint64_t split_seed = 0;
  std::string split_out;
  split->add_option("--labels", split_labels, "labels.json path")->required();
  auto* split_seed_opt =
      split->add_option("--seed", split_seed, "Shuffle seed (default 0)");
  split->add_option("--out", split_out,
                    "Split JSON path (default: print to stdout)");

  // --- stats ---
  auto* stats = app.add_subcommand("stats", "Summarize a label set");
  std::string stats_labels;
  std::string stats_split;
  std::string stats_out;
  stats->add_option("--labels", stats_labels, "labels.json path")->required();
  stats->add_option("--split", stats_split,
                    "Optional split JSON for per-split counts");
  stats->add_option("--out", stats_out, "Write the JSON summary here too");

  // --- eval ---
  auto* eval = app.add_subcommand(
      "eval", "Score detections against labels at a strict IoU");
  std::string eval_dets;
  std::string eval_labels;
  double eval_iou = 0.75;
  int eval_max_dets = 100;
  std::string eval_out;
  eval->add_option("--detections", eval_dets, "Detections JSON")->required();
  eval->add_option("--labels", eval_labels, "labels.json path")->required();
  eval->add_option("--iou", eval_iou, "IoU threshold (default 0.75)");
  eval->add_option("--max-dets", eval_max_dets,
                   "Detections kept per image (default 100)");
  eval->add_option("--out", eval_out, "Write the JSON report here too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints the message; fold its exit codes onto ours.
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (prepare->parsed()) {
    const pedsynth::PrepareReport report =
        pedsynth::prepare_masks(prepare_in, prepare_out, element_side);
    std::cout << pedsynth::prepare_report_json(report);
    const bool all_failed =
        report.candidates > 0 &&
        static_cast<std::int64_t>(report.errors.size()) == report.candidates;
    return all_failed ? kExitIo : kExitOk;
  }

  if (gen->parsed()) {
    require_file(gen_manifest, "manifest");
    pedsynth::RunConfig config;
    config.manifest_path = gen_manifest;
    config.out_dir = gen_out;
    if (gen_seed_opt->count() > 0) {
      config.seed_override = gen_seed;
    } else if (const auto seed = env_seed()) {
      config.seed_override = *seed;
    }
    config.count = gen_count;
    config.mode = pedsynth::parse_gen_mode(gen_mode);
    config.mix_ratio = gen_mix_ratio;
    if (gen_workers_opt->count() > 0) {
      config.workers = gen_workers;
    } else if (const auto workers = env_workers()) {
      config.workers = *workers;
    }
    config.oda.retry_budget = gen_retry;
    config.oda.max_occluders = gen_max_occluders;
    config.pda.retry_budget = gen_retry;
    config.pda.pedestrians = gen_pedestrians;
    config.pda.scale_lo = gen_scale_lo;
    config.pda.scale_hi = gen_scale_hi;

    const pedsynth::RunSummary summary =
        pedsynth::run_generation(config, &std::cerr);
    std::cout << "generated " << summary.succeeded << "/" << summary.attempted
              << " records (seed " << summary.seed << ") into "
              << config.out_dir.string() << "\n";
    for (const auto& [generator, count] : summary.succeeded_by_generator) {
      std::cout << "  " << generator << ": " << count << " ok";
      const auto failed = summary.failed_by_generator.find(generator);
      if (failed != summary.failed_by_generator.end()) {
        std::cout << ", " << failed->second << " failed";
      }
      std::cout << "\n";
    }
    return kExitOk;
  }

  if (split->parsed()) {
    require_file(split_labels, "labels file");
    const pedsynth::LabelSet set = pedsynth::read_labels_json(split_labels);
    std::vector<std::int64_t> ids;
    ids.reserve(set.images.size());
    for (const auto& image : set.images) {
      ids.push_back(image.id);
    }
    std::uint64_t seed = 0;
    if (split_seed_opt->count() > 0) {
      seed = split_seed;
    } else if (const auto env = env_seed()) {
      seed = *env;
    }
    const pedsynth::SplitAssignment assignment =
        pedsynth::split_records(ids, seed);
    if (split_out.empty()) {
      std::cout << pedsynth::split_to_json(assignment);
    } else {
      pedsynth::write_split_json(assignment, split_out);
      std::cout << "train " << assignment.train.size() << " / val "
                << assignment.val.size() << " / test "
                << assignment.test.size() << " -> " << split_out << "\n";
    }
    return kExitOk;
  }

  if (stats->parsed()) {
    require_file(stats_labels, "labels file");
    const pedsynth::LabelSet set = pedsynth::read_labels_json(stats_labels);
    std::optional<pedsynth::SplitAssignment> assignment;
    if (!stats_split.empty()) {
      require_file(stats_split, "split file");
      assignment = pedsynth::read_split_json(stats_split);
    }
    const pedsynth::StatsTable table = pedsynth::compute_stats(
        set, assignment ? &*assignment : nullptr);
    std::cout << pedsynth::format_stats_table(table);
    if (!stats_out.empty()) {
      pedsynth::atomic_write_text(stats_out, pedsynth::stats_to_json(table));
    }
    return kExitOk;
  }

  if (eval->parsed()) {
    require_file(eval_dets, "detections file");
    require_file(eval_labels, "labels file");
    const auto detections = pedsynth::read_detections_json(eval_dets);
    const pedsynth::LabelSet set = pedsynth::read_labels_json(eval_labels);
    const pedsynth::EvalReport report =
        pedsynth::evaluate(detections, pedsynth::ground_truths_from(set),
                           eval_iou, eval_max_dets);
    std::cout << pedsynth::report_table(report);
    if (!eval_out.empty()) {
      pedsynth::write_report_json(report, eval_out);
    }
    return kExitOk;
  }

  return kExitConfig;  // unreachable: a subcommand is required
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pedsynth::GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoRecords;
  } catch (const pedsynth::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const pedsynth::Error& e) {
    // Manifest, validation and metric errors are configuration problems.
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
