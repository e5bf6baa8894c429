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

// Generation runner: plans a run from a manifest, generates records over a
// worker pool, and writes images + labels + a machine-readable summary.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pedsynth/corpus.hpp"
#include "pedsynth/oda.hpp"
#include "pedsynth/pda.hpp"
#include "pedsynth/record.hpp"

namespace pedsynth {

enum class GenMode { oda, pda, mixed };

std::string to_string(GenMode m);
GenMode parse_gen_mode(const std::string& s);

struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path out_dir;
  // Unset: the manifest's master seed applies.
  std::optional<std::uint64_t> seed_override;
  std::int64_t count = 0;
  GenMode mode = GenMode::mixed;
  double mix_ratio = 0.5;  // fraction of records drawn as ODA in mixed mode
  int workers = 1;
  OdaParams oda;
  PdaParams pda;

  void validate() const;  // throws ValidationError
};

// Immutable, shareable inputs of a run.
struct GenerationPlan {
  Corpus corpus;
  std::uint64_t seed = 0;
  // Background indices eligible per generator, pre-shuffled with labeled
  // streams ("oda-backgrounds" / "pda-backgrounds") per Algorithm 1/2 line 2.
  std::vector<int> oda_backgrounds;
  std::vector<int> pda_backgrounds;
};

GenerationPlan prepare_plan(const RunConfig& config);

struct RecordOutcome {
  std::int64_t index = 0;
  Generator generator = Generator::manual;
  std::optional<SyntheticRecord> record;  // nullopt: generation failed
  std::string failure_reason;
};

// Generates record `index` from scratch. Pure function of (plan, config,
// index): its only randomness is record_rng(plan.seed, index), which is why
// worker count and scheduling order never change any output. Draw order:
// mixed-mode generator coin (mixed mode only), background pick, then the
// generator's documented per-record draws.
RecordOutcome generate_one(const GenerationPlan& plan, const RunConfig& config,
                           std::int64_t index);

struct RunSummary {
  std::uint64_t seed = 0;
  std::int64_t attempted = 0;
  std::int64_t succeeded = 0;
  std::int64_t failed = 0;
  std::map<std::string, std::int64_t> succeeded_by_generator;
  std::map<std::string, std::int64_t> failed_by_generator;
  std::map<std::string, std::int64_t> failure_reasons;
  std::filesystem::path labels_path;
  std::filesystem::path images_dir;
};

// Runs indices 0..count-1 over `config.workers` threads, writes
// images/record_NNNNNN.png, labels.json and run.json under config.out_dir.
// `events`, when non-null, receives one JSON object per line per record.
// Throws GenerationError when not a single record succeeds.
RunSummary run_generation(const RunConfig& config, std::ostream* events);

// --- prepare-masks ---

struct PrepareReport {
  std::int64_t candidates = 0;
  std::int64_t written = 0;
  std::vector<std::string> excluded;  // stems whose masks cleaned to empty
  std::vector<std::pair<std::string, std::string>> errors;  // file, message
};

// Cleans every "<stem>.png" in raw_dir (mask from the alpha channel, or a
// "<stem>_mask.png" sibling) with OPEN then ERODE, writing "<stem>.png" +
// "<stem>_mask.png" pairs into out_dir. Per-file failures are recorded, not
// fatal.
PrepareReport prepare_masks(const std::filesystem::path& raw_dir,
                            const std::filesystem::path& out_dir,
                            int element_side);

std::string prepare_report_json(const PrepareReport& report);

}  // namespace pedsynth
