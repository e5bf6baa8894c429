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

#include "pedsynth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#include "json.hpp"
#include "pedsynth/errors.hpp"
#include "pedsynth/fileio.hpp"
#include "pedsynth/png_io.hpp"
#include "pedsynth/rng.hpp"

namespace pedsynth {

namespace {

using json = nlohmann::ordered_json;

}  // namespace

std::string to_string(GenMode m) {
  switch (m) {
    case GenMode::oda:
      return "oda";
    case GenMode::pda:
      return "pda";
    case GenMode::mixed:
      return "mixed";
  }
  throw ValidationError("invalid GenMode value");
}

GenMode parse_gen_mode(const std::string& s) {
  if (s == "oda") return GenMode::oda;
  if (s == "pda") return GenMode::pda;
  if (s == "mixed") return GenMode::mixed;
  throw ValidationError("unknown generation mode: " + s);
}

void RunConfig::validate() const {
  if (count < 1) {
    throw ValidationError("RunConfig: count must be >= 1");
  }
  if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0)) {
    throw ValidationError("RunConfig: mix-ratio must lie in [0, 1]");
  }
  if (workers < 1) {
    throw ValidationError("RunConfig: workers must be >= 1");
  }
  oda.validate();
  pda.validate();
}

GenerationPlan prepare_plan(const RunConfig& config) {
  config.validate();
  const CorpusManifest manifest = load_manifest(config.manifest_path);
  GenerationPlan plan;
  plan.corpus = load_corpus(manifest);
  plan.seed = config.seed_override.value_or(manifest.master_seed);

  for (std::size_t i = 0; i < plan.corpus.backgrounds.size(); ++i) {
    const SceneBackground& bg = plan.corpus.backgrounds[i];
    if (!bg.occluders.empty()) {
      plan.oda_backgrounds.push_back(static_cast<int>(i));
    }
    if (bg.freespace) {
      plan.pda_backgrounds.push_back(static_cast<int>(i));
    }
  }
  plan.oda_backgrounds =
      seeded_shuffle(std::move(plan.oda_backgrounds), plan.seed,
                     "oda-backgrounds");
  plan.pda_backgrounds =
      seeded_shuffle(std::move(plan.pda_backgrounds), plan.seed,
                     "pda-backgrounds");
  return plan;
}

RecordOutcome generate_one(const GenerationPlan& plan, const RunConfig& config,
                           std::int64_t index) {
  Rng rng = record_rng(plan.seed, static_cast<std::uint64_t>(index));

  Generator generator = Generator::oda;
  switch (config.mode) {
    case GenMode::oda:
      generator = Generator::oda;
      break;
    case GenMode::pda:
      generator = Generator::pda;
      break;
    case GenMode::mixed:
      generator = rng.uniform_double() < config.mix_ratio ? Generator::oda
                                                          : Generator::pda;
      break;
  }

  RecordOutcome outcome;
  outcome.index = index;
  outcome.generator = generator;

  const std::vector<int>& eligible = generator == Generator::oda
                                         ? plan.oda_backgrounds
                                         : plan.pda_backgrounds;
  if (eligible.empty()) {
    outcome.failure_reason =
        generator == Generator::oda
            ? "no background has occluder regions"
            : "no background has a freespace mask";
    return outcome;
  }

  const auto slot = static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(eligible.size()) - 1));
  const SceneBackground& bg =
      plan.corpus.backgrounds[static_cast<std::size_t>(eligible[slot])];
  const RecordContext ctx{plan.seed, index};

  try {
    if (generator == Generator::oda) {
      outcome.record =
          generate_oda(bg, plan.corpus.assets, config.oda, rng, ctx);
    } else {
      outcome.record =
          generate_pda(bg, plan.corpus.assets, config.pda, rng, ctx);
    }
  } catch (const Error& e) {
    outcome.failure_reason = e.what();
  }
  return outcome;
}

namespace {

std::string record_file_name(std::int64_t index) {
  std::ostringstream name;
  name << "record_" << std::setw(6) << std::setfill('0') << index << ".png";
  return std::move(name).str();
}

void emit_event(std::ostream* events, std::mutex& mutex, const json& event) {
  if (events == nullptr) {
    return;
  }
  const std::string line = event.dump();
  std::lock_guard<std::mutex> lock(mutex);
  *events << line << "\n";
}

}  // namespace

RunSummary run_generation(const RunConfig& config, std::ostream* events) {
  const GenerationPlan plan = prepare_plan(config);

  std::filesystem::create_directories(config.out_dir / "images");

  std::vector<RecordOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(config.count));
  for (std::int64_t i = 0; i < config.count; ++i) {
    outcomes.push_back(RecordOutcome{i, Generator::manual, std::nullopt, ""});
  }

  std::atomic<std::int64_t> next_index{0};
  std::mutex event_mutex;
  std::vector<std::exception_ptr> worker_errors(
      static_cast<std::size_t>(config.workers));

  const auto worker = [&](int worker_id) {
    try {
      for (;;) {
        const std::int64_t index = next_index.fetch_add(1);
        if (index >= config.count) {
          return;
        }
        RecordOutcome outcome = generate_one(plan, config, index);
        json event;
        event["event"] = "record";
        event["index"] = index;
        event["generator"] = to_string(outcome.generator);
        if (outcome.record) {
          const std::string file_name = record_file_name(index);
          write_image_rgb(config.out_dir / "images" / file_name,
                          outcome.record->image);
          event["status"] = "ok";
          event["labels"] =
              static_cast<std::int64_t>(outcome.record->labels.size());
        } else {
          event["status"] = "failed";
          event["reason"] = outcome.failure_reason;
        }
        emit_event(events, event_mutex, event);
        outcomes[static_cast<std::size_t>(index)] = std::move(outcome);
      }
    } catch (...) {
      worker_errors[static_cast<std::size_t>(worker_id)] =
          std::current_exception();
    }
  };

  if (config.workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(config.workers));
    for (int w = 0; w < config.workers; ++w) {
      threads.emplace_back(worker, w);
    }
    for (std::thread& t : threads) {
      t.join();
    }
  }
  for (const std::exception_ptr& error : worker_errors) {
    if (error) {
      std::rethrow_exception(error);
    }
  }

  // Assemble labels in index order so the file is identical no matter how
  // records were scheduled across workers.
  RunSummary summary;
  summary.seed = plan.seed;
  summary.attempted = config.count;
  LabelSet labels;
  for (const RecordOutcome& outcome : outcomes) {
    const std::string generator_name = to_string(outcome.generator);
    if (!outcome.record) {
      ++summary.failed;
      ++summary.failed_by_generator[generator_name];
      ++summary.failure_reasons[outcome.failure_reason];
      continue;
    }
    ++summary.succeeded;
    ++summary.succeeded_by_generator[generator_name];
    const SyntheticRecord& record = *outcome.record;
    const std::int64_t image_id = outcome.index + 1;
    labels.images.push_back(LabeledImage{
        image_id, record_file_name(outcome.index), record.image.width(),
        record.image.height(), record.record_index, record.background_id,
        record.seed, record.generator});
    for (const PseudoLabel& label : record.labels) {
      labels.annotations.push_back(Annotation{image_id, label});
    }
  }

  if (summary.succeeded == 0) {
    std::ostringstream reasons;
    for (const auto& [reason, count] : summary.failure_reasons) {
      reasons << "\n  " << count << "x " << reason;
    }
    throw GenerationError("generation produced zero records" +
                          std::move(reasons).str());
  }

  summary.images_dir = config.out_dir / "images";
  summary.labels_path = config.out_dir / "labels.json";
  write_labels_json(labels, summary.labels_path);

  json run;
  run["seed"] = summary.seed;
  run["mode"] = to_string(config.mode);
  run["mix_ratio"] = config.mix_ratio;
  run["attempted"] = summary.attempted;
  run["succeeded"] = summary.succeeded;
  run["failed"] = summary.failed;
  run["succeeded_by_generator"] = summary.succeeded_by_generator;
  run["failed_by_generator"] = summary.failed_by_generator;
  run["failure_reasons"] = summary.failure_reasons;
  atomic_write_text(config.out_dir / "run.json", run.dump(2) + "\n");

  json event;
  event["event"] = "summary";
  event["attempted"] = summary.attempted;
  event["succeeded"] = summary.succeeded;
  event["failed"] = summary.failed;
  emit_event(events, event_mutex, event);
  return summary;
}

PrepareReport prepare_masks(const std::filesystem::path& raw_dir,
                            const std::filesystem::path& out_dir,
                            int element_side) {
  if (!std::filesystem::is_directory(raw_dir)) {
    throw IoError("prepare-masks: not a directory: " + raw_dir.string());
  }
  const StructuringElement element(element_side);

  std::vector<std::filesystem::path> candidates;
  for (const auto& entry : std::filesystem::directory_iterator(raw_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") {
      continue;
    }
    const std::string stem = entry.path().stem().string();
    if (stem.size() >= 5 && stem.substr(stem.size() - 5) == "_mask") {
      continue;
    }
    candidates.push_back(entry.path());
  }
  std::sort(candidates.begin(), candidates.end());

  PrepareReport report;
  report.candidates = static_cast<std::int64_t>(candidates.size());
  if (!candidates.empty()) {
    std::filesystem::create_directories(out_dir);
  }

  for (const std::filesystem::path& path : candidates) {
    const std::string stem = path.stem().string();
    try {
      DecodedPng decoded = read_png(path);
      BinaryMask mask(1, 1);
      if (decoded.alpha_mask) {
        mask = std::move(*decoded.alpha_mask);
      } else {
        const auto sibling = path.parent_path() / (stem + "_mask.png");
        if (!std::filesystem::is_regular_file(sibling)) {
          throw IoError("no alpha channel and no " + sibling.string());
        }
        mask = read_mask(sibling);
        if (mask.width() != decoded.rgb.width() ||
            mask.height() != decoded.rgb.height()) {
          throw ValidationError("mask dimensions do not match the image");
        }
      }
      // The paper's cleanup: OPEN to drop speckles, then ERODE to pull the
      // cut-out boundary inside the true silhouette.
      const BinaryMask cleaned = erode(opening(mask, element), element);
      if (cleaned.empty()) {
        report.excluded.push_back(stem);
        continue;
      }
      write_image_rgb(out_dir / (stem + ".png"), decoded.rgb);
      write_mask(out_dir / (stem + "_mask.png"), cleaned);
      ++report.written;
    } catch (const std::exception& e) {
      report.errors.emplace_back(path.filename().string(), e.what());
    }
  }
  return report;
}

std::string prepare_report_json(const PrepareReport& report) {
  json doc;
  doc["candidates"] = report.candidates;
  doc["written"] = report.written;
  doc["excluded"] = report.excluded;
  doc["errors"] = json::array();
  for (const auto& [file, message] : report.errors) {
    json e;
    e["file"] = file;
    e["message"] = message;
    doc["errors"].push_back(std::move(e));
  }
  return doc.dump(2) + "\n";
}

}  // namespace pedsynth
