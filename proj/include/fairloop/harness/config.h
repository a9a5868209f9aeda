// Copyright 2026 The Fairloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRLOOP_HARNESS_CONFIG_H_
#define FAIRLOOP_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>

#include "fairloop/fairness/report.h"
#include "fairloop/gbdt/params.h"
#include "fairloop/integration/feedback.h"
#include "fairloop/integration/policy.h"
#include "json.hpp"

namespace fairloop::harness {

struct PrepareConfig {
  enum class Mode { kUndersample, kStratified };
  Mode mode = Mode::kUndersample;
  // undersample: balanced train of n_train rows, holdout of n_holdout rows.
  std::size_t n_train = 0;
  std::size_t n_holdout = 0;
  // stratified: draw n_sample rows preserving the target share, then split
  // them into n_train train rows and the rest as test.
  std::size_t n_sample = 0;
  // Applications shown for feedback when no display_csv is given: the first
  // display_count test rows.
  std::size_t display_count = 0;
};

// Experiment description. Relative paths resolve against the config file's
// directory.
struct ExperimentConfig {
  std::filesystem::path schema_config;
  std::filesystem::path labeled_csv;
  std::optional<std::filesystem::path> display_csv;
  PrepareConfig prepare;
  gbdt::GbdtParams gbdt;  // seed defaults to the experiment seed
  fairness::ReportConfig fairness;
  double alpha = 1.0;
  integration::FlipSource flip_source = integration::FlipSource::kPredicted;
  std::optional<integration::FeedbackMapping> feedback_mapping;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  int replay_threads = 1;
};

ExperimentConfig ParseExperimentConfig(const nlohmann::json& json,
                                       const std::filesystem::path& base_dir);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
nlohmann::json ToJson(const ExperimentConfig& config);

std::string_view PrepareModeName(PrepareConfig::Mode mode);

}  // namespace fairloop::harness

#endif  // FAIRLOOP_HARNESS_CONFIG_H_
