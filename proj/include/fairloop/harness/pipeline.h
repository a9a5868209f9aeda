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

#ifndef FAIRLOOP_HARNESS_PIPELINE_H_
#define FAIRLOOP_HARNESS_PIPELINE_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "fairloop/common/error.h"
#include "fairloop/data/binning.h"
#include "fairloop/data/dataset.h"
#include "fairloop/data/preprocess.h"
#include "fairloop/data/schema.h"
#include "fairloop/fairness/report.h"
#include "fairloop/harness/config.h"
#include "fairloop/integration/policy.h"

namespace fairloop::harness {

// Imputed splits plus the fitted preprocessing.
struct PreparedData {
  data::SchemaConfig schema_config;
  data::ImputationRule imputation;
  std::shared_ptr<const data::Encoder> encoder;
  std::map<std::string, data::BinningRule> bins;  // every numeric feature
  data::Dataset train;
  data::Dataset test;
  data::Dataset display;  // applications that can receive feedback
};

// Splits the labeled CSV, fits imputation, encoding and bins on the train
// split, and writes <out>/prepared/{train,test,display}.csv, schema.json and
// preprocessing.json. Returns the prepared directory.
std::filesystem::path Prepare(const ExperimentConfig& config,
                              Warnings* warnings = nullptr);
PreparedData LoadPrepared(const std::filesystem::path& prepared_dir,
                          Warnings* warnings = nullptr);

struct Baseline {
  std::shared_ptr<const PreparedData> prepared;
  std::filesystem::path prepared_dir;
  fairness::ReportConfig fairness;
  double alpha = 1.0;
  integration::FlipSource flip_source = integration::FlipSource::kPredicted;
  std::uint64_t seed = 0;
  std::shared_ptr<const integration::BaselineContext> context;
  std::shared_ptr<const fairness::Evaluator> evaluator;
  std::shared_ptr<const fairness::FairnessReport> report;
};

// Trains the class-balanced baseline on the prepared train split and
// evaluates it on the test split. The display split is the feedback pool.
Baseline BuildBaseline(const std::filesystem::path& prepared_dir,
                       const ExperimentConfig& config, Warnings* warnings = nullptr);

inline constexpr int kManifestSchemaVersion = 1;

// Writes model.json, report.{json,txt,csv} and manifest.json.
void WriteBaseline(const Baseline& baseline, const std::filesystem::path& dir);
// Rebuilds a baseline from a directory written by WriteBaseline; throws
// kFailedPrecondition if the retrained fingerprint differs from model.json.
Baseline LoadBaseline(const std::filesystem::path& dir, Warnings* warnings = nullptr);

}  // namespace fairloop::harness

#endif  // FAIRLOOP_HARNESS_PIPELINE_H_
