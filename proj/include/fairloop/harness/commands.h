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

#ifndef FAIRLOOP_HARNESS_COMMANDS_H_
#define FAIRLOOP_HARNESS_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairloop/harness/config.h"
#include "fairloop/harness/pipeline.h"
#include "fairloop/integration/feedback.h"
#include "fairloop/integration/policy.h"
#include "fairloop/integration/retrain.h"

namespace fairloop::harness {

enum class ReplayMode { kGlobal, kPersonalized };
std::string_view ReplayModeName(ReplayMode mode);
ReplayMode ParseReplayMode(std::string_view name);

struct ReplayOptions {
  ReplayMode mode = ReplayMode::kGlobal;
  integration::PolicyKind policy = integration::PolicyKind::kLabelsUnfair;
  std::filesystem::path feedback;
  // Baseline to replay against; defaults to <output_dir>/baseline.
  std::optional<std::filesystem::path> baseline_dir;
};

struct ReplayResult {
  std::filesystem::path output_dir;
  std::vector<integration::LineError> errors;
  Warnings warnings;
  std::optional<integration::RetrainOutcome> global;
  std::vector<integration::PersonalizedRun> personalized;
};

// Feedback file by extension: .csv goes through the configured mapping,
// anything else is read as JSON-Lines.
integration::FeedbackLog LoadFeedback(const std::filesystem::path& path,
                                      const std::optional<integration::FeedbackMapping>& mapping);

ReplayResult Replay(const ExperimentConfig& config, const ReplayOptions& options);

// CLI entry points. Each returns the process exit code (0 iff no errors);
// progress goes to out, problems to err.
int RunPrepare(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int RunTrainBaseline(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int RunReplay(const ExperimentConfig& config, const ReplayOptions& options,
              std::ostream& out, std::ostream& err);
// Re-evaluates a stored model (default: the baseline model) on the test split.
int RunReport(const ExperimentConfig& config,
              const std::optional<std::filesystem::path>& model_path, std::ostream& out,
              std::ostream& err);

}  // namespace fairloop::harness

#endif  // FAIRLOOP_HARNESS_COMMANDS_H_
