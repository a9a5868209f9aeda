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

#ifndef FAIRLOOP_INTEGRATION_FEEDBACK_H_
#define FAIRLOOP_INTEGRATION_FEEDBACK_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairloop/common/error.h"
#include "json.hpp"

namespace fairloop::integration {

enum class FeedbackLabel { kFair, kUnfair, kWeightsOnly };

std::string_view FeedbackLabelName(FeedbackLabel label);  // fair|unfair|weights_only
FeedbackLabel ParseFeedbackLabel(std::string_view name);

using RawWeights = std::map<std::string, double>;

struct FeedbackInstance {
  std::string participant_id;
  std::string application_id;
  std::int64_t timestamp_ms = 0;
  FeedbackLabel label = FeedbackLabel::kUnfair;
  std::optional<RawWeights> weights;

  bool operator==(const FeedbackInstance&) const = default;
};

// Throws kUnprocessable if the map is empty or a weight is negative or
// non-finite. A partial map may hold only zeros; it is merged over the
// current vector, which must keep a positive entry.
void ValidateRawWeights(const RawWeights& weights);
// Also enforces that kWeightsOnly carries weights.
void ValidateFeedback(const FeedbackInstance& feedback);

nlohmann::json ToJson(const FeedbackInstance& feedback);
// Requires exactly the keys participant_id, application_id, timestamp_ms,
// label and (optionally null) weights.
FeedbackInstance FeedbackFromJson(const nlohmann::json& json);

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct FeedbackLog {
  std::vector<FeedbackInstance> instances;
  std::vector<std::size_t> lines;  // source line of each instance
  std::vector<LineError> errors;
};

// Blank lines are skipped; malformed lines are collected, not fatal.
FeedbackLog ParseFeedbackJsonl(const std::string& text);
FeedbackLog LoadFeedbackJsonl(const std::filesystem::path& path);
std::string ToJsonl(std::span<const FeedbackInstance> feedback);

// Column mapping for feedback tables exported in other layouts. Each field
// names the source column; label_values maps source label strings onto
// fair/unfair/weights_only; weight_columns maps schema features onto the
// columns holding their raw weights (blank cells are skipped).
struct FeedbackMapping {
  std::string participant_id = "participant_id";
  std::string application_id = "application_id";
  std::string timestamp = "timestamp_ms";
  // Multiplier applied to the timestamp column to obtain milliseconds.
  double timestamp_scale = 1.0;
  std::string label = "label";
  std::map<std::string, std::string> label_values;
  std::map<std::string, std::string> weight_columns;
};

FeedbackMapping FeedbackMappingFromJson(const nlohmann::json& json);
nlohmann::json ToJson(const FeedbackMapping& mapping);

// CSV ingestion through a mapping; per-row problems become line errors.
FeedbackLog ParseMappedCsv(const std::string& text, const FeedbackMapping& mapping);
FeedbackLog LoadMappedCsv(const std::filesystem::path& path,
                          const FeedbackMapping& mapping);

// Stable sort by timestamp; equal timestamps keep log order.
std::vector<FeedbackInstance> SortByTimestamp(std::vector<FeedbackInstance> feedback);

// Latest judgement (by timestamp, then log order) per (participant,
// application), returned in (participant, application) order.
std::vector<FeedbackInstance> LatestPerApplication(
    std::span<const FeedbackInstance> feedback);

// Feedback split by participant; each list sorted by timestamp.
std::map<std::string, std::vector<FeedbackInstance>> ByParticipant(
    std::span<const FeedbackInstance> feedback);

}  // namespace fairloop::integration

#endif  // FAIRLOOP_INTEGRATION_FEEDBACK_H_
