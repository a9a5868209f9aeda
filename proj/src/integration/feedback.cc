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

#include "fairloop/integration/feedback.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "fairloop/common/csv.h"
#include "fairloop/common/files.h"

namespace fairloop::integration {
namespace {

using json = nlohmann::json;

const std::set<std::string> kFeedbackKeys = {
    "participant_id", "application_id", "timestamp_ms", "label", "weights"};

std::optional<double> ParseNumber(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

std::string_view FeedbackLabelName(FeedbackLabel label) {
  switch (label) {
    case FeedbackLabel::kFair: return "fair";
    case FeedbackLabel::kUnfair: return "unfair";
    case FeedbackLabel::kWeightsOnly: return "weights_only";
  }
  return "unknown";
}

FeedbackLabel ParseFeedbackLabel(std::string_view name) {
  if (name == "fair") return FeedbackLabel::kFair;
  if (name == "unfair") return FeedbackLabel::kUnfair;
  if (name == "weights_only") return FeedbackLabel::kWeightsOnly;
  Fail(ErrorCode::kInvalidArgument,
       "unknown feedback label '" + std::string(name) + "'", std::string(name));
}

void ValidateRawWeights(const RawWeights& weights) {
  if (weights.empty()) Fail(ErrorCode::kUnprocessable, "weights are empty");
  for (const auto& [feature, value] : weights) {
    if (!std::isfinite(value) || value < 0.0) {
      Fail(ErrorCode::kUnprocessable,
           "weight for '" + feature + "' must be a non-negative number", feature);
    }
  }
}

void ValidateFeedback(const FeedbackInstance& feedback) {
  if (feedback.participant_id.empty()) {
    Fail(ErrorCode::kInvalidArgument, "participant_id is empty");
  }
  if (feedback.application_id.empty()) {
    Fail(ErrorCode::kInvalidArgument, "application_id is empty");
  }
  if (feedback.label == FeedbackLabel::kWeightsOnly && !feedback.weights) {
    Fail(ErrorCode::kUnprocessable, "weights_only feedback requires weights");
  }
  if (feedback.weights) ValidateRawWeights(*feedback.weights);
}

json ToJson(const FeedbackInstance& feedback) {
  json out = {{"participant_id", feedback.participant_id},
              {"application_id", feedback.application_id},
              {"timestamp_ms", feedback.timestamp_ms},
              {"label", FeedbackLabelName(feedback.label)}};
  out["weights"] = feedback.weights ? json(*feedback.weights) : json(nullptr);
  return out;
}

FeedbackInstance FeedbackFromJson(const json& j) {
  if (!j.is_object()) Fail(ErrorCode::kParse, "feedback must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (kFeedbackKeys.count(key) == 0) {
      Fail(ErrorCode::kParse, "unexpected field '" + key + "'", key);
    }
  }
  FeedbackInstance f;
  try {
    f.participant_id = j.at("participant_id").get<std::string>();
    f.application_id = j.at("application_id").get<std::string>();
    const json& ts = j.at("timestamp_ms");
    if (!ts.is_number_integer()) {
      Fail(ErrorCode::kParse, "timestamp_ms must be an integer");
    }
    f.timestamp_ms = ts.get<std::int64_t>();
    f.label = ParseFeedbackLabel(j.at("label").get<std::string>());
    if (j.contains("weights") && !j.at("weights").is_null()) {
      RawWeights weights;
      for (const auto& [feature, value] : j.at("weights").items()) {
        if (!value.is_number()) {
          Fail(ErrorCode::kUnprocessable,
               "weight for '" + feature + "' is not a number", feature);
        }
        weights[feature] = value.get<double>();
      }
      f.weights = std::move(weights);
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed feedback: ") + e.what());
  }
  ValidateFeedback(f);
  return f;
}

FeedbackLog ParseFeedbackJsonl(const std::string& text) {
  FeedbackLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      log.instances.push_back(FeedbackFromJson(json::parse(line)));
      log.lines.push_back(number);
    } catch (const json::exception& e) {
      log.errors.push_back({number, std::string("invalid JSON: ") + e.what()});
    } catch (const Error& e) {
      log.errors.push_back({number, e.what()});
    }
  }
  return log;
}

FeedbackLog LoadFeedbackJsonl(const std::filesystem::path& path) {
  return ParseFeedbackJsonl(ReadFile(path));
}

std::string ToJsonl(std::span<const FeedbackInstance> feedback) {
  std::string out;
  for (const auto& f : feedback) {
    out += ToJson(f).dump();
    out += '\n';
  }
  return out;
}

FeedbackMapping FeedbackMappingFromJson(const json& j) {
  FeedbackMapping m;
  try {
    if (j.contains("participant_id")) m.participant_id = j.at("participant_id").get<std::string>();
    if (j.contains("application_id")) m.application_id = j.at("application_id").get<std::string>();
    if (j.contains("timestamp")) m.timestamp = j.at("timestamp").get<std::string>();
    if (j.contains("timestamp_scale")) m.timestamp_scale = j.at("timestamp_scale").get<double>();
    if (j.contains("label")) m.label = j.at("label").get<std::string>();
    if (j.contains("label_values")) {
      m.label_values = j.at("label_values").get<std::map<std::string, std::string>>();
    }
    if (j.contains("weight_columns")) {
      m.weight_columns = j.at("weight_columns").get<std::map<std::string, std::string>>();
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed feedback mapping: ") + e.what());
  }
  for (const auto& [source, target] : m.label_values) ParseFeedbackLabel(target);
  if (!(m.timestamp_scale > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "timestamp_scale must be positive");
  }
  return m;
}

json ToJson(const FeedbackMapping& m) {
  return {{"participant_id", m.participant_id},
          {"application_id", m.application_id},
          {"timestamp", m.timestamp},
          {"timestamp_scale", m.timestamp_scale},
          {"label", m.label},
          {"label_values", m.label_values},
          {"weight_columns", m.weight_columns}};
}

FeedbackLog ParseMappedCsv(const std::string& text, const FeedbackMapping& mapping) {
  const auto records = csv::ParseString(text);
  if (records.empty()) Fail(ErrorCode::kParse, "feedback CSV has no header");
  const csv::Record& header = records.front();
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      Fail(ErrorCode::kInvalidArgument,
           "feedback CSV lacks mapped column '" + name + "'", name);
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t pid = column(mapping.participant_id);
  const std::size_t aid = column(mapping.application_id);
  const std::size_t ts = column(mapping.timestamp);
  const std::size_t lab = column(mapping.label);
  std::map<std::string, std::size_t> weight_cols;
  for (const auto& [feature, col] : mapping.weight_columns) {
    weight_cols[feature] = column(col);
  }

  FeedbackLog log;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    const std::size_t line = r + 1;
    try {
      if (rec.size() != header.size()) {
        Fail(ErrorCode::kParse, "expected " + std::to_string(header.size()) +
                                    " fields, got " + std::to_string(rec.size()));
      }
      FeedbackInstance f;
      f.participant_id = rec[pid];
      f.application_id = rec[aid];
      const auto t = ParseNumber(rec[ts]);
      if (!t) Fail(ErrorCode::kParse, "unparseable timestamp '" + rec[ts] + "'");
      f.timestamp_ms = static_cast<std::int64_t>(std::llround(*t * mapping.timestamp_scale));
      std::string label = rec[lab];
      auto mapped = mapping.label_values.find(label);
      if (mapped != mapping.label_values.end()) label = mapped->second;
      f.label = ParseFeedbackLabel(label);
      RawWeights weights;
      for (const auto& [feature, col] : weight_cols) {
        if (rec[col].find_first_not_of(" \t") == std::string::npos) continue;
        const auto w = ParseNumber(rec[col]);
        if (!w) {
          Fail(ErrorCode::kUnprocessable,
               "unparseable weight for '" + feature + "': '" + rec[col] + "'");
        }
        weights[feature] = *w;
      }
      if (!weights.empty()) f.weights = std::move(weights);
      ValidateFeedback(f);
      log.instances.push_back(std::move(f));
      log.lines.push_back(line);
    } catch (const Error& e) {
      log.errors.push_back({line, e.what()});
    }
  }
  return log;
}

FeedbackLog LoadMappedCsv(const std::filesystem::path& path,
                          const FeedbackMapping& mapping) {
  return ParseMappedCsv(ReadFile(path), mapping);
}

std::vector<FeedbackInstance> SortByTimestamp(std::vector<FeedbackInstance> feedback) {
  std::stable_sort(feedback.begin(), feedback.end(),
                   [](const FeedbackInstance& a, const FeedbackInstance& b) {
                     return a.timestamp_ms < b.timestamp_ms;
                   });
  return feedback;
}

std::vector<FeedbackInstance> LatestPerApplication(
    std::span<const FeedbackInstance> feedback) {
  const auto sorted =
      SortByTimestamp(std::vector<FeedbackInstance>(feedback.begin(), feedback.end()));
  std::map<std::pair<std::string, std::string>, FeedbackInstance> latest;
  for (const auto& f : sorted) {
    latest.insert_or_assign({f.participant_id, f.application_id}, f);
  }
  std::vector<FeedbackInstance> out;
  out.reserve(latest.size());
  for (auto& [key, f] : latest) out.push_back(std::move(f));
  return out;
}

std::map<std::string, std::vector<FeedbackInstance>> ByParticipant(
    std::span<const FeedbackInstance> feedback) {
  std::map<std::string, std::vector<FeedbackInstance>> out;
  for (const auto& f : feedback) out[f.participant_id].push_back(f);
  for (auto& [pid, list] : out) list = SortByTimestamp(std::move(list));
  return out;
}

}  // namespace fairloop::integration
