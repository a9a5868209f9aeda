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

#include "fairloop/integration/session.h"

#include <algorithm>

#include "fairloop/integration/retrain.h"

namespace fairloop::integration {

using json = nlohmann::json;

std::string_view ApplicationStatusName(ApplicationStatus status) {
  switch (status) {
    case ApplicationStatus::kUnchecked: return "Unchecked";
    case ApplicationStatus::kChecked: return "Checked";
    case ApplicationStatus::kUnfair: return "Unfair";
  }
  return "Unchecked";
}

json ToJson(const gbdt::Prediction& p) {
  return {{"probability", p.probability},
          {"label", gbdt::OutcomeName(p.label)},
          {"confidence", p.confidence}};
}

gbdt::Prediction PredictionFromJson(const json& j) {
  return gbdt::MakePrediction(j.at("probability").get<double>());
}

FeedbackSession::FeedbackSession(
    std::string participant_id, std::shared_ptr<const BaselineContext> context,
    std::shared_ptr<const fairness::Evaluator> evaluator,
    std::shared_ptr<const fairness::FairnessReport> baseline_report, double alpha,
    FlipSource flip_source)
    : participant_id_(std::move(participant_id)),
      context_(std::move(context)),
      evaluator_(std::move(evaluator)),
      baseline_report_(std::move(baseline_report)) {
  if (!context_ || !evaluator_ || !baseline_report_) {
    Fail(ErrorCode::kUnavailable, "baseline is not loaded");
  }
  if (participant_id_.empty()) {
    Fail(ErrorCode::kInvalidArgument, "participant_id is empty");
  }
  policy_.kind = PolicyKind::kLabelsUnfairPlusWeights;
  policy_.alpha = alpha;
  policy_.flip_source = flip_source;
  current_ = StateFor(0);
}

SessionState FeedbackSession::StateFor(std::size_t prefix) const {
  SessionState state;
  if (prefix == 0) {
    state.model = context_->baseline_model;
    state.report = baseline_report_;
    state.pool_predictions = context_->pool_predictions;
    state.training_rows = context_->base_train.num_rows();
    return state;
  }
  std::vector<FeedbackInstance> feedback;
  feedback.reserve(prefix);
  for (std::size_t k = 0; k < prefix; ++k) feedback.push_back(log_[k].feedback);
  RetrainOutcome outcome = RetrainOnSequence(*context_, feedback, policy_,
                                             *evaluator_, *baseline_report_);
  state.model = outcome.model;
  state.report = std::make_shared<const fairness::FairnessReport>(
      std::move(outcome.report));
  state.pool_predictions = state.model->PredictAll(context_->encoded_pool);
  state.training_rows = context_->base_train.num_rows() + outcome.added_rows;
  return state;
}

FeedbackSession::StepResult FeedbackSession::Submit(
    const std::string& application_id, FeedbackLabel label,
    std::optional<RawWeights> weights, std::int64_t now_ms) {
  const auto row = context_->app_pool.IndexOfId(application_id);
  if (!row) {
    Fail(ErrorCode::kNotFound, "unknown application '" + application_id + "'",
         application_id);
  }
  if (label == FeedbackLabel::kFair) {
    Fail(ErrorCode::kInvalidArgument,
         "label must be 'unfair' or 'weights_only'", "fair");
  }
  if (IsLocked(application_id)) {
    Fail(ErrorCode::kConflict,
         "application '" + application_id + "' already has feedback",
         application_id);
  }
  if (label == FeedbackLabel::kWeightsOnly && !weights) {
    Fail(ErrorCode::kUnprocessable, "weights_only feedback requires weights");
  }
  if (weights) {
    ValidateRawWeights(*weights);
    for (const auto& [feature, value] : *weights) {
      if (!context_->baseline_weights.contains(feature)) {
        Fail(ErrorCode::kUnprocessable, "unknown feature '" + feature + "'",
             feature);
      }
    }
    std::map<std::string, double> merged = CurrentFeatureWeights().values();
    for (const auto& [feature, value] : *weights) merged[feature] = value;
    bool any_positive = false;
    for (const auto& [feature, value] : merged) any_positive = any_positive || value > 0.0;
    if (!any_positive) Fail(ErrorCode::kUnprocessable, "weights would all be zero");
  }

  FeedbackInstance f;
  f.participant_id = participant_id_;
  f.application_id = application_id;
  f.timestamp_ms = log_.empty() ? now_ms
                                : std::max(now_ms, log_.back().feedback.timestamp_ms + 1);
  f.label = label;
  f.weights = std::move(weights);

  const gbdt::Prediction shown = DisplayedPrediction(*row);
  log_.push_back({f, shown});
  SessionState next;
  try {
    next = StateFor(log_.size());
  } catch (...) {
    log_.pop_back();
    throw;
  }
  const auto previous = current_.report;
  const std::size_t previous_rows = current_.training_rows;
  states_.push_back(std::move(current_));
  locks_[application_id] = log_.size() - 1;
  current_ = std::move(next);

  StepResult result;
  result.feedback = f;
  result.deltas = ComputeDeltas(*previous, *current_.report);
  result.added_rows = current_.training_rows - previous_rows;
  return result;
}

std::vector<MetricDelta> FeedbackSession::Undo() {
  if (log_.empty()) Fail(ErrorCode::kConflict, "nothing to undo");
  const auto before = current_.report;
  const std::size_t k = log_.size() - 1;
  locks_.erase(log_.back().feedback.application_id);
  log_.pop_back();
  std::optional<SessionState> cached = std::move(states_.back());
  states_.pop_back();
  current_ = cached ? std::move(*cached) : StateFor(k);
  return ComputeDeltas(*before, *current_.report);
}

std::vector<FeedbackInstance> FeedbackSession::FeedbackLog() const {
  std::vector<FeedbackInstance> out;
  out.reserve(log_.size());
  for (const auto& entry : log_) out.push_back(entry.feedback);
  return out;
}

gbdt::FeatureWeights FeedbackSession::CurrentFeatureWeights() const {
  return current_.model->feature_weights();
}

bool FeedbackSession::IsLocked(const std::string& application_id) const {
  return locks_.count(application_id) > 0;
}

ApplicationStatus FeedbackSession::StatusOf(const std::string& application_id) const {
  auto it = locks_.find(application_id);
  if (it == locks_.end()) return ApplicationStatus::kUnchecked;
  return log_[it->second].feedback.label == FeedbackLabel::kUnfair
             ? ApplicationStatus::kUnfair
             : ApplicationStatus::kChecked;
}

gbdt::Prediction FeedbackSession::DisplayedPrediction(std::size_t pool_row) const {
  auto it = locks_.find(context_->app_pool.id(pool_row));
  if (it != locks_.end()) return log_[it->second].shown;
  return current_.pool_predictions[pool_row];
}

json FeedbackSession::SnapshotJson() const {
  json log = json::array();
  for (const auto& entry : log_) {
    log.push_back({{"feedback", ToJson(entry.feedback)},
                   {"shown", ToJson(entry.shown)}});
  }
  return {{"participant_id", participant_id_},
          {"log", log},
          {"model", gbdt::ToJson(*current_.model)},
          {"report", fairness::ToJson(*current_.report)},
          {"training_rows", current_.training_rows}};
}

void FeedbackSession::RestoreSnapshot(const json& snapshot) {
  try {
    if (snapshot.at("participant_id").get<std::string>() != participant_id_) {
      Fail(ErrorCode::kInvalidArgument, "snapshot belongs to another participant");
    }
    std::vector<LoggedFeedback> log;
    for (const auto& entry : snapshot.at("log")) {
      log.push_back({FeedbackFromJson(entry.at("feedback")),
                     PredictionFromJson(entry.at("shown"))});
    }
    SessionState state;
    if (log.empty()) {
      state = StateFor(0);
    } else {
      state.model = std::make_shared<const gbdt::Model>(
          gbdt::ModelFromJson(snapshot.at("model")));
      state.report = std::make_shared<const fairness::FairnessReport>(
          fairness::FairnessReportFromJson(snapshot.at("report")));
      state.pool_predictions = state.model->PredictAll(context_->encoded_pool);
      state.training_rows = snapshot.at("training_rows").get<std::size_t>();
    }
    log_ = std::move(log);
    locks_.clear();
    for (std::size_t k = 0; k < log_.size(); ++k) {
      locks_[log_[k].feedback.application_id] = k;
    }
    states_.assign(log_.size(), std::nullopt);
    current_ = std::move(state);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed session snapshot: ") + e.what());
  }
}

}  // namespace fairloop::integration
