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

#ifndef FAIRLOOP_INTEGRATION_SESSION_H_
#define FAIRLOOP_INTEGRATION_SESSION_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairloop/fairness/report.h"
#include "fairloop/integration/deltas.h"
#include "fairloop/integration/feedback.h"
#include "fairloop/integration/policy.h"
#include "json.hpp"

namespace fairloop::integration {

enum class ApplicationStatus { kUnchecked, kChecked, kUnfair };
std::string_view ApplicationStatusName(ApplicationStatus status);

// A submitted judgement plus the prediction shown when it was made.
struct LoggedFeedback {
  FeedbackInstance feedback;
  gbdt::Prediction shown;
};

struct SessionState {
  std::shared_ptr<const gbdt::Model> model;
  std::shared_ptr<const fairness::FairnessReport> report;
  std::vector<gbdt::Prediction> pool_predictions;  // current model on the pool
  std::size_t training_rows = 0;
};

// Interactive loop for one participant: every submission retrains from
// scratch on the whole log under labels-unfair-weights and locks the
// application; undo pops the last submission. The state after k submissions
// is a pure function of the first k log entries, so snapshots only cache it.
class FeedbackSession {
 public:
  FeedbackSession(std::string participant_id,
                  std::shared_ptr<const BaselineContext> context,
                  std::shared_ptr<const fairness::Evaluator> evaluator,
                  std::shared_ptr<const fairness::FairnessReport> baseline_report,
                  double alpha = 1.0, FlipSource flip_source = FlipSource::kPredicted);

  struct StepResult {
    FeedbackInstance feedback;
    std::vector<MetricDelta> deltas;  // against the state before the step
    std::size_t added_rows = 0;
  };

  // label must be kUnfair or kWeightsOnly. Errors: kNotFound (unknown
  // application), kInvalidArgument (fair label), kConflict (locked),
  // kUnprocessable (bad or missing weights). The timestamp is now_ms, bumped
  // to stay strictly after the previous submission.
  StepResult Submit(const std::string& application_id, FeedbackLabel label,
                    std::optional<RawWeights> weights, std::int64_t now_ms);

  // Throws kConflict when nothing is left to undo. Returns deltas against
  // the state before the undo.
  std::vector<MetricDelta> Undo();

  const std::string& participant_id() const { return participant_id_; }
  const SessionState& state() const { return current_; }
  const std::vector<LoggedFeedback>& log() const { return log_; }
  std::vector<FeedbackInstance> FeedbackLog() const;
  std::size_t undo_depth() const { return log_.size(); }
  const IntegrationPolicy& policy() const { return policy_; }
  const BaselineContext& context() const { return *context_; }
  const fairness::Evaluator& evaluator() const { return *evaluator_; }
  const fairness::FairnessReport& baseline_report() const { return *baseline_report_; }
  gbdt::FeatureWeights CurrentFeatureWeights() const;

  bool IsLocked(const std::string& application_id) const;
  ApplicationStatus StatusOf(const std::string& application_id) const;
  // Locked applications keep the prediction shown at feedback time.
  gbdt::Prediction DisplayedPrediction(std::size_t pool_row) const;

  // Persistence: the log with shown predictions, and the current state.
  nlohmann::json SnapshotJson() const;
  // Rebuilds from a snapshot without retraining; deeper undo states are
  // recomputed on demand.
  void RestoreSnapshot(const nlohmann::json& snapshot);

 private:
  SessionState StateFor(std::size_t prefix) const;

  std::string participant_id_;
  std::shared_ptr<const BaselineContext> context_;
  std::shared_ptr<const fairness::Evaluator> evaluator_;
  std::shared_ptr<const fairness::FairnessReport> baseline_report_;
  IntegrationPolicy policy_;

  SessionState current_;
  std::vector<LoggedFeedback> log_;
  std::map<std::string, std::size_t> locks_;  // application id -> log index
  // states_[k] caches the state after k submissions (k < log_.size()).
  std::vector<std::optional<SessionState>> states_;
};

nlohmann::json ToJson(const gbdt::Prediction& prediction);
gbdt::Prediction PredictionFromJson(const nlohmann::json& json);

}  // namespace fairloop::integration

#endif  // FAIRLOOP_INTEGRATION_SESSION_H_
