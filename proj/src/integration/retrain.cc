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

#include "fairloop/integration/retrain.h"

namespace fairloop::integration {
namespace {

RetrainOutcome Finish(const BaselineContext& context, const AugmentedTraining& training,
                      const fairness::Evaluator& evaluator,
                      const fairness::FairnessReport& baseline_report,
                      Warnings* warnings) {
  RetrainOutcome out;
  out.model = std::make_shared<const gbdt::Model>(
      TrainAugmented(context, training, warnings));
  out.report = evaluator.Evaluate(*out.model);
  out.deltas = ComputeDeltas(baseline_report, out.report);
  out.added_rows = training.pool_rows.size();
  out.effective_feedback = training.effective();
  return out;
}

}  // namespace

RetrainOutcome RetrainGlobal(const BaselineContext& context,
                             std::span<const FeedbackInstance> feedback,
                             const IntegrationPolicy& policy,
                             const fairness::Evaluator& evaluator,
                             const fairness::FairnessReport& baseline_report,
                             Warnings* warnings) {
  const auto rows = LatestPerApplication(feedback);
  std::vector<FeedbackInstance> history;
  for (auto& [pid, list] : ByParticipant(feedback)) {
    history.insert(history.end(), list.begin(), list.end());
  }
  const AugmentedTraining training =
      ApplyPolicy(context, rows, history, policy, warnings);
  if (!training.effective()) {
    Warn(warnings, "no effective feedback under policy " +
                       std::string(PolicyKindName(policy.kind)) +
                       "; retrained model equals the class-balanced baseline");
  }
  return Finish(context, training, evaluator, baseline_report, warnings);
}

RetrainOutcome RetrainOnSequence(const BaselineContext& context,
                                 std::span<const FeedbackInstance> ordered,
                                 const IntegrationPolicy& policy,
                                 const fairness::Evaluator& evaluator,
                                 const fairness::FairnessReport& baseline_report,
                                 Warnings* warnings) {
  const AugmentedTraining training = ApplyPolicy(context, ordered, policy, warnings);
  return Finish(context, training, evaluator, baseline_report, warnings);
}

PersonalizedRun RetrainPersonalized(const BaselineContext& context,
                                    std::span<const FeedbackInstance> feedback,
                                    const IntegrationPolicy& policy,
                                    const fairness::Evaluator& evaluator,
                                    const fairness::FairnessReport& baseline_report,
                                    Warnings* warnings) {
  if (feedback.empty()) {
    Fail(ErrorCode::kInvalidArgument, "personalized retrain needs feedback");
  }
  const std::string& pid = feedback.front().participant_id;
  for (const auto& f : feedback) {
    if (f.participant_id != pid) {
      Fail(ErrorCode::kInvalidArgument,
           "personalized retrain mixes participants '" + pid + "' and '" +
               f.participant_id + "'");
    }
  }
  const auto ordered =
      SortByTimestamp(std::vector<FeedbackInstance>(feedback.begin(), feedback.end()));
  PersonalizedRun run{pid, {}, MetricSeries(baseline_report), {}};
  for (std::size_t t = 1; t <= ordered.size(); ++t) {
    run.steps.push_back(RetrainOnSequence(
        context, std::span<const FeedbackInstance>(ordered.data(), t), policy,
        evaluator, baseline_report, warnings));
    run.series.Append(run.steps.back().report);
  }
  run.final_deltas = run.series.FinalDeltas();
  return run;
}

}  // namespace fairloop::integration
