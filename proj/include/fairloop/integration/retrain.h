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

#ifndef FAIRLOOP_INTEGRATION_RETRAIN_H_
#define FAIRLOOP_INTEGRATION_RETRAIN_H_

#include <memory>
#include <span>
#include <vector>

#include "fairloop/fairness/report.h"
#include "fairloop/integration/deltas.h"
#include "fairloop/integration/feedback.h"
#include "fairloop/integration/policy.h"

namespace fairloop::integration {

struct RetrainOutcome {
  std::shared_ptr<const gbdt::Model> model;
  fairness::FairnessReport report;
  std::vector<MetricDelta> deltas;  // against the baseline report
  std::size_t added_rows = 0;
  bool effective_feedback = false;  // false: no row added and fw unchanged
};

// Pooled feedback of every participant: latest judgement per (participant,
// application) in (participant, application) order; weight feedback uses
// each participant's full timestamp-ordered history.
RetrainOutcome RetrainGlobal(const BaselineContext& context,
                             std::span<const FeedbackInstance> feedback,
                             const IntegrationPolicy& policy,
                             const fairness::Evaluator& evaluator,
                             const fairness::FairnessReport& baseline_report,
                             Warnings* warnings = nullptr);

struct PersonalizedRun {
  std::string participant_id;
  std::vector<RetrainOutcome> steps;
  MetricSeries series;
  std::vector<MetricDelta> final_deltas;  // last CMA against baseline
};

// One retrain from scratch per feedback instance of a single participant,
// in timestamp order, each step keeping all earlier feedback.
PersonalizedRun RetrainPersonalized(const BaselineContext& context,
                                    std::span<const FeedbackInstance> feedback,
                                    const IntegrationPolicy& policy,
                                    const fairness::Evaluator& evaluator,
                                    const fairness::FairnessReport& baseline_report,
                                    Warnings* warnings = nullptr);

// Training state after a prefix of one participant's ordered feedback; the
// single retrain performed by each personalized step.
RetrainOutcome RetrainOnSequence(const BaselineContext& context,
                                 std::span<const FeedbackInstance> ordered,
                                 const IntegrationPolicy& policy,
                                 const fairness::Evaluator& evaluator,
                                 const fairness::FairnessReport& baseline_report,
                                 Warnings* warnings = nullptr);

}  // namespace fairloop::integration

#endif  // FAIRLOOP_INTEGRATION_RETRAIN_H_
