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

#include "fairloop/integration/policy.h"

#include <algorithm>
#include <map>
#include <set>

#include "fairloop/gbdt/trainer.h"

namespace fairloop::integration {

std::string_view PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kLabels: return "labels";
    case PolicyKind::kLabelsUnfair: return "labels-unfair";
    case PolicyKind::kLabelsPlusWeights: return "labels-weights";
    case PolicyKind::kLabelsUnfairPlusWeights: return "labels-unfair-weights";
  }
  return "unknown";
}

PolicyKind ParsePolicyKind(std::string_view name) {
  for (PolicyKind kind : {PolicyKind::kLabels, PolicyKind::kLabelsUnfair,
                          PolicyKind::kLabelsPlusWeights,
                          PolicyKind::kLabelsUnfairPlusWeights}) {
    if (PolicyKindName(kind) == name) return kind;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown policy '" + std::string(name) + "'");
}

std::string_view FlipSourceName(FlipSource source) {
  return source == FlipSource::kPredicted ? "predicted" : "ground_truth";
}

FlipSource ParseFlipSource(std::string_view name) {
  if (name == "predicted") return FlipSource::kPredicted;
  if (name == "ground_truth") return FlipSource::kGroundTruth;
  Fail(ErrorCode::kInvalidArgument,
       "unknown flip source '" + std::string(name) + "'");
}

std::shared_ptr<const BaselineContext> MakeBaselineContext(
    data::Dataset base_train, std::shared_ptr<const data::Encoder> encoder,
    data::Dataset app_pool, const gbdt::GbdtParams& params, Warnings* warnings) {
  if (encoder == nullptr) Fail(ErrorCode::kInvalidArgument, "encoder is required");
  auto context = std::make_shared<BaselineContext>(BaselineContext{
      std::move(base_train), std::move(encoder), {}, std::move(app_pool), {}, {},
      params, {}, nullptr});
  context->base_train.RequireTargets();
  context->encoded_train = context->encoder->Transform(context->base_train, warnings);
  context->encoded_pool = context->encoder->Transform(context->app_pool, warnings);
  const auto groups = context->encoded_train.GroupNames();
  context->baseline_weights = gbdt::UniformWeights(groups);
  const auto iw = gbdt::BalanceInstanceWeights(context->encoded_train, {}, 1.0);
  context->baseline_model = std::make_shared<const gbdt::Model>(gbdt::Train(
      context->encoded_train, params, iw, context->baseline_weights, warnings));
  context->pool_predictions = context->baseline_model->PredictAll(context->encoded_pool);
  return context;
}

gbdt::FeatureWeights MergeWeights(const gbdt::FeatureWeights& start,
                                  std::span<const FeedbackInstance> feedback) {
  gbdt::FeatureWeights current = start;
  for (const auto& f : feedback) {
    if (!f.weights) continue;
    std::map<std::string, double> raw = current.values();
    for (const auto& [feature, value] : *f.weights) {
      if (!current.contains(feature)) {
        Fail(ErrorCode::kInvalidArgument,
             "weight for unknown feature '" + feature + "'", feature);
      }
      raw[feature] = value;
    }
    current = gbdt::NormalizeWeights(raw);
  }
  return current;
}

AugmentedTraining ApplyPolicy(const BaselineContext& context,
                              std::span<const FeedbackInstance> row_feedback,
                              std::span<const FeedbackInstance> weight_feedback,
                              const IntegrationPolicy& policy, Warnings* warnings) {
  if (!(policy.alpha >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "alpha must be non-negative");
  }
  AugmentedTraining out;
  auto pool_index = [&](const FeedbackInstance& f) {
    const auto row = context.app_pool.IndexOfId(f.application_id);
    if (!row) {
      Fail(ErrorCode::kNotFound,
           "application '" + f.application_id + "' is not in the pool",
           f.application_id);
    }
    return *row;
  };
  auto source_label = [&](std::size_t row) {
    if (policy.flip_source == FlipSource::kPredicted) {
      return context.pool_predictions[row].label;
    }
    const auto& target = context.app_pool.target(row);
    if (!target) {
      Fail(ErrorCode::kFailedPrecondition,
           "ground-truth flips need a labeled pool; '" +
               context.app_pool.id(row) + "' has no target");
    }
    return gbdt::OutcomeFromTarget(*target);
  };

  for (const auto& f : row_feedback) {
    const std::size_t row = pool_index(f);
    switch (f.label) {
      case FeedbackLabel::kUnfair:
        out.pool_rows.push_back(row);
        out.targets.push_back(gbdt::TargetFromOutcome(gbdt::Flip(source_label(row))));
        ++out.feedback_used;
        break;
      case FeedbackLabel::kFair:
        if (policy.keeps_fair_rows()) {
          out.pool_rows.push_back(row);
          out.targets.push_back(gbdt::TargetFromOutcome(source_label(row)));
          ++out.feedback_used;
        }
        break;
      case FeedbackLabel::kWeightsOnly:
        if (!policy.uses_weights()) {
          Warn(warnings, "weights_only feedback on '" + f.application_id +
                             "' ignored under policy " +
                             std::string(PolicyKindName(policy.kind)));
        }
        break;
    }
  }

  out.feature_weights = context.baseline_weights;
  if (policy.uses_weights()) {
    std::map<std::string, std::vector<FeedbackInstance>> by_participant;
    for (const auto& f : weight_feedback) {
      if (!f.weights) continue;
      pool_index(f);
      by_participant[f.participant_id].push_back(f);
      if (f.label == FeedbackLabel::kWeightsOnly) ++out.feedback_used;
    }
    if (!by_participant.empty()) {
      std::map<std::string, double> sum;
      for (const auto& [pid, list] : by_participant) {
        const auto merged = MergeWeights(context.baseline_weights, list);
        for (const auto& [feature, value] : merged.values()) sum[feature] += value;
      }
      const double share = std::min(policy.alpha, 1.0);
      if (share > 0.0) {
        std::map<std::string, double> blended;
        const double n = static_cast<double>(by_participant.size());
        for (const auto& [feature, total] : sum) {
          blended[feature] = share < 1.0
                                 ? (1.0 - share) * context.baseline_weights.at(feature) +
                                       share * (total / n)
                                 : total / n;
        }
        out.feature_weights = gbdt::NormalizeWeights(blended);
      }
      out.weights_changed = true;
    }
  }

  std::vector<int> targets = context.encoded_train.target();
  const std::size_t n_orig = targets.size();
  targets.insert(targets.end(), out.targets.begin(), out.targets.end());
  std::vector<std::size_t> feedback_rows(out.targets.size());
  for (std::size_t k = 0; k < feedback_rows.size(); ++k) feedback_rows[k] = n_orig + k;
  out.instance_weights =
      gbdt::BalanceInstanceWeights(targets, feedback_rows, policy.alpha);
  return out;
}

AugmentedTraining ApplyPolicy(const BaselineContext& context,
                              std::span<const FeedbackInstance> feedback,
                              const IntegrationPolicy& policy, Warnings* warnings) {
  return ApplyPolicy(context, feedback, feedback, policy, warnings);
}

data::Dataset Materialize(const BaselineContext& context,
                          const AugmentedTraining& training) {
  const data::Dataset& pool = context.app_pool;
  std::vector<std::string> ids;
  std::vector<std::vector<data::Cell>> rows;
  std::vector<std::optional<int>> targets;
  for (std::size_t k = 0; k < training.pool_rows.size(); ++k) {
    const std::size_t r = training.pool_rows[k];
    ids.push_back(pool.id(r) + "#fb" + std::to_string(k));
    rows.emplace_back(pool.row(r).begin(), pool.row(r).end());
    targets.emplace_back(training.targets[k]);
  }
  return context.base_train.Concat(data::Dataset(
      context.app_pool.schema_ptr(), std::move(ids), std::move(rows), std::move(targets)));
}

data::EncodedMatrix EncodeAugmented(const BaselineContext& context,
                                    const AugmentedTraining& training) {
  return context.encoded_train.AppendRows(context.encoded_pool, training.pool_rows,
                                          training.targets);
}

gbdt::Model TrainAugmented(const BaselineContext& context,
                           const AugmentedTraining& training, Warnings* warnings) {
  return gbdt::Train(EncodeAugmented(context, training), context.params,
                     training.instance_weights, training.feature_weights, warnings);
}

}  // namespace fairloop::integration
