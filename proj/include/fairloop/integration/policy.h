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

#ifndef FAIRLOOP_INTEGRATION_POLICY_H_
#define FAIRLOOP_INTEGRATION_POLICY_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairloop/common/error.h"
#include "fairloop/data/dataset.h"
#include "fairloop/data/preprocess.h"
#include "fairloop/gbdt/model.h"
#include "fairloop/gbdt/params.h"
#include "fairloop/gbdt/weights.h"
#include "fairloop/integration/feedback.h"

namespace fairloop::integration {

enum class PolicyKind { kLabels, kLabelsUnfair, kLabelsPlusWeights, kLabelsUnfairPlusWeights };

// CLI spellings: labels, labels-unfair, labels-weights, labels-unfair-weights.
std::string_view PolicyKindName(PolicyKind kind);
PolicyKind ParsePolicyKind(std::string_view name);

// Which label an Unfair judgement negates.
enum class FlipSource { kPredicted, kGroundTruth };
std::string_view FlipSourceName(FlipSource source);
FlipSource ParseFlipSource(std::string_view name);

struct IntegrationPolicy {
  PolicyKind kind = PolicyKind::kLabelsUnfair;
  // Feedback contribution relative to the original training data. Scales the
  // feedback rows' total weight, and for alpha < 1 also blends feedback
  // feature weights with the baseline vector.
  double alpha = 1.0;
  FlipSource flip_source = FlipSource::kPredicted;

  bool uses_weights() const {
    return kind == PolicyKind::kLabelsPlusWeights ||
           kind == PolicyKind::kLabelsUnfairPlusWeights;
  }
  bool keeps_fair_rows() const {
    return kind == PolicyKind::kLabels || kind == PolicyKind::kLabelsPlusWeights;
  }
};

// Everything a retrain needs besides the feedback itself. app_pool holds the
// applications feedback refers to; it may be unlabeled unless flips use
// ground truth.
struct BaselineContext {
  data::Dataset base_train;
  std::shared_ptr<const data::Encoder> encoder;
  data::EncodedMatrix encoded_train;
  data::Dataset app_pool;
  data::EncodedMatrix encoded_pool;
  std::vector<gbdt::Prediction> pool_predictions;  // baseline model on app_pool
  gbdt::GbdtParams params;
  gbdt::FeatureWeights baseline_weights;
  std::shared_ptr<const gbdt::Model> baseline_model;
};

// Fits nothing: train and pool must already be imputed, and encoder fitted.
// Trains the class-balanced baseline with uniform feature weights.
std::shared_ptr<const BaselineContext> MakeBaselineContext(
    data::Dataset base_train, std::shared_ptr<const data::Encoder> encoder,
    data::Dataset app_pool, const gbdt::GbdtParams& params,
    Warnings* warnings = nullptr);

struct AugmentedTraining {
  std::vector<std::size_t> pool_rows;  // one per added row, in order
  std::vector<int> targets;            // target of each added row
  gbdt::FeatureWeights feature_weights;
  gbdt::InstanceWeights instance_weights;  // original rows then added rows
  bool weights_changed = false;
  std::size_t feedback_used = 0;  // instances that added a row or changed fw

  bool effective() const { return !pool_rows.empty() || weights_changed; }
};

// Folds each submitted map over `start` in order (entries overwrite the
// current vector feature by feature, then the vector is renormalized).
// Unknown feature names throw kInvalidArgument.
gbdt::FeatureWeights MergeWeights(const gbdt::FeatureWeights& start,
                                  std::span<const FeedbackInstance> feedback);

// Applies a policy to feedback taken in the given order: rows come from
// row_feedback, feature weights from weight_feedback (merged per participant
// in order, then averaged across participants). Throws kNotFound for an
// application id missing from the pool.
AugmentedTraining ApplyPolicy(const BaselineContext& context,
                              std::span<const FeedbackInstance> row_feedback,
                              std::span<const FeedbackInstance> weight_feedback,
                              const IntegrationPolicy& policy,
                              Warnings* warnings = nullptr);
AugmentedTraining ApplyPolicy(const BaselineContext& context,
                              std::span<const FeedbackInstance> feedback,
                              const IntegrationPolicy& policy,
                              Warnings* warnings = nullptr);

// The augmented training set as a Dataset; added rows get ids of the form
// "<application id>#fb<k>" so repeated applications stay distinct.
data::Dataset Materialize(const BaselineContext& context,
                          const AugmentedTraining& training);
data::EncodedMatrix EncodeAugmented(const BaselineContext& context,
                                    const AugmentedTraining& training);

// Trains on the augmented set with its weights.
gbdt::Model TrainAugmented(const BaselineContext& context,
                           const AugmentedTraining& training,
                           Warnings* warnings = nullptr);

}  // namespace fairloop::integration

#endif  // FAIRLOOP_INTEGRATION_POLICY_H_
