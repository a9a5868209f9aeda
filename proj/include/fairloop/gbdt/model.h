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

#ifndef FAIRLOOP_GBDT_MODEL_H_
#define FAIRLOOP_GBDT_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairloop/gbdt/params.h"
#include "fairloop/gbdt/weights.h"
#include "json.hpp"

namespace fairloop::data {
class EncodedMatrix;
}

namespace fairloop::gbdt {

enum class Outcome { kAccept, kReject };

std::string_view OutcomeName(Outcome outcome);
inline Outcome OutcomeFromTarget(int target) {
  return target == 1 ? Outcome::kReject : Outcome::kAccept;
}
inline int TargetFromOutcome(Outcome outcome) {
  return outcome == Outcome::kReject ? 1 : 0;
}
inline Outcome Flip(Outcome outcome) {
  return outcome == Outcome::kReject ? Outcome::kAccept : Outcome::kReject;
}

struct Prediction {
  double probability = 0.5;  // P(target = 1), i.e. P(Reject)
  Outcome label = Outcome::kReject;
  double confidence = 0.5;  // max(p, 1 - p)
};

Prediction MakePrediction(double probability);

// Binary tree stored as a flat node array; node 0 is the root. Rows with
// x[column] < threshold go left.
struct TreeNode {
  std::int32_t column = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf output, already scaled by the learning rate

  bool is_leaf() const { return column < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double Predict(std::span<const double> row) const;
  int Depth() const;
  bool UsesColumn(std::size_t column) const;
  bool operator==(const RegressionTree&) const = default;
};

// Immutable trained ensemble.
class Model {
 public:
  Model(std::vector<RegressionTree> trees, double base_score, GbdtParams params,
        FeatureWeights feature_weights, std::vector<std::string> column_names,
        std::string fingerprint);

  const std::vector<RegressionTree>& trees() const { return trees_; }
  double base_score() const { return base_score_; }
  const GbdtParams& params() const { return params_; }
  const FeatureWeights& feature_weights() const { return feature_weights_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  std::size_t num_columns() const { return column_names_.size(); }
  const std::string& fingerprint() const { return fingerprint_; }

  // Raw score using the first `max_trees` trees (all by default).
  double Margin(std::span<const double> row,
                std::size_t max_trees = static_cast<std::size_t>(-1)) const;
  // Throws kInvalidArgument on a dimension mismatch.
  Prediction Predict(std::span<const double> row) const;
  std::vector<Prediction> PredictAll(const data::EncodedMatrix& matrix) const;

  bool operator==(const Model& other) const;

 private:
  std::vector<RegressionTree> trees_;
  double base_score_;
  GbdtParams params_;
  FeatureWeights feature_weights_;
  std::vector<std::string> column_names_;
  std::string fingerprint_;
};

inline constexpr int kModelSchemaVersion = 1;

// Versioned snapshot; doubles are written with round-trip precision so a
// reloaded model is bit-identical.
nlohmann::json ToJson(const Model& model);
Model ModelFromJson(const nlohmann::json& json);

}  // namespace fairloop::gbdt

#endif  // FAIRLOOP_GBDT_MODEL_H_
