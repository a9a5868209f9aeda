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

#include "fairloop/gbdt/weights.h"

#include <cmath>

#include "fairloop/common/error.h"
#include "fairloop/data/preprocess.h"

namespace fairloop::gbdt {

using nlohmann::json;

double FeatureWeights::at(const std::string& group) const {
  auto it = values_.find(group);
  if (it == values_.end()) {
    Fail(ErrorCode::kInvalidArgument, "no feature weight for group " + group);
  }
  return it->second;
}

FeatureWeights NormalizeWeights(const std::map<std::string, double>& raw) {
  double total = 0.0;
  for (const auto& [name, w] : raw) {
    if (!std::isfinite(w) || w < 0.0) {
      Fail(ErrorCode::kInvalidArgument,
           "feature weight for " + name + " must be finite and non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    Fail(ErrorCode::kInvalidArgument,
         "cannot normalize feature weights: all entries are zero");
  }
  FeatureWeights out;
  for (const auto& [name, w] : raw) out.values_[name] = w / total;
  return out;
}

FeatureWeights UniformWeights(std::span<const std::string> groups) {
  std::map<std::string, double> raw;
  for (const auto& g : groups) raw[g] = 1.0;
  return NormalizeWeights(raw);
}

json ToJson(const FeatureWeights& weights) { return weights.values(); }

FeatureWeights FeatureWeightsFromJson(const json& j) {
  FeatureWeights out;
  try {
    out.values_ = j.get<std::map<std::string, double>>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "malformed feature weights", e.what());
  }
  double total = 0.0;
  for (const auto& [name, w] : out.values_) {
    if (!std::isfinite(w) || w < 0.0) {
      Fail(ErrorCode::kParse, "stored feature weight for " + name + " is invalid");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(ErrorCode::kParse, "stored feature weights do not sum to 1");
  }
  return out;
}

void ValidateInstanceWeights(const InstanceWeights& weights, std::size_t rows) {
  if (weights.size() != rows) {
    Fail(ErrorCode::kInvalidArgument,
         "instance weights have " + std::to_string(weights.size()) +
             " entries for " + std::to_string(rows) + " rows");
  }
  bool any_positive = false;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      Fail(ErrorCode::kInvalidArgument,
           "instance weights must be finite and non-negative");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) {
    Fail(ErrorCode::kInvalidArgument, "instance weights are all zero");
  }
}

InstanceWeights BalanceInstanceWeights(std::span<const int> target,
                                       std::span<const std::size_t> feedback_rows,
                                       double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "alpha must be finite and >= 0");
  }
  const std::size_t n = target.size();
  std::vector<bool> in_feedback(n, false);
  for (std::size_t r : feedback_rows) {
    if (r >= n) {
      Fail(ErrorCode::kInvalidArgument, "feedback row index out of range");
    }
    in_feedback[r] = true;
  }
  // counts[block][class]
  double counts[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t r = 0; r < n; ++r) {
    counts[in_feedback[r] ? 1 : 0][target[r] == 1 ? 1 : 0] += 1.0;
  }
  double block_weight[2][2] = {{0, 0}, {0, 0}};
  for (int b = 0; b < 2; ++b) {
    const double size = counts[b][0] + counts[b][1];
    const double classes = (counts[b][0] > 0 ? 1.0 : 0.0) + (counts[b][1] > 0 ? 1.0 : 0.0);
    for (int c = 0; c < 2; ++c) {
      if (counts[b][c] > 0) block_weight[b][c] = size / (classes * counts[b][c]);
    }
  }
  // Class balancing keeps each block's total equal to its size.
  const double original_total = counts[0][0] + counts[0][1];
  const double feedback_total = counts[1][0] + counts[1][1];
  if (feedback_total > 0) {
    const double scale = alpha * original_total / feedback_total;
    for (int c = 0; c < 2; ++c) block_weight[1][c] *= scale;
  }
  InstanceWeights weights(n);
  for (std::size_t r = 0; r < n; ++r) {
    weights[r] = block_weight[in_feedback[r] ? 1 : 0][target[r] == 1 ? 1 : 0];
  }
  return weights;
}

InstanceWeights BalanceInstanceWeights(const data::EncodedMatrix& train,
                                       std::span<const std::size_t> feedback_rows,
                                       double alpha) {
  if (!train.has_target()) {
    Fail(ErrorCode::kFailedPrecondition, "instance weights need a labeled matrix");
  }
  return BalanceInstanceWeights(train.target(), feedback_rows, alpha);
}

}  // namespace fairloop::gbdt
