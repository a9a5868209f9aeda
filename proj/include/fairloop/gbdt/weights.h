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

#ifndef FAIRLOOP_GBDT_WEIGHTS_H_
#define FAIRLOOP_GBDT_WEIGHTS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace fairloop::data {
class EncodedMatrix;
}

namespace fairloop::gbdt {

// Normalized, non-negative weight per feature group (source feature name).
class FeatureWeights {
 public:
  FeatureWeights() = default;

  const std::map<std::string, double>& values() const { return values_; }
  double at(const std::string& group) const;
  bool contains(const std::string& group) const {
    return values_.count(group) > 0;
  }
  std::size_t size() const { return values_.size(); }

  bool operator==(const FeatureWeights&) const = default;

 private:
  friend FeatureWeights NormalizeWeights(const std::map<std::string, double>&);
  friend FeatureWeights FeatureWeightsFromJson(const nlohmann::json&);
  std::map<std::string, double> values_;
};

// Divides every entry by the total. Throws kInvalidArgument on a negative or
// non-finite entry, or when every entry is zero.
FeatureWeights NormalizeWeights(const std::map<std::string, double>& raw);
FeatureWeights UniformWeights(std::span<const std::string> groups);

nlohmann::json ToJson(const FeatureWeights& weights);
// Accepts a stored, already normalized vector verbatim (sum within 1e-9 of 1).
FeatureWeights FeatureWeightsFromJson(const nlohmann::json& json);

// One non-negative weight per training row.
using InstanceWeights = std::vector<double>;

// Throws kInvalidArgument if a weight is negative/non-finite or all are zero.
void ValidateInstanceWeights(const InstanceWeights& weights, std::size_t rows);

// Weights for a training set made of an original block plus a feedback block.
// Within each block every class present gets equal total weight (each row
// weighted block_size / (classes_present * class_count)). The feedback block
// is then rescaled so its total is alpha times the original block's total.
InstanceWeights BalanceInstanceWeights(std::span<const int> target,
                                       std::span<const std::size_t> feedback_rows,
                                       double alpha);
InstanceWeights BalanceInstanceWeights(const data::EncodedMatrix& train,
                                       std::span<const std::size_t> feedback_rows,
                                       double alpha);

}  // namespace fairloop::gbdt

#endif  // FAIRLOOP_GBDT_WEIGHTS_H_
