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

#ifndef FAIRLOOP_GBDT_PARAMS_H_
#define FAIRLOOP_GBDT_PARAMS_H_

#include <cstdint>
#include <string_view>

#include "json.hpp"

namespace fairloop::gbdt {

// How feature-group weights influence training.
//   kSampling:    per-tree column subsampling with probability proportional to
//                 the weight. No effect when colsample_bytree == 1.
//   kGainScaling: uniform subsampling; each split gain is multiplied by
//                 weight * number_of_groups.
enum class FeatureWeightMode { kSampling, kGainScaling };

struct GbdtParams {
  int n_trees = 100;
  int max_depth = 4;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  double colsample_bytree = 0.8;
  double min_child_weight = 1.0;
  std::uint64_t seed = 0;
  FeatureWeightMode feature_weight_mode = FeatureWeightMode::kSampling;
  // Not part of the model identity: results are identical for any value.
  int num_threads = 1;

  // Throws kInvalidArgument naming the first violated bound.
  void Validate() const;
};

std::string_view FeatureWeightModeName(FeatureWeightMode mode);

nlohmann::json ToJson(const GbdtParams& params);
// Missing keys keep their defaults; the result is validated.
GbdtParams GbdtParamsFromJson(const nlohmann::json& json);

}  // namespace fairloop::gbdt

#endif  // FAIRLOOP_GBDT_PARAMS_H_
