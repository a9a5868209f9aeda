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

#include "fairloop/gbdt/params.h"

#include <cmath>
#include <string>

#include "fairloop/common/error.h"

namespace fairloop::gbdt {

using nlohmann::json;

void GbdtParams::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, std::string("gbdt params: ") + what);
  };
  require(n_trees >= 1, "n_trees must be >= 1");
  require(max_depth >= 1, "max_depth must be >= 1");
  require(learning_rate > 0.0 && learning_rate <= 1.0,
          "learning_rate must be in (0, 1]");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be >= 0");
  require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be >= 0");
  require(colsample_bytree > 0.0 && colsample_bytree <= 1.0,
          "colsample_bytree must be in (0, 1]");
  require(std::isfinite(min_child_weight) && min_child_weight >= 0.0,
          "min_child_weight must be >= 0");
  require(num_threads >= 1, "num_threads must be >= 1");
}

std::string_view FeatureWeightModeName(FeatureWeightMode mode) {
  return mode == FeatureWeightMode::kSampling ? "sampling" : "gain_scaling";
}

json ToJson(const GbdtParams& p) {
  return {{"n_trees", p.n_trees},
          {"max_depth", p.max_depth},
          {"learning_rate", p.learning_rate},
          {"lambda", p.lambda},
          {"gamma", p.gamma},
          {"colsample_bytree", p.colsample_bytree},
          {"min_child_weight", p.min_child_weight},
          {"seed", p.seed},
          {"feature_weight_mode", FeatureWeightModeName(p.feature_weight_mode)}};
}

GbdtParams GbdtParamsFromJson(const json& j) {
  GbdtParams p;
  try {
    p.n_trees = j.value("n_trees", p.n_trees);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.learning_rate = j.value("learning_rate", p.learning_rate);
    p.lambda = j.value("lambda", p.lambda);
    p.gamma = j.value("gamma", p.gamma);
    p.colsample_bytree = j.value("colsample_bytree", p.colsample_bytree);
    p.min_child_weight = j.value("min_child_weight", p.min_child_weight);
    p.seed = j.value("seed", p.seed);
    p.num_threads = j.value("num_threads", p.num_threads);
    const std::string mode = j.value("feature_weight_mode", std::string("sampling"));
    if (mode == "sampling") {
      p.feature_weight_mode = FeatureWeightMode::kSampling;
    } else if (mode == "gain_scaling") {
      p.feature_weight_mode = FeatureWeightMode::kGainScaling;
    } else {
      Fail(ErrorCode::kInvalidArgument, "unknown feature_weight_mode: " + mode);
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "malformed gbdt params", e.what());
  }
  p.Validate();
  return p;
}

}  // namespace fairloop::gbdt
