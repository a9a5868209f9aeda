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

#ifndef FAIRLOOP_DATA_BINNING_H_
#define FAIRLOOP_DATA_BINNING_H_

#include <string>
#include <vector>

#include "fairloop/common/error.h"
#include "fairloop/data/dataset.h"
#include "json.hpp"

namespace fairloop::data {

// Interior cut points over a numeric feature. Bin i holds values v with
// edges[i-1] < v <= edges[i]; the first and last bins are open-ended. The
// covered range is the span of the data the rule was built on (widened to
// include every edge); values outside it are still binned into the boundary
// bin but reported.
struct BinningRule {
  std::string feature;
  std::vector<double> edges;
  std::vector<std::string> labels;  // edges.size() + 1 entries
  double range_min = 0.0;
  double range_max = 0.0;

  std::size_t num_bins() const { return edges.size() + 1; }
  // Bin index for a value; sets *clamped when outside the covered range.
  std::size_t BinOf(double value, bool* clamped = nullptr) const;

  bool operator==(const BinningRule&) const = default;
};

BinningRule MakeBinningRule(const std::string& feature,
                            std::vector<double> edges, const Dataset& fit_on);
// Quartile edges (linear interpolation) of the observed values; duplicate
// edges and edges at the maximum are dropped so no bin is empty on fit_on.
BinningRule QuartileRule(const std::string& feature, const Dataset& fit_on);

// One label per row of the dataset, aligned by row index.
using Grouping = std::vector<std::string>;

Grouping Bin(const Dataset& dataset, const BinningRule& rule,
             Warnings* warnings = nullptr);

// Categorical features group by level; numeric features require a rule.
Grouping GroupBy(const Dataset& dataset, const std::string& feature,
                 const BinningRule* rule, Warnings* warnings = nullptr);

nlohmann::json ToJson(const BinningRule& rule);
BinningRule BinningRuleFromJson(const nlohmann::json& json);

}  // namespace fairloop::data

#endif  // FAIRLOOP_DATA_BINNING_H_
