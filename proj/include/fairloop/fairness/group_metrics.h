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

#ifndef FAIRLOOP_FAIRNESS_GROUP_METRICS_H_
#define FAIRLOOP_FAIRNESS_GROUP_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairloop/common/error.h"
#include "fairloop/data/binning.h"
#include "fairloop/gbdt/model.h"
#include "json.hpp"

namespace fairloop::fairness {

using data::Grouping;
using gbdt::Outcome;

// Confusion counts for one attribute value. Accept is the favorable outcome:
// TPR = P(pred Accept | truth Accept), FPR = P(pred Accept | truth Reject),
// PPV = P(truth Accept | pred Accept). A rate whose denominator is zero is
// left empty rather than set to 0.
struct GroupRates {
  std::string group;
  std::size_t count = 0;
  std::size_t predicted_accept = 0;
  std::size_t truth_accept = 0;
  std::size_t truth_reject = 0;
  std::size_t true_accept = 0;
  std::size_t false_accept = 0;

  std::optional<double> selection_rate;
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<double> ppv;
};

struct GroupStats {
  std::vector<GroupRates> groups;  // ordered by group label
};

// truth holds targets (1 = Reject). All three inputs are aligned by row.
GroupStats ComputeGroupStats(std::span<const Outcome> predicted,
                             std::span<const int> truth,
                             const Grouping& grouping);

// How spreads over more than two groups are reduced. The two agree for DPR,
// EOD and PPD; for AOD kPairwiseMax takes the largest pairwise average.
enum class GroupReduction { kMinMax, kPairwiseMax };

enum class Rate { kSelection, kTpr, kFpr, kPpv };

struct RateExtremes {
  std::string min_group;
  double min = 0.0;
  std::string max_group;
  double max = 0.0;
};

// Lowest and highest defined value of a rate across groups (first group wins
// ties). Throws kUndefinedMetric if fewer than two groups, or if any group's
// rate is undefined.
RateExtremes Extremes(const GroupStats& stats, Rate rate);

// min selection rate / max selection rate.
double Dpr(const GroupStats& stats);
// max TPR - min TPR.
double Eod(const GroupStats& stats);
// 0.5 * [(max TPR - min TPR) + (max FPR - min FPR)] under kMinMax.
double Aod(const GroupStats& stats,
           GroupReduction reduction = GroupReduction::kMinMax);
// max PPV - min PPV.
double Ppd(const GroupStats& stats);

// Demographic disparity per group, DD_g = P(g | Reject) - P(g | Accept),
// averaged over strata weighted by stratum size; the maximum over groups is
// returned. strata == nullptr means a single stratum. Strata lacking either
// predicted outcome are skipped with a warning.
double Cdd(std::span<const Outcome> predicted, const Grouping& grouping,
           const Grouping* strata, Warnings* warnings = nullptr);

nlohmann::json ToJson(const GroupStats& stats);
GroupStats GroupStatsFromJson(const nlohmann::json& json);

}  // namespace fairloop::fairness

#endif  // FAIRLOOP_FAIRNESS_GROUP_METRICS_H_
