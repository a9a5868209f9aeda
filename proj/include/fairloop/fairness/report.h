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

#ifndef FAIRLOOP_FAIRNESS_REPORT_H_
#define FAIRLOOP_FAIRNESS_REPORT_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairloop/data/binning.h"
#include "fairloop/data/preprocess.h"
#include "fairloop/fairness/counterfactual.h"
#include "fairloop/fairness/group_metrics.h"
#include "fairloop/fairness/individual_metrics.h"
#include "fairloop/gbdt/model.h"
#include "json.hpp"

namespace fairloop::fairness {

enum class MetricId { kAccuracy, kConsistency, kTheil, kDpr, kCdd, kEod, kAod, kPpd, kCf };

enum class Direction { kHigherBetter, kLowerBetter, kTowardIdeal };

struct MetricInfo {
  MetricId id;
  std::string_view key;     // "dpr"
  std::string_view symbol;  // "DPR"
  std::string_view ideal;   // "≈ 1"
  Direction direction;
  double ideal_value;
  bool per_attribute;
  double display_scale;  // 100 for accuracy shown as a percentage
};

const std::vector<MetricInfo>& AllMetrics();
const MetricInfo& Info(MetricId id);
std::optional<MetricId> ParseMetric(std::string_view key);
// Column header with the ideal value and improvement arrow, e.g. "DPR (≈ 1) (↑)".
std::string Header(MetricId id);

// A metric that may be undefined on the given data; reason is set iff value
// is empty.
struct MetricValue {
  std::optional<double> value;
  std::string undefined_reason;

  static MetricValue Of(double v) { return {v, {}}; }
  static MetricValue Undefined(std::string reason) {
    return {std::nullopt, std::move(reason)};
  }
  bool defined() const { return value.has_value(); }
  bool operator==(const MetricValue&) const = default;
};

struct AttributeReport {
  std::string attribute;
  std::map<MetricId, MetricValue> metrics;  // dpr, cdd, eod, aod, ppd, cf
  GroupStats stats;
};

inline constexpr int kReportSchemaVersion = 1;

struct FairnessReport {
  std::map<MetricId, MetricValue> overall;  // accuracy, consistency, theil
  double acceptance_rate = 0.0;             // share predicted Accept
  std::size_t num_instances = 0;
  std::vector<AttributeReport> attributes;

  std::string model_fingerprint;
  std::string eval_fingerprint;
  int k = 5;
  GroupReduction reduction = GroupReduction::kMinMax;
  std::map<std::string, data::BinningRule> bins;
  std::map<std::string, std::string> cdd_strata;

  // Overall metric when attribute is empty, otherwise the attribute's.
  MetricValue Get(MetricId id, const std::string& attribute = {}) const;
  const AttributeReport* FindAttribute(const std::string& attribute) const;
};

struct ReportConfig {
  // Empty means every protected feature of the schema.
  std::vector<std::string> attributes;
  // Rules for numeric attributes and numeric strata features.
  std::map<std::string, data::BinningRule> bins;
  // attribute -> conditioning feature for CDD; absent means no strata.
  std::map<std::string, std::string> cdd_strata;
  int k = 5;
  GroupReduction reduction = GroupReduction::kMinMax;
  int num_threads = 1;
};

// Evaluation set, encoding and neighbour graph prepared once; Evaluate() is
// then cheap enough to run after every retrain.
class Evaluator {
 public:
  Evaluator(data::Dataset eval, std::shared_ptr<const data::Encoder> encoder,
            ReportConfig config, Warnings* warnings = nullptr);

  FairnessReport Evaluate(const gbdt::Model& model) const;
  // Attribute block for any schema feature, including non-default ones.
  AttributeReport EvaluateAttribute(const gbdt::Model& model,
                                    const std::vector<Outcome>& predicted,
                                    const std::string& attribute) const;

  const data::Dataset& dataset() const { return eval_; }
  const data::EncodedMatrix& encoded() const { return encoded_; }
  const data::Encoder& encoder() const { return *encoder_; }
  const ReportConfig& config() const { return config_; }
  const std::vector<int>& truth() const { return truth_; }
  const std::string& fingerprint() const { return fingerprint_; }
  std::vector<Outcome> PredictLabels(const gbdt::Model& model) const;

 private:
  struct AttributeCache {
    data::Grouping grouping;
    std::optional<data::Grouping> strata;
    std::optional<CounterfactualPlan> plan;
    std::string plan_error;
    std::optional<data::BinningRule> rule;
  };
  const AttributeCache& CacheFor(const std::string& attribute) const;
  AttributeCache BuildCache(const std::string& attribute,
                            const data::BinningRule* rule,
                            Warnings* warnings) const;

  data::Dataset eval_;
  std::shared_ptr<const data::Encoder> encoder_;
  ReportConfig config_;
  data::EncodedMatrix encoded_;
  std::vector<int> truth_;
  std::optional<NeighborIndex> neighbors_;
  std::string neighbors_error_;
  std::string fingerprint_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, AttributeCache> caches_;
};

// One-shot convenience over Evaluator.
FairnessReport Report(const gbdt::Model& model, const data::Dataset& eval,
                      std::shared_ptr<const data::Encoder> encoder,
                      const ReportConfig& config);

nlohmann::json ToJson(const MetricValue& value);
nlohmann::json ToJson(const FairnessReport& report);
FairnessReport FairnessReportFromJson(const nlohmann::json& json);

nlohmann::json ToJson(const ReportConfig& config);
// bins are not part of the JSON form; callers attach them separately.
ReportConfig ReportConfigFromJson(const nlohmann::json& json);

std::string_view GroupReductionName(GroupReduction reduction);
// "min_max" or "pairwise_max".
GroupReduction ParseGroupReduction(std::string_view name);

}  // namespace fairloop::fairness

#endif  // FAIRLOOP_FAIRNESS_REPORT_H_
