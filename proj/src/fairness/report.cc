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

#include "fairloop/fairness/report.h"

#include <algorithm>

#include "fairloop/common/hash.h"

namespace fairloop::fairness {
namespace {

using json = nlohmann::json;

template <typename F>
MetricValue Guarded(F&& compute) {
  try {
    return MetricValue::Of(compute());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUndefinedMetric &&
        e.code() != ErrorCode::kInvalidArgument) {
      throw;
    }
    return MetricValue::Undefined(e.what());
  }
}

std::string_view DirectionArrow(Direction d) {
  switch (d) {
    case Direction::kHigherBetter: return "↑";
    case Direction::kLowerBetter: return "↓";
    case Direction::kTowardIdeal: return "→";
  }
  return "";
}

json MetricMapToJson(const std::map<MetricId, MetricValue>& metrics) {
  json out = json::object();
  for (const auto& [id, value] : metrics) {
    out[std::string(Info(id).key)] = ToJson(value);
  }
  return out;
}

MetricValue MetricValueFromJson(const json& j) {
  MetricValue v;
  if (!j.at("value").is_null()) v.value = j.at("value").get<double>();
  if (j.contains("undefined_reason")) {
    v.undefined_reason = j.at("undefined_reason").get<std::string>();
  }
  return v;
}

std::map<MetricId, MetricValue> MetricMapFromJson(const json& j) {
  std::map<MetricId, MetricValue> out;
  for (const auto& [key, value] : j.items()) {
    const auto id = ParseMetric(key);
    if (!id) Fail(ErrorCode::kParse, "unknown metric '" + key + "'");
    out[*id] = MetricValueFromJson(value);
  }
  return out;
}

}  // namespace

const std::vector<MetricInfo>& AllMetrics() {
  static const std::vector<MetricInfo> kMetrics = {
      {MetricId::kAccuracy, "accuracy", "Acc. %", "≈ 100", Direction::kHigherBetter, 1.0, false, 100.0},
      {MetricId::kConsistency, "consistency", "Cons.", "≈ 1", Direction::kHigherBetter, 1.0, false, 1.0},
      {MetricId::kTheil, "theil", "TI", "≈ 0", Direction::kLowerBetter, 0.0, false, 1.0},
      {MetricId::kDpr, "dpr", "DPR", "≈ 1", Direction::kHigherBetter, 1.0, true, 1.0},
      {MetricId::kCdd, "cdd", "CDD", "≤ 0", Direction::kLowerBetter, 0.0, true, 1.0},
      {MetricId::kEod, "eod", "EOD", "≈ 0", Direction::kLowerBetter, 0.0, true, 1.0},
      {MetricId::kAod, "aod", "AOD", "≈ 0", Direction::kLowerBetter, 0.0, true, 1.0},
      {MetricId::kPpd, "ppd", "PPD", "≈ 0", Direction::kLowerBetter, 0.0, true, 1.0},
      {MetricId::kCf, "cf", "CF", "≈ 1", Direction::kHigherBetter, 1.0, true, 1.0},
  };
  return kMetrics;
}

const MetricInfo& Info(MetricId id) {
  for (const auto& info : AllMetrics()) {
    if (info.id == id) return info;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown metric id");
}

std::optional<MetricId> ParseMetric(std::string_view key) {
  for (const auto& info : AllMetrics()) {
    if (info.key == key) return info.id;
  }
  return std::nullopt;
}

std::string Header(MetricId id) {
  const MetricInfo& info = Info(id);
  return std::string(info.symbol) + " (" + std::string(info.ideal) + ") (" +
         std::string(DirectionArrow(info.direction)) + ")";
}

std::string_view GroupReductionName(GroupReduction reduction) {
  return reduction == GroupReduction::kMinMax ? "min_max" : "pairwise_max";
}

GroupReduction ParseGroupReduction(std::string_view name) {
  if (name == "min_max") return GroupReduction::kMinMax;
  if (name == "pairwise_max") return GroupReduction::kPairwiseMax;
  Fail(ErrorCode::kInvalidArgument,
       "unknown group reduction '" + std::string(name) + "'");
}

MetricValue FairnessReport::Get(MetricId id, const std::string& attribute) const {
  if (attribute.empty()) {
    auto it = overall.find(id);
    if (it == overall.end()) {
      Fail(ErrorCode::kNotFound,
           "metric '" + std::string(Info(id).key) + "' is per attribute");
    }
    return it->second;
  }
  const AttributeReport* a = FindAttribute(attribute);
  if (a == nullptr) {
    Fail(ErrorCode::kNotFound, "attribute '" + attribute + "' not in report");
  }
  auto it = a->metrics.find(id);
  if (it == a->metrics.end()) {
    Fail(ErrorCode::kNotFound,
         "metric '" + std::string(Info(id).key) + "' is not per attribute");
  }
  return it->second;
}

const AttributeReport* FairnessReport::FindAttribute(
    const std::string& attribute) const {
  for (const auto& a : attributes) {
    if (a.attribute == attribute) return &a;
  }
  return nullptr;
}

Evaluator::Evaluator(data::Dataset eval,
                     std::shared_ptr<const data::Encoder> encoder,
                     ReportConfig config, Warnings* warnings)
    : eval_(std::move(eval)), encoder_(std::move(encoder)), config_(std::move(config)) {
  if (eval_.empty()) Fail(ErrorCode::kInvalidArgument, "empty evaluation set");
  if (encoder_ == nullptr) Fail(ErrorCode::kInvalidArgument, "encoder is required");
  if (eval_.HasMissingValues()) {
    Fail(ErrorCode::kFailedPrecondition, "evaluation set must be imputed");
  }
  truth_ = eval_.RequireTargets();
  encoded_ = encoder_->Transform(eval_, warnings);
  if (config_.attributes.empty()) {
    config_.attributes = eval_.schema().ProtectedFeatureNames();
  }
  for (const auto& attribute : config_.attributes) {
    eval_.schema().RequireIndex(attribute);
  }
  for (const auto& [attribute, stratum] : config_.cdd_strata) {
    eval_.schema().RequireIndex(stratum);
  }
  try {
    neighbors_ = NeighborIndex::Build(encoded_, config_.k, config_.num_threads);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    neighbors_error_ = e.what();
  }

  Fingerprinter fp;
  fp.Update(static_cast<std::uint64_t>(eval_.num_rows()));
  for (std::size_t r = 0; r < eval_.num_rows(); ++r) {
    fp.Update(eval_.id(r));
    fp.Update(truth_[r]);
    for (const auto& cell : eval_.row(r)) fp.Update(data::CellToString(cell));
  }
  fingerprint_ = fp.Hex();

  for (const auto& attribute : config_.attributes) {
    const data::BinningRule* rule = nullptr;
    auto it = config_.bins.find(attribute);
    if (it != config_.bins.end()) rule = &it->second;
    AttributeCache cache = BuildCache(attribute, rule, warnings);
    if (cache.rule && rule == nullptr) config_.bins.emplace(attribute, *cache.rule);
    caches_.emplace(attribute, std::move(cache));
  }
}

Evaluator::AttributeCache Evaluator::BuildCache(const std::string& attribute,
                                                const data::BinningRule* rule,
                                                Warnings* warnings) const {
  AttributeCache cache;
  const std::size_t index = eval_.schema().RequireIndex(attribute);
  if (eval_.schema().feature(index).kind == data::FeatureKind::kNumeric) {
    if (rule == nullptr) {
      Warn(warnings, "no binning rule for '" + attribute +
                         "'; using quartiles of the evaluation set");
      cache.rule = data::QuartileRule(attribute, eval_);
    } else {
      cache.rule = *rule;
    }
  }
  const data::BinningRule* active = cache.rule ? &*cache.rule : nullptr;
  cache.grouping = data::GroupBy(eval_, attribute, active, warnings);

  auto stratum = config_.cdd_strata.find(attribute);
  if (stratum != config_.cdd_strata.end()) {
    const std::size_t s = eval_.schema().RequireIndex(stratum->second);
    const data::BinningRule* srule = nullptr;
    std::optional<data::BinningRule> fallback;
    auto bin = config_.bins.find(stratum->second);
    if (bin != config_.bins.end()) {
      srule = &bin->second;
    } else if (eval_.schema().feature(s).kind == data::FeatureKind::kNumeric) {
      fallback = data::QuartileRule(stratum->second, eval_);
      srule = &*fallback;
    }
    cache.strata = data::GroupBy(eval_, stratum->second, srule, warnings);
  }

  try {
    cache.plan.emplace(eval_, attribute, active);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    cache.plan_error = e.what();
  }
  return cache;
}

const Evaluator::AttributeCache& Evaluator::CacheFor(
    const std::string& attribute) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = caches_.find(attribute);
  if (it != caches_.end()) return it->second;
  const data::BinningRule* rule = nullptr;
  auto bin = config_.bins.find(attribute);
  if (bin != config_.bins.end()) rule = &bin->second;
  return caches_.emplace(attribute, BuildCache(attribute, rule, nullptr))
      .first->second;
}

std::vector<Outcome> Evaluator::PredictLabels(const gbdt::Model& model) const {
  const auto predictions = model.PredictAll(encoded_);
  std::vector<Outcome> labels;
  labels.reserve(predictions.size());
  for (const auto& p : predictions) labels.push_back(p.label);
  return labels;
}

AttributeReport Evaluator::EvaluateAttribute(const gbdt::Model& model,
                                             const std::vector<Outcome>& predicted,
                                             const std::string& attribute) const {
  const AttributeCache& cache = CacheFor(attribute);
  AttributeReport out;
  out.attribute = attribute;
  out.stats = ComputeGroupStats(predicted, truth_, cache.grouping);
  const GroupStats& stats = out.stats;
  out.metrics[MetricId::kDpr] = Guarded([&] { return Dpr(stats); });
  out.metrics[MetricId::kCdd] = Guarded([&] {
    return Cdd(predicted, cache.grouping, cache.strata ? &*cache.strata : nullptr);
  });
  out.metrics[MetricId::kEod] = Guarded([&] { return Eod(stats); });
  out.metrics[MetricId::kAod] =
      Guarded([&] { return Aod(stats, config_.reduction); });
  out.metrics[MetricId::kPpd] = Guarded([&] { return Ppd(stats); });
  if (cache.plan) {
    out.metrics[MetricId::kCf] = Guarded([&] {
      return CounterfactualInvariance(model, *encoder_, encoded_, *cache.plan);
    });
  } else {
    out.metrics[MetricId::kCf] = MetricValue::Undefined(cache.plan_error);
  }
  return out;
}

FairnessReport Evaluator::Evaluate(const gbdt::Model& model) const {
  const std::vector<Outcome> predicted = PredictLabels(model);
  FairnessReport report;
  report.num_instances = predicted.size();
  report.overall[MetricId::kAccuracy] =
      Guarded([&] { return Accuracy(predicted, truth_); });
  if (neighbors_) {
    report.overall[MetricId::kConsistency] =
        Guarded([&] { return Consistency(predicted, *neighbors_); });
  } else {
    report.overall[MetricId::kConsistency] = MetricValue::Undefined(neighbors_error_);
  }
  report.overall[MetricId::kTheil] =
      Guarded([&] { return TheilIndex(predicted, truth_); });
  std::size_t accepted = 0;
  for (Outcome o : predicted) accepted += o == Outcome::kAccept ? 1 : 0;
  report.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(predicted.size());
  for (const auto& attribute : config_.attributes) {
    report.attributes.push_back(EvaluateAttribute(model, predicted, attribute));
  }
  report.model_fingerprint = model.fingerprint();
  report.eval_fingerprint = fingerprint_;
  report.k = config_.k;
  report.reduction = config_.reduction;
  for (const auto& attribute : config_.attributes) {
    auto it = config_.bins.find(attribute);
    if (it != config_.bins.end()) report.bins.emplace(*it);
  }
  for (const auto& [attribute, stratum] : config_.cdd_strata) {
    auto it = config_.bins.find(stratum);
    if (it != config_.bins.end()) report.bins.emplace(*it);
  }
  report.cdd_strata = config_.cdd_strata;
  return report;
}

FairnessReport Report(const gbdt::Model& model, const data::Dataset& eval,
                      std::shared_ptr<const data::Encoder> encoder,
                      const ReportConfig& config) {
  return Evaluator(eval, std::move(encoder), config).Evaluate(model);
}

json ToJson(const MetricValue& value) {
  json out;
  out["value"] = value.value ? json(*value.value) : json(nullptr);
  if (!value.value) out["undefined_reason"] = value.undefined_reason;
  return out;
}

json ToJson(const FairnessReport& report) {
  json attributes = json::array();
  for (const auto& a : report.attributes) {
    attributes.push_back({{"attribute", a.attribute},
                          {"metrics", MetricMapToJson(a.metrics)},
                          {"groups", ToJson(a.stats)}});
  }
  json bins = json::object();
  for (const auto& [feature, rule] : report.bins) bins[feature] = ToJson(rule);
  return {{"schema_version", kReportSchemaVersion},
          {"num_instances", report.num_instances},
          {"acceptance_rate", report.acceptance_rate},
          {"overall", MetricMapToJson(report.overall)},
          {"attributes", attributes},
          {"metadata",
           {{"model_fingerprint", report.model_fingerprint},
            {"eval_fingerprint", report.eval_fingerprint},
            {"k", report.k},
            {"reduction", GroupReductionName(report.reduction)},
            {"bins", bins},
            {"cdd_strata", report.cdd_strata}}}};
}

FairnessReport FairnessReportFromJson(const json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kReportSchemaVersion) {
      Fail(ErrorCode::kParse,
           "unsupported report schema_version " + std::to_string(version));
    }
    FairnessReport report;
    report.num_instances = j.at("num_instances").get<std::size_t>();
    report.acceptance_rate = j.at("acceptance_rate").get<double>();
    report.overall = MetricMapFromJson(j.at("overall"));
    for (const auto& a : j.at("attributes")) {
      AttributeReport ar;
      ar.attribute = a.at("attribute").get<std::string>();
      ar.metrics = MetricMapFromJson(a.at("metrics"));
      ar.stats = GroupStatsFromJson(a.at("groups"));
      report.attributes.push_back(std::move(ar));
    }
    const json& meta = j.at("metadata");
    report.model_fingerprint = meta.at("model_fingerprint").get<std::string>();
    report.eval_fingerprint = meta.at("eval_fingerprint").get<std::string>();
    report.k = meta.at("k").get<int>();
    report.reduction = ParseGroupReduction(meta.at("reduction").get<std::string>());
    for (const auto& [feature, rule] : meta.at("bins").items()) {
      report.bins.emplace(feature, data::BinningRuleFromJson(rule));
    }
    report.cdd_strata =
        meta.at("cdd_strata").get<std::map<std::string, std::string>>();
    return report;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed report: ") + e.what());
  }
}

json ToJson(const ReportConfig& config) {
  return {{"attributes", config.attributes},
          {"cdd_strata", config.cdd_strata},
          {"k", config.k},
          {"reduction", GroupReductionName(config.reduction)}};
}

ReportConfig ReportConfigFromJson(const json& j) {
  ReportConfig config;
  try {
    if (j.contains("attributes")) {
      config.attributes = j.at("attributes").get<std::vector<std::string>>();
    }
    if (j.contains("cdd_strata")) {
      config.cdd_strata =
          j.at("cdd_strata").get<std::map<std::string, std::string>>();
    }
    if (j.contains("k")) config.k = j.at("k").get<int>();
    if (j.contains("reduction")) {
      config.reduction = ParseGroupReduction(j.at("reduction").get<std::string>());
    }
    if (j.contains("num_threads")) config.num_threads = j.at("num_threads").get<int>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed fairness config: ") + e.what());
  }
  if (config.k <= 0) Fail(ErrorCode::kInvalidArgument, "k must be positive");
  return config;
}

}  // namespace fairloop::fairness
